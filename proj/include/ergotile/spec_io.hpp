#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergotile/markers.hpp"
#include "ergotile/measure.hpp"
#include "ergotile/periodic.hpp"
#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"
#include "ergotile/tiling.hpp"

namespace ergotile {

/// Spec parsing or validation failure; the message carries the field path.
class SpecParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain nlohmann json keeps object keys sorted, which makes every serialized
// report canonical: identical content means identical bytes.
using Json = nlohmann::json;

inline const Json& require_field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw SpecParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SpecParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

/// Rationals appear as "p/q" strings; plain JSON integers are accepted too,
/// both being exact.
inline Rational parse_rational_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(BigInt(j.get<long long>()));
  if (!j.is_string()) throw SpecParseError(where + ": expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::exception& e) {
    throw SpecParseError(where + ": " + e.what());
  }
}

inline std::vector<Rational> parse_rational_table(const Json& j, std::size_t n,
                                                  const std::string& where) {
  if (!j.is_array()) throw SpecParseError(where + ": expected an array");
  if (j.size() != n)
    throw SpecParseError(where + ": expected " + std::to_string(n) + " entries, found " +
                         std::to_string(j.size()));
  std::vector<Rational> out;
  out.reserve(n);
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_rational_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

/// Stream observable: a rational constant, or a residue/bit predicate taking
/// one value inside and another outside.
struct ObservableSpec {
  enum class Kind { Constant, Residue, Bit };
  Kind kind = Kind::Constant;
  Rational value;  // Constant
  unsigned long long modulus = 1;
  unsigned long long residue = 0;  // Residue
  int bit = 0;                     // Bit
  Rational value_in = 1;
  Rational value_out = 0;
};

inline ObservableSpec parse_observable(const Json& j, const std::string& where) {
  ObservableSpec o;
  if (j.is_string() || j.is_number_integer()) {
    o.value = parse_rational_json(j, where);
    return o;
  }
  if (!j.is_object()) throw SpecParseError(where + ": expected a constant or a predicate object");
  if (j.contains("const")) {
    o.value = parse_rational_json(j.at("const"), where + ".const");
    return o;
  }
  if (j.contains("residue")) {
    const Json& r = j.at("residue");
    o.kind = ObservableSpec::Kind::Residue;
    const Json& m = require_field(r, "modulus", where + ".residue");
    if (!m.is_number_integer() || m.get<long long>() < 1)
      throw SpecParseError(where + ".residue.modulus: expected a positive integer");
    o.modulus = m.get<unsigned long long>();
    const Json& v = require_field(r, "residue", where + ".residue");
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw SpecParseError(where + ".residue.residue: expected a nonnegative integer");
    o.residue = v.get<unsigned long long>() % o.modulus;
  } else if (j.contains("bit")) {
    const Json& b = j.at("bit");
    if (!b.is_number_integer() || b.get<long long>() < 0 || b.get<long long>() > 62)
      throw SpecParseError(where + ".bit: expected an integer in [0, 62]");
    o.kind = ObservableSpec::Kind::Bit;
    o.bit = b.get<int>();
  } else {
    throw SpecParseError(where + ": expected one of \"const\", \"residue\", \"bit\"");
  }
  if (j.contains("then")) o.value_in = parse_rational_json(j.at("then"), where + ".then");
  if (j.contains("else")) o.value_out = parse_rational_json(j.at("else"), where + ".else");
  return o;
}

inline SuccessorSystem::ObsFn observable_fn(const ObservableSpec& o) {
  switch (o.kind) {
    case ObservableSpec::Kind::Constant:
      return [v = o.value](const SuccessorPoint&) { return v; };
    case ObservableSpec::Kind::Residue:
      return [o](const SuccessorPoint& n) { return n % o.modulus == o.residue ? o.value_in : o.value_out; };
    case ObservableSpec::Kind::Bit:
    default:
      return [o](const SuccessorPoint& n) {
        return (n & (1ull << o.bit)) != 0 ? o.value_in : o.value_out;
      };
  }
}

/// Marker level predicate: residue class or bit test.
struct MarkerPredSpec {
  bool is_bit = false;
  unsigned long long modulus = 1;
  unsigned long long residue = 0;
  int bit = 0;
};

inline MarkerPredSpec parse_marker_pred(const Json& j, const std::string& where) {
  MarkerPredSpec m;
  if (!j.is_object()) throw SpecParseError(where + ": expected a predicate object");
  if (j.contains("residue")) {
    const Json& r = j.at("residue");
    const Json& mm = require_field(r, "modulus", where + ".residue");
    if (!mm.is_number_integer() || mm.get<long long>() < 1)
      throw SpecParseError(where + ".residue.modulus: expected a positive integer");
    m.modulus = mm.get<unsigned long long>();
    const Json& v = require_field(r, "residue", where + ".residue");
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw SpecParseError(where + ".residue.residue: expected a nonnegative integer");
    m.residue = v.get<unsigned long long>() % m.modulus;
  } else if (j.contains("bit")) {
    const Json& b = j.at("bit");
    if (!b.is_number_integer() || b.get<long long>() < 0 || b.get<long long>() > 62)
      throw SpecParseError(where + ".bit: expected an integer in [0, 62]");
    m.is_bit = true;
    m.bit = b.get<int>();
  } else {
    throw SpecParseError(where + ": expected \"residue\" or \"bit\"");
  }
  return m;
}

inline StreamSet<SuccessorPoint> marker_pred_set(const MarkerPredSpec& m) {
  if (!m.is_bit) return residue_set(m.modulus, m.residue);
  StreamSet<SuccessorPoint> s;
  const unsigned long long bit = 1ull << m.bit;
  s.pred = [bit](const SuccessorPoint& n) { return (n & bit) != 0; };
  s.period = bit << 1;
  s.label = "bit " + std::to_string(m.bit) + " set";
  return s;
}

/// Parsed system specification file.
struct SystemSpec {
  std::string kind;  // "finite" | "stream-successor"

  // finite
  std::vector<int> step;
  std::vector<Rational> f, g, h, w;
  std::optional<std::vector<Rational>> measure;

  // stream-successor
  long long window = 1 << 12;
  ObservableSpec sf, sg, sh, sw;
  std::vector<MarkerPredSpec> markers;
  std::vector<SuccessorPoint> probes;

  // pipeline parameters
  long long depth = 4;
  std::optional<Rational> h_offset;

  bool finite() const { return kind == "finite"; }
};

inline SystemSpec parse_system_spec(const Json& j) {
  if (!j.is_object()) throw SpecParseError("spec: expected a JSON object");
  SystemSpec spec;
  const Json& kind = require_field(j, "kind", "spec");
  if (!kind.is_string()) throw SpecParseError("spec.kind: expected a string");
  spec.kind = kind.get<std::string>();
  if (spec.kind != "finite" && spec.kind != "stream-successor")
    throw SpecParseError("spec.kind: expected \"finite\" or \"stream-successor\", found \"" +
                         spec.kind + "\"");

  if (spec.finite()) {
    const Json& step = require_field(j, "step", "spec");
    if (!step.is_array() || step.empty())
      throw SpecParseError("spec.step: expected a nonempty array");
    const int n = static_cast<int>(step.size());
    for (std::size_t i = 0; i < step.size(); ++i) {
      if (!step[i].is_number_integer() || step[i].get<long long>() < 0 ||
          step[i].get<long long>() >= n)
        throw SpecParseError("spec.step[" + std::to_string(i) + "]: expected an index in [0, " +
                             std::to_string(n) + ")");
      spec.step.push_back(step[i].get<int>());
    }
    if (j.contains("points")) {
      const Json& p = j.at("points");
      if (!p.is_number_integer() || p.get<long long>() != n)
        throw SpecParseError("spec.points: must equal the step table length " +
                             std::to_string(n));
    }
    spec.f = parse_rational_table(require_field(j, "f", "spec"), step.size(), "spec.f");
    spec.g = parse_rational_table(require_field(j, "g", "spec"), step.size(), "spec.g");
    spec.h = parse_rational_table(require_field(j, "h", "spec"), step.size(), "spec.h");
    spec.w = parse_rational_table(require_field(j, "w", "spec"), step.size(), "spec.w");
    for (std::size_t i = 0; i < spec.g.size(); ++i)
      if (spec.g[i] <= 0)
        throw SpecParseError("spec.g[" + std::to_string(i) + "]: must be strictly positive");
    for (std::size_t i = 0; i < spec.w.size(); ++i)
      if (spec.w[i] <= 0)
        throw SpecParseError("spec.w[" + std::to_string(i) + "]: must be strictly positive");
    if (j.contains("measure")) {
      spec.measure = parse_rational_table(j.at("measure"), step.size(), "spec.measure");
      for (std::size_t i = 0; i < spec.measure->size(); ++i)
        if ((*spec.measure)[i] < 0)
          throw SpecParseError("spec.measure[" + std::to_string(i) + "]: must be nonnegative");
    }
  } else {
    if (j.contains("window")) {
      const Json& wnd = j.at("window");
      if (!wnd.is_number_integer() || wnd.get<long long>() < 1)
        throw SpecParseError("spec.window: expected a positive integer");
      spec.window = wnd.get<long long>();
    }
    spec.sf = parse_observable(require_field(j, "f", "spec"), "spec.f");
    spec.sg = parse_observable(require_field(j, "g", "spec"), "spec.g");
    spec.sh = parse_observable(require_field(j, "h", "spec"), "spec.h");
    spec.sw = parse_observable(require_field(j, "w", "spec"), "spec.w");
    if (j.contains("measure"))
      throw SpecParseError("spec.measure: only supported for finite systems");
    if (j.contains("markers")) {
      const Json& ms = j.at("markers");
      if (!ms.is_array()) throw SpecParseError("spec.markers: expected an array");
      for (std::size_t i = 0; i < ms.size(); ++i)
        spec.markers.push_back(parse_marker_pred(ms[i], "spec.markers[" + std::to_string(i) + "]"));
    }
    if (j.contains("probes")) {
      const Json& ps = j.at("probes");
      if (!ps.is_array()) throw SpecParseError("spec.probes: expected an array");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (!ps[i].is_number_integer() || ps[i].get<long long>() < 0)
          throw SpecParseError("spec.probes[" + std::to_string(i) +
                               "]: expected a nonnegative integer");
        spec.probes.push_back(ps[i].get<SuccessorPoint>());
      }
    }
  }

  if (j.contains("depth")) {
    const Json& d = j.at("depth");
    if (!d.is_number_integer() || d.get<long long>() < 1)
      throw SpecParseError("spec.depth: expected a positive integer");
    spec.depth = d.get<long long>();
  }
  if (j.contains("h_offset")) {
    if (!spec.finite())
      throw SpecParseError("spec.h_offset: only supported for finite systems");
    spec.h_offset = parse_rational_json(j.at("h_offset"), "spec.h_offset");
  }
  return spec;
}

inline Json parse_spec_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecParseError(std::string("spec: ") + e.what());
  }
}

inline Json load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("spec: cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

/// Finite system from a parsed spec. When an h-offset is declared, h is
/// replaced by limsup_exact - offset pointwise.
inline FiniteSystem finite_system_from(const SystemSpec& spec) {
  if (!spec.finite()) throw SpecParseError("spec: a finite system is required here");
  FiniteSystem sys(spec.step, spec.f, spec.g, spec.h, spec.w);
  if (!spec.h_offset) return sys;
  std::vector<Rational> h(spec.step.size());
  for (int x = 0; x < sys.size(); ++x) h[x] = limsup_exact(sys, x) - *spec.h_offset;
  return sys.with_h(std::move(h));
}

inline std::optional<RationalMeasure> measure_from(const SystemSpec& spec) {
  if (!spec.measure) return std::nullopt;
  return RationalMeasure(*spec.measure);
}

inline SuccessorSystem stream_system_from(const SystemSpec& spec,
                                          std::optional<long long> window_override = {}) {
  if (spec.finite()) throw SpecParseError("spec: a stream-successor system is required here");
  return make_successor_system(observable_fn(spec.sf), observable_fn(spec.sg),
                               observable_fn(spec.sh), observable_fn(spec.sw),
                               window_override.value_or(spec.window));
}

/// Declared marker family with exact certificates computed from the level
/// periods. An empty level gets no certificate.
inline MarkerFamily<SuccessorPoint> marker_family_from(const SystemSpec& spec) {
  MarkerFamily<SuccessorPoint> fam;
  for (const MarkerPredSpec& m : spec.markers) {
    MarkerLevel<SuccessorPoint> level;
    level.set = marker_pred_set(m);
    if (level.set.period) {
      auto radius = successor_exact_radius(level.set.pred, *level.set.period);
      level.completeness_radius = radius;
      level.boundedness_radius = radius;
    }
    fam.levels.push_back(std::move(level));
  }
  return fam;
}

inline std::vector<SuccessorPoint> probes_or_default(const SystemSpec& spec, long long count = 8) {
  if (!spec.probes.empty()) return spec.probes;
  std::vector<SuccessorPoint> out;
  for (long long p = 0; p < count; ++p) out.push_back(static_cast<SuccessorPoint>(p));
  return out;
}

// ---------------------------------------------------------------------------
// Report serialization. All core values are exact rational strings; floats
// only ever appear under keys named "simulation".

inline Json rational_json(const Rational& r) { return format_rational(r); }

inline Json rational_list_json(const std::vector<Rational>& rs) {
  Json out = Json::array();
  for (const Rational& r : rs) out.push_back(rational_json(r));
  return out;
}

inline Json set_json(const FiniteSet& s) { return s.indices(); }

inline Json orbit_shape_json(const OrbitShape& s) {
  return Json{{"tail", s.tail}, {"cycle", s.cycle}};
}

inline Json limit_point_set_json(const LimitPointSet& l) {
  return Json{{"values", rational_list_json(l.values)},
              {"converges", l.converges},
              {"rho", rational_json(l.rho)},
              {"prefix", l.prefix}};
}

inline Json set_properties_json(const SetProperties& p) {
  Json out{{"forward_invariant", p.forward_invariant},
           {"complete", p.complete},
           {"wandering", p.wandering},
           {"exact", p.exact}};
  out["boundedness_radius"] =
      p.boundedness_radius ? Json(*p.boundedness_radius) : Json(nullptr);
  return out;
}

inline const char* tag_name(TileTag t) { return t == TileTag::Ratio ? "ratio" : "singleton"; }

template <typename P>
Json tiling_json(const Tiling<P>& t) {
  Json tags = Json::array();
  for (TileTag tag : t.tags) tags.push_back(tag_name(tag));
  return Json{{"base", t.base}, {"cuts", t.cuts}, {"tags", tags}};
}

inline Json tiling_report_json(const TilingReport& r) {
  Json violations = Json::array();
  for (const TileViolation& v : r.violations)
    violations.push_back(Json{{"tile", v.tile_index}, {"kind", v.kind}, {"detail", v.detail}});
  return Json{{"ok", r.ok()}, {"violations", violations}};
}

inline Json marker_report_json(const MarkerReport& r) {
  Json violations = Json::array();
  for (const MarkerViolation& v : r.violations)
    violations.push_back(Json{{"probe_index", v.probe_index},
                              {"level", v.level},
                              {"kind", v.kind},
                              {"detail", v.detail}});
  return Json{{"ok", r.ok()},
              {"violations", violations},
              {"probes_checked", r.probes_checked},
              {"truncated", r.truncated}};
}

template <typename P>
Json marker_family_json(const MarkerFamily<P>& fam) {
  Json levels = Json::array();
  for (const MarkerLevel<P>& level : fam.levels) {
    Json entry{{"label", level.set.label}};
    entry["completeness_radius"] =
        level.completeness_radius ? Json(*level.completeness_radius) : Json(nullptr);
    entry["boundedness_radius"] =
        level.boundedness_radius ? Json(*level.boundedness_radius) : Json(nullptr);
    levels.push_back(std::move(entry));
  }
  return Json{{"levels", levels}};
}

inline std::string render_report(const Json& report) { return report.dump(2) + "\n"; }

inline void write_report(const Json& report, const std::optional<std::string>& out_path) {
  const std::string text = render_report(report);
  if (!out_path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*out_path);
  if (!out) throw std::runtime_error("cannot open output file \"" + *out_path + "\"");
  out << text;
}

}  // namespace ergotile
