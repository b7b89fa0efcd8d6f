#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergotile/ergotile.hpp"

namespace {

using namespace ergotile;

struct RunOptions {
  std::optional<long long> depth;
  std::optional<long long> window;
  unsigned long long seed = 0;
};

Json error_json(const std::string& type, const std::string& message,
                std::optional<long long> point = std::nullopt) {
  Json e{{"type", type}, {"message", message}};
  if (point) e["point"] = *point;
  return e;
}

// ---------------------------------------------------------------- analyze --

Json analyze_finite(const FiniteSystem& sys) {
  const PeriodicAnalysis analysis = eventually_periodic_part(sys);
  Json points = Json::array();
  for (int x = 0; x < sys.size(); ++x) {
    const LimitPointSet limits = limit_point_set(sys, x);
    Json entry{{"point", x},
               {"orbit", orbit_shape_json(orbit_shape(sys, x))},
               {"in_C", analysis.C.contains(x)},
               {"in_A", analysis.A.contains(x)},
               {"in_B", analysis.B.contains(x)},
               {"limits", limit_point_set_json(limits)},
               {"limsup", rational_json(limits.values.back())}};
    entry["min_period"] = analysis.C.contains(x) ? Json(analysis.min_period[x]) : Json(nullptr);
    points.push_back(std::move(entry));
  }
  return Json{{"C", set_json(analysis.C)},
              {"A", set_json(analysis.A)},
              {"B", set_json(analysis.B)},
              {"points", points},
              {"clean", true}};
}

// ------------------------------------------------------------------- tile --

Json tile_finite(const FiniteSystem& sys, long long depth) {
  FinitePipelineResult res = theorem_a_pipeline(sys, depth);
  Json tilings = Json::array();
  for (std::size_t i = 0; i < res.tilings.size(); ++i)
    tilings.push_back(Json{{"tiling", tiling_json(res.tilings[i])},
                           {"validation", tiling_report_json(res.reports[i])}});
  return Json{{"marker_set", set_json(res.marker_set)},
              {"exceptional", set_json(res.exceptional)},
              {"depth", res.depth},
              {"tilings", tilings},
              {"clean", res.ok}};
}

Json tile_stream(const SuccessorSystem& sys, const MarkerFamily<SuccessorPoint>& fam,
                 const std::vector<SuccessorPoint>& probes) {
  StreamPipelineResult<SuccessorPoint> res = theorem_a_pipeline(sys, fam, probes);
  Json levels = Json::array();
  for (std::size_t i = 0; i < res.tilings.size(); ++i) {
    Json tilings = Json::array();
    for (std::size_t k = 0; k < res.tilings[i].size(); ++k)
      tilings.push_back(Json{{"tiling", tiling_json(res.tilings[i][k])},
                             {"validation", tiling_report_json(res.reports[i][k])}});
    Json exceptional = Json::array();
    for (const SuccessorPoint& p : probes)
      if (res.exceptional[i].contains(p)) exceptional.push_back(p);
    levels.push_back(Json{{"level", i}, {"exceptional_probes", exceptional}, {"tilings", tilings}});
  }
  return Json{{"marker_family", marker_family_json(fam)},
              {"levels", levels},
              {"clean", res.ok}};
}

// ---------------------------------------------------------------- markers --

Json markers_finite(const FiniteSystem& sys) {
  const PeriodicAnalysis analysis = eventually_periodic_part(sys);
  const SetProperties props = set_properties(sys, analysis.B);
  return Json{{"marker_set", set_json(analysis.B)},
              {"properties", set_properties_json(props)},
              {"clean", props.complete}};
}

Json markers_stream(const SuccessorSystem& sys, const SystemSpec& spec, long long depth,
                    const std::vector<SuccessorPoint>& probes) {
  Json out;
  bool clean = true;
  if (!spec.markers.empty()) {
    MarkerFamily<SuccessorPoint> fam = marker_family_from(spec);
    MarkerReport report = verify_markers(sys, fam, probes, fam.size());
    out["declared"] = Json{{"family", marker_family_json(fam)},
                           {"verification", marker_report_json(report)}};
    clean = report.ok();
  } else {
    MarkerFamily<SuccessorPoint> built =
        build_complete_markers(sys, bit_separating_family(static_cast<int>(depth) - 1), depth);
    MarkerReport built_report = verify_markers(sys, built, probes, depth);
    out["built"] = Json{{"family", marker_family_json(built)},
                        {"verification", marker_report_json(built_report)}};

    MarkerFamily<SuccessorPoint> bounded =
        complete_to_bounded(sys, dyadic_residue_family(static_cast<int>(depth)), depth);
    MarkerReport bounded_report = verify_markers(sys, bounded, probes, depth);
    bool radius_bound_ok = true;
    for (long long i = 0; i < bounded.size(); ++i)
      if (!bounded.levels[i].boundedness_radius ||
          *bounded.levels[i].boundedness_radius > i * i)
        radius_bound_ok = false;
    out["bounded"] = Json{{"family", marker_family_json(bounded)},
                          {"verification", marker_report_json(bounded_report)},
                          {"radius_bound_ok", radius_bound_ok}};
    clean = built_report.ok() && bounded_report.ok() && radius_bound_ok;
  }
  out["clean"] = clean;
  return out;
}

// ----------------------------------------------------------------- verify --

Json verify_finite(const FiniteSystem& sys, const RationalMeasure& mu, long long k_max) {
  Json checks = Json::array();
  bool clean = true;

  const bool invariant = check_invariance(sys, mu);
  checks.push_back(Json{{"check", "invariance"}, {"holds", invariant}});
  clean = clean && invariant;

  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const PreconditionError& e) {
      checks.push_back(Json{{"check", name}, {"error", e.what()}});
      clean = false;
    }
  };

  guarded("change-of-variables", [&] {
    bool all = true;
    for (long long k = 1; k <= k_max; ++k) all = all && change_of_variables_check(sys, mu, k);
    checks.push_back(Json{{"check", "change-of-variables"}, {"k_max", k_max}, {"holds", all}});
    clean = clean && all;
  });

  guarded("local-global", [&] {
    const PeriodicAnalysis analysis = eventually_periodic_part(sys);
    const IntegralComparison c = local_global_check(sys, mu, analysis.B);
    checks.push_back(Json{{"check", "local-global"},
                          {"base", set_json(analysis.B)},
                          {"lhs", rational_json(c.lhs)},
                          {"rhs", rational_json(c.rhs)},
                          {"equal", c.equal}});
    clean = clean && c.equal;
  });

  guarded("technical-inequality", [&] {
    const InequalityReport r = technical_inequality_check(sys, mu);
    checks.push_back(Json{{"check", "technical-inequality"},
                          {"int_f", rational_json(r.int_f)},
                          {"int_gh", rational_json(r.int_gh)},
                          {"holds", r.holds}});
    clean = clean && r.holds;
  });

  if (!sys.is_bijection()) {
    checks.push_back(
        Json{{"check", "dowker"}, {"skipped", "transformation is not a bijection"}});
  } else {
    guarded("dowker", [&] {
      const IntegralComparison c = dowker_check(sys, mu);
      checks.push_back(Json{{"check", "dowker"},
                            {"lhs", rational_json(c.lhs)},
                            {"rhs", rational_json(c.rhs)},
                            {"equal", c.equal}});
      clean = clean && c.equal;
    });
  }

  const ConservativityReport cons = conservativity_report(sys, mu);
  Json entry{{"check", "conservativity"}, {"conservative", cons.conservative}};
  entry["witness"] = cons.witness ? set_json(*cons.witness) : Json(nullptr);
  checks.push_back(std::move(entry));

  return Json{{"checks", checks}, {"clean", clean}};
}

// ----------------------------------------------------------------- oracle --

Json oracle_finite(const FiniteSystem& sys, long long N) {
  const double tol = 1e-9;
  Json points = Json::array();
  Json finals = Json::array();
  bool clean = true;
  for (int x = 0; x < sys.size(); ++x) {
    const LimitPointSet limits = limit_point_set(sys, x);
    const CrosscheckResult cross = crosscheck_limits(sys, x, limits.values, N, tol);
    clean = clean && cross.ok();
    points.push_back(Json{{"point", x},
                          {"declared", rational_list_json(limits.values)},
                          {"subsequence_ok", cross.subsequence_ok},
                          {"clusters_ok", cross.clusters_ok},
                          {"failures", cross.failures}});
    finals.push_back(simulate_ratios(sys, x, N).back());
  }
  return Json{{"points", points},
              {"simulation", Json{{"N", N}, {"tolerance", tol}, {"final_ratios", finals}}},
              {"clean", clean}};
}

Json oracle_stream(const SuccessorSystem& sys, const std::vector<SuccessorPoint>& probes,
                   long long N) {
  Json entries = Json::array();
  for (const SuccessorPoint& p : probes) {
    Json samples = Json::array();
    for (long long n = 1; n <= N; n *= 2) {
      const Rational r = ratio(sys, p, n);
      samples.push_back(Json{{"n", n},
                             {"ratio", rational_json(r)},
                             {"simulation", to_double(r)}});
    }
    entries.push_back(Json{{"probe", p}, {"samples", samples}});
  }
  return Json{{"probes", entries}, {"clean", true}};
}

// -------------------------------------------------------------- dispatch --

Json run_subcommand(const std::string& name, const SystemSpec& spec, const RunOptions& opt) {
  const long long depth = opt.depth.value_or(spec.depth);
  if (name == "analyze") return analyze_finite(finite_system_from(spec));
  if (name == "tile") {
    if (spec.finite()) return tile_finite(finite_system_from(spec), depth);
    SuccessorSystem sys = stream_system_from(spec, opt.window);
    MarkerFamily<SuccessorPoint> fam =
        spec.markers.empty()
            ? complete_to_bounded(sys, dyadic_residue_family(static_cast<int>(depth)), depth)
            : marker_family_from(spec);
    return tile_stream(sys, fam, probes_or_default(spec));
  }
  if (name == "markers") {
    if (spec.finite()) return markers_finite(finite_system_from(spec));
    SuccessorSystem sys = stream_system_from(spec, opt.window);
    return markers_stream(sys, spec, depth, probes_or_default(spec));
  }
  if (name == "verify") {
    const FiniteSystem sys = finite_system_from(spec);
    std::optional<RationalMeasure> mu = measure_from(spec);
    if (!mu) throw SpecParseError("spec.measure: required by the verify subcommand");
    return verify_finite(sys, *mu, std::min<long long>(depth, 10));
  }
  if (name == "oracle") {
    if (spec.finite())
      return oracle_finite(finite_system_from(spec), opt.window.value_or(10000));
    SuccessorSystem sys = stream_system_from(spec, opt.window);
    return oracle_stream(sys, probes_or_default(spec), std::min<long long>(sys.window(), 10000));
  }
  throw std::logic_error("unknown subcommand " + name);
}

Json guarded_run(const std::string& name, const SystemSpec& spec, const RunOptions& opt);

/// Exceptions become structured error entries; every error makes the report
/// not clean, which drives the nonzero exit status.
template <typename Body>
Json guard_errors(Body&& body) {
  try {
    return body();
  } catch (const SpecParseError& e) {
    return Json{{"clean", false}, {"errors", Json::array({error_json("spec", e.what())})}};
  } catch (const HypothesisViolation& e) {
    return Json{{"clean", false},
                {"errors", Json::array({error_json("hypothesis-violation", e.what(), e.point())})}};
  } catch (const PreconditionError& e) {
    return Json{{"clean", false},
                {"errors", Json::array({error_json("precondition", e.what(),
                                                   e.point() ? std::optional<long long>(*e.point())
                                                             : std::nullopt)})}};
  } catch (const OracleError& e) {
    return Json{{"clean", false}, {"errors", Json::array({error_json("oracle", e.what())})}};
  } catch (const OrbitClosure& e) {
    return Json{{"clean", false}, {"errors", Json::array({error_json("orbit-closure", e.what())})}};
  } catch (const NotComplete& e) {
    return Json{{"clean", false}, {"errors", Json::array({error_json("not-complete", e.what())})}};
  } catch (const WindowExceeded& e) {
    return Json{{"clean", false},
                {"errors", Json::array({error_json("window-exceeded", e.what())})}};
  } catch (const std::exception& e) {
    return Json{{"clean", false}, {"errors", Json::array({error_json("error", e.what())})}};
  }
}

Json guarded_run(const std::string& name, const SystemSpec& spec, const RunOptions& opt) {
  return guard_errors([&] { return run_subcommand(name, spec, opt); });
}

Json run_spec_json(const std::string& name, const Json& spec_json, const RunOptions& opt) {
  return guard_errors([&] {
    SystemSpec spec = parse_system_spec(spec_json);
    return guarded_run(name, spec, opt);
  });
}

Json run_batch(const std::string& name, const std::string& dir, const RunOptions& opt) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Json results = Json::array();
  bool clean = true;
  for (const fs::path& file : files) {
    Json one = guard_errors(
        [&] { return run_spec_json(name, load_spec_file(file.string()), opt); });
    clean = clean && one.at("clean").get<bool>();
    results.push_back(Json{{"file", file.filename().string()}, {"result", std::move(one)}});
  }
  if (files.empty()) clean = false;
  return Json{{"results", results}, {"count", files.size()}, {"clean", clean}};
}

Json run_generated(const std::string& name, long long count, const RunOptions& opt) {
  if (name == "markers")
    return Json{{"clean", false},
                {"errors", Json::array({error_json(
                               "usage", "markers has no generated mode; give a spec file")})}};
  std::mt19937_64 rng(opt.seed);
  Json results = Json::array();
  bool clean = true;
  for (long long i = 0; i < count; ++i) {
    Json one = guard_errors([&]() -> Json {
      if (name == "verify") {
        PermutationInstance inst = rand_permutation_instance(rng);
        FiniteSystem sys = inst.sys.with_h(limsup_offset_h(inst.sys, 1));
        return verify_finite(sys, inst.mu, 10);
      }
      FiniteSystem sys = rand_finite_system(rng);
      if (name == "analyze") return analyze_finite(sys);
      if (name == "tile")
        return tile_finite(sys.with_h(limsup_offset_h(sys, 1)), opt.depth.value_or(3));
      return oracle_finite(sys, opt.window.value_or(10000));
    });
    clean = clean && one.at("clean").get<bool>();
    results.push_back(Json{{"index", i}, {"result", std::move(one)}});
  }
  return Json{{"results", results}, {"count", count}, {"seed", opt.seed}, {"clean", clean}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact ratio-ergodic analysis: orbits, markers, tilings, integral identities"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::string batch_dir;
  long long depth = -1;
  long long window = -1;
  long long generated = 0;
  unsigned long long seed = 0;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"analyze", "orbit shapes, eventually periodic part, exact limit points"},
      {"tile", "run the tiling pipeline and validate every tiling"},
      {"markers", "build and verify marker families"},
      {"verify", "exact integral identities for a measured system"},
      {"oracle", "floating-point cross-check of the declared limits"},
  };
  for (const auto& [sub_name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(sub_name, desc);
    sub->add_option("spec", spec_path, "system spec file (JSON)");
    sub->add_option("--out", out_path, "write the report to this file instead of stdout");
    sub->add_option("--depth", depth, "override the spec's depth");
    sub->add_option("--window", window,
                    "override the stream window; for oracle, the simulation length");
    sub->add_option("--seed", seed, "seed for --generated runs");
    sub->add_option("--batch", batch_dir, "run on every .json file in this directory");
    sub->add_option("--generated", generated, "run on this many generated random systems");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  RunOptions opt;
  if (depth >= 0) opt.depth = depth;
  if (window >= 0) opt.window = window;
  opt.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  Json body;
  std::string source;
  if (generated > 0) {
    source = "generated";
    body = run_generated(name, generated, opt);
  } else if (!batch_dir.empty()) {
    source = batch_dir;
    body = guard_errors([&] { return run_batch(name, batch_dir, opt); });
  } else if (spec_path.empty()) {
    source = "";
    body = Json{{"clean", false},
                {"errors", Json::array({error_json(
                               "usage", "a spec file, --batch, or --generated is required")})}};
  } else {
    source = spec_path;
    body = guard_errors([&] { return run_spec_json(name, load_spec_file(spec_path), opt); });
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;

  Json report{{"subcommand", name}, {"source", source}};
  for (auto& [key, value] : body.items()) report[key] = value;
  report["timing_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();

  try {
    write_report(report, out_path.empty() ? std::nullopt : std::optional<std::string>(out_path));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return report.at("clean").get<bool>() ? 0 : 1;
}
