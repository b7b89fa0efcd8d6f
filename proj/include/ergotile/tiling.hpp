#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergotile/cocycle.hpp"
#include "ergotile/markers.hpp"
#include "ergotile/periodic.hpp"
#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"

namespace ergotile {

/// The comparison hypothesis h(x) < limsup R_n(x) fails at some point.
class HypothesisViolation : public std::runtime_error {
 public:
  HypothesisViolation(std::string msg, int point) : std::runtime_error(std::move(msg)), point_(point) {}
  int point() const { return point_; }

 private:
  int point_;
};

enum class TileTag { Ratio, Singleton };

/// Orbit segment between a base point and its first return to the marker
/// set, cut into tiles: cuts[0] = 0 < ... < cuts.back() = hitting time, one
/// tag per tile.
template <typename P>
struct Tiling {
  P base;
  std::vector<long long> cuts;
  std::vector<TileTag> tags;
  long long tile_count() const { return static_cast<long long>(tags.size()); }
};

/// Targets for the metric tiling mode: tile when seq(x, n) comes epsilon-close
/// to the configured target. The exceptional set keeps the spec of the
/// general construction (some target stays far for the whole return word).
template <typename S>
struct MetricMode {
  std::function<Rational(const typename S::Point&, long long)> seq;  // f_n(x), n >= 1
  std::vector<std::function<Rational(const typename S::Point&)>> targets;
  std::function<Rational(const typename S::Point&)> epsilon;
  std::size_t target_index = 0;
};

/// Marker set for one level plus the tiling mode. metric empty means Ratio
/// mode: tile when R_n exceeds h, both taken from the system.
template <typename S>
struct TilerConfig {
  typename S::Set marker_set;
  long long level = 0;
  std::optional<MetricMode<S>> metric;
};

template <typename P>
TilerConfig<StreamSystem<P>> tiler_config(const MarkerFamily<P>& markers, long long level) {
  if (level < 0 || level >= markers.size())
    throw std::invalid_argument("tiler_config: level out of range");
  return TilerConfig<StreamSystem<P>>{markers.levels[level].set, level, std::nullopt};
}

/// Membership in the exceptional set A_i. Ratio mode:
///   A_i = {x : R_n(x) <= h(x) for all 1 <= n <= hit(x)},
/// where hit is the hitting time of the marker set. Metric mode:
///   A_i = {x : some target h_j has |seq(x,n) - h_j(x)| >= epsilon(x) for
///          all n in the same range}.
/// The quantifier range starts at n = 1 (R_0 is undefined) and includes the
/// hitting time; this makes membership imply R_1(x) <= h(x), so a singleton
/// tile can never also satisfy the ratio condition, and it guarantees that
/// greedy cuts land on the hitting time exactly.
template <typename S>
bool is_exceptional(const S& sys, const TilerConfig<S>& cfg, const typename S::Point& x) {
  const long long hit = hitting_time(sys, cfg.marker_set, x);
  if (!cfg.metric) {
    for (long long n = 1; n <= hit; ++n)
      if (ratio(sys, x, n) > sys.h(x)) return false;
    return true;
  }
  const MetricMode<S>& mode = *cfg.metric;
  const Rational eps = mode.epsilon(x);
  for (const auto& target : mode.targets) {
    const Rational goal = target(x);
    bool all_far = true;
    for (long long n = 1; n <= hit && all_far; ++n)
      if (abs(mode.seq(x, n) - goal) < eps) all_far = false;
    if (all_far) return true;
  }
  return false;
}

inline FiniteSet exceptional_set(const FiniteSystem& sys, const TilerConfig<FiniteSystem>& cfg) {
  FiniteSet out(sys.size());
  for (int x = 0; x < sys.size(); ++x)
    if (is_exceptional(sys, cfg, x)) out.insert(x);
  return out;
}

template <typename P>
StreamSet<P> exceptional_set(const StreamSystem<P>& sys, const TilerConfig<StreamSystem<P>>& cfg) {
  StreamSet<P> out;
  out.pred = [sys, cfg](const P& x) { return is_exceptional(sys, cfg, x); };
  out.label = "exceptional set, level " + std::to_string(cfg.level);
  return out;
}

/// Greedy tiler. From cut s with x_s = T^s x: if x_s is exceptional the next
/// tile is the singleton (s, s+1); otherwise the tile runs to the least
/// n > s whose length satisfies the mode condition at x_s. Since x_s is then
/// not exceptional, a witness exists by the hitting time of x_s, so every cut
/// lands at most on hit(x) and the last one exactly on it.
template <typename S>
Tiling<typename S::Point> greedy_tile(const S& sys, const TilerConfig<S>& cfg,
                                      typename S::Point x) {
  const long long hit = hitting_time(sys, cfg.marker_set, x);
  Tiling<typename S::Point> tiling{x, {0}, {}};
  long long s = 0;
  typename S::Point xs = x;
  while (s < hit) {
    if (is_exceptional(sys, cfg, xs)) {
      s += 1;
      xs = sys.next(xs);
      tiling.cuts.push_back(s);
      tiling.tags.push_back(TileTag::Singleton);
      continue;
    }
    long long len = 1;
    for (;; ++len) {
      if (s + len > hit)
        throw std::logic_error("greedy_tile: cut overshot the hitting time");
      if (!cfg.metric) {
        if (ratio(sys, xs, len) > sys.h(xs)) break;
      } else {
        const MetricMode<S>& mode = *cfg.metric;
        if (abs(mode.seq(xs, len) - mode.targets.at(mode.target_index)(xs)) < mode.epsilon(xs))
          break;
      }
    }
    for (long long j = 0; j < len; ++j) xs = sys.next(xs);
    s += len;
    tiling.cuts.push_back(s);
    tiling.tags.push_back(TileTag::Ratio);
  }
  return tiling;
}

struct TileViolation {
  long long tile_index = -1;  // -1 for structural violations
  std::string kind;           // "structure" | "hitting-time" | "neither" | "both" | "tag"
  std::string detail;
};

struct TilingReport {
  std::vector<TileViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Exact validation: cut structure (0 start, strictly increasing, ends at
/// the hitting time), and per tile exactly one of
///   (a) the mode condition over the tile length at the tile start,
///   (b) tile start exceptional and tile length 1,
/// with the tag naming the branch that holds.
template <typename S>
TilingReport validate_tiling(const S& sys, const TilerConfig<S>& cfg,
                             const Tiling<typename S::Point>& t) {
  TilingReport report;
  if (t.cuts.empty() || t.cuts.front() != 0) {
    report.violations.push_back({-1, "structure", "cut sequence must start at 0"});
    return report;
  }
  for (std::size_t k = 0; k + 1 < t.cuts.size(); ++k)
    if (t.cuts[k] >= t.cuts[k + 1]) {
      report.violations.push_back({-1, "structure", "cuts must be strictly increasing"});
      return report;
    }
  if (t.tags.size() + 1 != t.cuts.size()) {
    report.violations.push_back({-1, "structure", "one tag per tile required"});
    return report;
  }
  const long long hit = hitting_time(sys, cfg.marker_set, t.base);
  if (t.cuts.back() != hit)
    report.violations.push_back(
        {-1, "hitting-time",
         "last cut is " + std::to_string(t.cuts.back()) + ", hitting time is " +
             std::to_string(hit)});

  typename S::Point xs = t.base;
  long long pos = 0;
  for (long long k = 0; k < t.tile_count(); ++k) {
    for (; pos < t.cuts[k]; ++pos) xs = sys.next(xs);
    const long long len = t.cuts[k + 1] - t.cuts[k];
    bool cond_a;
    if (!cfg.metric) {
      cond_a = ratio(sys, xs, len) > sys.h(xs);
    } else {
      const MetricMode<S>& mode = *cfg.metric;
      cond_a = abs(mode.seq(xs, len) - mode.targets.at(mode.target_index)(xs)) < mode.epsilon(xs);
    }
    const bool cond_b = len == 1 && is_exceptional(sys, cfg, xs);
    if (cond_a && cond_b)
      report.violations.push_back({k, "both", "tile satisfies both the mode condition and the exceptional-singleton condition"});
    if (!cond_a && !cond_b)
      report.violations.push_back({k, "neither", "tile satisfies neither the mode condition nor the exceptional-singleton condition"});
    if (cond_a && !cond_b && t.tags[k] != TileTag::Ratio)
      report.violations.push_back({k, "tag", "tile holds by the mode condition but is not tagged Ratio"});
    if (cond_b && !cond_a && t.tags[k] != TileTag::Singleton)
      report.violations.push_back({k, "tag", "tile holds by the exceptional-singleton condition but is not tagged Singleton"});
  }
  return report;
}

/// Full pipeline on a finite system. Finite systems have no aperiodic part,
/// so the decomposition collapses to the eventually periodic branch: the
/// marker set is the lex-min return set B at every level, the exceptional
/// set is empty, and each inter-return segment is one Ratio tile, valid
/// because the first return of x in B has length n(x) and
/// R_{n(x)}(x) = limsup(x) > h(x).
struct FinitePipelineResult {
  PeriodicAnalysis analysis;
  FiniteSet marker_set;       // B_i for every level i < depth
  FiniteSet exceptional;      // A_i = empty for every level
  std::vector<Tiling<int>> tilings;  // one per base point of B, constant in the level
  std::vector<TilingReport> reports;
  long long depth = 0;
  bool ok = true;
};

inline FinitePipelineResult theorem_a_pipeline(const FiniteSystem& sys, long long depth) {
  if (depth < 1) throw std::invalid_argument("theorem_a_pipeline: depth must be >= 1");
  for (int x = 0; x < sys.size(); ++x)
    if (!(sys.h(x) < limsup_exact(sys, x)))
      throw HypothesisViolation(
          "theorem_a_pipeline: h(x) < limsup R_n(x) fails at point " + std::to_string(x), x);

  FinitePipelineResult out;
  out.depth = depth;
  out.analysis = eventually_periodic_part(sys);
  out.marker_set = out.analysis.B;
  out.exceptional = FiniteSet(sys.size());
  TilerConfig<FiniteSystem> cfg{out.marker_set, 0, std::nullopt};
  for (int x : out.marker_set.indices()) {
    Tiling<int> t{x, {0, hitting_time(sys, out.marker_set, x)}, {TileTag::Ratio}};
    TilingReport r = validate_tiling(sys, cfg, t);
    out.ok = out.ok && r.ok();
    out.tilings.push_back(std::move(t));
    out.reports.push_back(std::move(r));
  }
  return out;
}

/// Aperiodic branch on a stream system: markers feed the greedy tiler and
/// every probe point is tiled and validated at every level.
template <typename P>
struct StreamPipelineResult {
  std::vector<StreamSet<P>> exceptional;          // per level
  std::vector<std::vector<Tiling<P>>> tilings;    // per level, per probe
  std::vector<std::vector<TilingReport>> reports;
  bool ok = true;
};

template <typename P>
StreamPipelineResult<P> theorem_a_pipeline(const StreamSystem<P>& sys,
                                           const MarkerFamily<P>& markers,
                                           const std::vector<P>& probes) {
  StreamPipelineResult<P> out;
  for (long long i = 0; i < markers.size(); ++i) {
    TilerConfig<StreamSystem<P>> cfg = tiler_config(markers, i);
    out.exceptional.push_back(exceptional_set(sys, cfg));
    std::vector<Tiling<P>> level_tilings;
    std::vector<TilingReport> level_reports;
    for (const P& x : probes) {
      Tiling<P> t = greedy_tile(sys, cfg, x);
      TilingReport r = validate_tiling(sys, cfg, t);
      out.ok = out.ok && r.ok();
      level_tilings.push_back(std::move(t));
      level_reports.push_back(std::move(r));
    }
    out.tilings.push_back(std::move(level_tilings));
    out.reports.push_back(std::move(level_reports));
  }
  return out;
}

}  // namespace ergotile
