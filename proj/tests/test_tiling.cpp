#include <catch2/catch_amalgamated.hpp>

#include "examples.hpp"

using namespace ergotile;

namespace {

TilerConfig<SuccessorSystem> ratio_cfg(const StreamSet<SuccessorPoint>& marker) {
  return TilerConfig<SuccessorSystem>{marker, 0, std::nullopt};
}

MetricMode<SuccessorSystem> ratio_metric(const SuccessorSystem& sys,
                                         std::vector<Rational> targets, Rational eps,
                                         std::size_t target_index) {
  MetricMode<SuccessorSystem> mode;
  mode.seq = [sys](const SuccessorPoint& x, long long n) { return ratio(sys, x, n); };
  for (const Rational& t : targets)
    mode.targets.push_back([t](const SuccessorPoint&) { return t; });
  mode.epsilon = [eps](const SuccessorPoint&) { return eps; };
  mode.target_index = target_index;
  return mode;
}

}  // namespace

TEST_CASE("exceptional set membership by hand") {
  const StreamSet<SuccessorPoint> B = residue_set(4, 3);

  SECTION("low threshold leaves nothing exceptional near the origin") {
    SuccessorSystem sys = ex::even_counter(make_rational(1, 4), 1 << 10);
    auto cfg = ratio_cfg(B);
    CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{0}));
    CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{1}));
    CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{2}));
  }

  SECTION("threshold above the odd-start ratios captures the odd points") {
    SuccessorSystem sys = ex::even_counter(make_rational(3, 4), 1 << 10);
    auto cfg = ratio_cfg(B);
    // From an odd point every ratio up to the return stays at or below 1/2.
    CHECK(is_exceptional(sys, cfg, SuccessorPoint{1}));
    CHECK(is_exceptional(sys, cfg, SuccessorPoint{3}));
    CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{0}));
    CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{2}));
  }
}

TEST_CASE("exceptional set on finite systems") {
  SECTION("positive ratios with h = 0 leave the set empty") {
    FiniteSystem sys = ex::e1();  // h is identically 0
    TilerConfig<FiniteSystem> cfg{FiniteSet(2, {0}), 0, std::nullopt};
    CHECK(exceptional_set(sys, cfg).empty());
  }
  SECTION("h above every ratio makes the whole space exceptional") {
    FiniteSystem sys = ex::e1().with_h({5, 5});
    TilerConfig<FiniteSystem> cfg{FiniteSet(2, {0}), 0, std::nullopt};
    CHECK(exceptional_set(sys, cfg) == FiniteSet::universe(2));
  }
}

TEST_CASE("greedy tiler hand traces on the even counter") {
  const MarkerFamily<SuccessorPoint> fam = dyadic_residue_family(4);

  SECTION("h = 1/4: two ratio tiles") {
    SuccessorSystem sys = ex::even_counter(make_rational(1, 4), 1 << 10);
    auto cfg = tiler_config(fam, 2);  // marker set {n = 3 mod 4}
    Tiling<SuccessorPoint> t = greedy_tile(sys, cfg, SuccessorPoint{0});
    CHECK(t.cuts == std::vector<long long>{0, 1, 3});
    CHECK(t.tags == std::vector<TileTag>{TileTag::Ratio, TileTag::Ratio});
    CHECK(validate_tiling(sys, cfg, t).ok());
  }

  SECTION("h = 3/4: the odd point becomes a singleton tile") {
    SuccessorSystem sys = ex::even_counter(make_rational(3, 4), 1 << 10);
    auto cfg = tiler_config(fam, 2);
    Tiling<SuccessorPoint> t = greedy_tile(sys, cfg, SuccessorPoint{0});
    CHECK(t.cuts == std::vector<long long>{0, 1, 2, 3});
    CHECK(t.tags ==
          std::vector<TileTag>{TileTag::Ratio, TileTag::Singleton, TileTag::Ratio});
    CHECK(validate_tiling(sys, cfg, t).ok());
  }

  SECTION("h above every ratio: the whole return word is singletons") {
    SuccessorSystem sys = ex::even_counter(Rational(2), 1 << 10);
    auto cfg = tiler_config(fam, 2);
    Tiling<SuccessorPoint> t = greedy_tile(sys, cfg, SuccessorPoint{2});
    CHECK(t.cuts == std::vector<long long>{0, 1});
    CHECK(t.tags == std::vector<TileTag>{TileTag::Singleton});
    CHECK(validate_tiling(sys, cfg, t).ok());

    Tiling<SuccessorPoint> full = greedy_tile(sys, cfg, SuccessorPoint{0});
    CHECK(full.cuts == std::vector<long long>{0, 1, 2, 3});
    CHECK(full.tags == std::vector<TileTag>(3, TileTag::Singleton));
    CHECK(validate_tiling(sys, cfg, full).ok());
  }
}

TEST_CASE("validator flags defective tilings") {
  const MarkerFamily<SuccessorPoint> fam = dyadic_residue_family(4);
  SuccessorSystem sys = ex::even_counter(make_rational(3, 4), 1 << 10);
  auto cfg = tiler_config(fam, 2);

  SECTION("a tile covering a below-threshold stretch satisfies neither branch") {
    Tiling<SuccessorPoint> t{0, {0, 2, 3}, {TileTag::Ratio, TileTag::Ratio}};
    TilingReport r = validate_tiling(sys, cfg, t);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations.front().kind == "neither");
    CHECK(r.violations.front().tile_index == 0);
  }

  SECTION("last cut must be the hitting time") {
    Tiling<SuccessorPoint> t{0, {0, 1, 2}, {TileTag::Ratio, TileTag::Singleton}};
    TilingReport r = validate_tiling(sys, cfg, t);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "hitting-time");
  }

  SECTION("cuts must start at zero and increase strictly") {
    Tiling<SuccessorPoint> t1{0, {1, 3}, {TileTag::Ratio}};
    CHECK(validate_tiling(sys, cfg, t1).violations.front().kind == "structure");
    Tiling<SuccessorPoint> t2{0, {0, 2, 2, 3}, {TileTag::Ratio, TileTag::Ratio, TileTag::Ratio}};
    CHECK(validate_tiling(sys, cfg, t2).violations.front().kind == "structure");
    Tiling<SuccessorPoint> t3{0, {0, 3}, {}};
    CHECK(validate_tiling(sys, cfg, t3).violations.front().kind == "structure");
  }

  SECTION("a branch satisfied under the wrong tag") {
    SuccessorSystem low = ex::even_counter(make_rational(1, 4), 1 << 10);
    Tiling<SuccessorPoint> t{0, {0, 1, 3}, {TileTag::Ratio, TileTag::Singleton}};
    TilingReport r = validate_tiling(low, cfg, t);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations.front().kind == "tag");
    CHECK(r.violations.front().tile_index == 1);
  }
}

TEST_CASE("metric mode with a single reachable target") {
  SuccessorSystem sys = ex::even_counter(Rational(0), 1 << 10);
  const MarkerFamily<SuccessorPoint> fam = dyadic_residue_family(4);
  TilerConfig<SuccessorSystem> cfg = tiler_config(fam, 2);
  cfg.metric = ratio_metric(sys, {make_rational(1, 2)}, make_rational(1, 8), 0);

  // From 2 the return word has length 1 and the ratio stays a half away from
  // the target, so 2 is exceptional; from 0 the ratio reaches 1/2 at n = 2.
  CHECK(is_exceptional(sys, cfg, SuccessorPoint{2}));
  CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{0}));

  Tiling<SuccessorPoint> t = greedy_tile(sys, cfg, SuccessorPoint{0});
  CHECK(t.cuts == std::vector<long long>{0, 2, 3});
  CHECK(t.tags == std::vector<TileTag>{TileTag::Ratio, TileTag::Singleton});
  CHECK(validate_tiling(sys, cfg, t).ok());
}

TEST_CASE("metric mode: the configured target drives the cuts") {
  SuccessorSystem sys = ex::even_counter(Rational(0), 1 << 10);
  const MarkerFamily<SuccessorPoint> fam = dyadic_residue_family(4);

  TilerConfig<SuccessorSystem> half = tiler_config(fam, 2);
  half.metric = ratio_metric(sys, {make_rational(1, 2)}, make_rational(1, 8), 0);
  Tiling<SuccessorPoint> ta = greedy_tile(sys, half, SuccessorPoint{0});
  CHECK(ta.cuts == std::vector<long long>{0, 2, 3});
  CHECK(ta.tags == std::vector<TileTag>{TileTag::Ratio, TileTag::Singleton});
  CHECK(validate_tiling(sys, half, ta).ok());

  TilerConfig<SuccessorSystem> one = tiler_config(fam, 2);
  one.metric = ratio_metric(sys, {Rational(1)}, make_rational(1, 8), 0);
  Tiling<SuccessorPoint> tb = greedy_tile(sys, one, SuccessorPoint{0});
  CHECK(tb.cuts == std::vector<long long>{0, 1, 2, 3});
  CHECK(tb.tags == std::vector<TileTag>{TileTag::Ratio, TileTag::Singleton, TileTag::Ratio});
  CHECK(validate_tiling(sys, one, tb).ok());
}

TEST_CASE("metric mode with two targets") {
  SuccessorSystem sys = ex::even_counter(Rational(0), 1 << 10);
  const MarkerFamily<SuccessorPoint> fam = dyadic_residue_family(4);

  SECTION("one target far along the whole word already marks a point exceptional") {
    TilerConfig<SuccessorSystem> cfg = tiler_config(fam, 2);
    cfg.metric = ratio_metric(sys, {make_rational(1, 2), Rational(0)}, make_rational(1, 8), 0);
    // From an even start the ratios stay at least 1/2, so the 0-target is a
    // far witness for the whole return word; odd starts approach both.
    CHECK(is_exceptional(sys, cfg, SuccessorPoint{0}));
    CHECK(is_exceptional(sys, cfg, SuccessorPoint{2}));
    CHECK_FALSE(is_exceptional(sys, cfg, SuccessorPoint{1}));
    Tiling<SuccessorPoint> t = greedy_tile(sys, cfg, SuccessorPoint{0});
    CHECK(t.cuts == std::vector<long long>{0, 1, 3});
    CHECK(t.tags == std::vector<TileTag>{TileTag::Singleton, TileTag::Ratio});
    CHECK(validate_tiling(sys, cfg, t).ok());
  }

  SECTION("a far witness distinct from the tiling target trips the exclusivity check") {
    TilerConfig<SuccessorSystem> cfg = tiler_config(fam, 2);
    cfg.metric = ratio_metric(sys, {make_rational(1, 2), Rational(1)}, make_rational(1, 8), 1);
    // 2 is exceptional (witness: target 1/2 stays far), yet its singleton
    // tile also lands within epsilon of the configured target 1. The
    // validator reports the overlap rather than hiding it.
    Tiling<SuccessorPoint> t = greedy_tile(sys, cfg, SuccessorPoint{2});
    TilingReport r = validate_tiling(sys, cfg, t);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations.front().kind == "both");
  }
}

TEST_CASE("finite pipeline on the hand systems") {
  SECTION("2-cycle with h = 0") {
    FinitePipelineResult res = theorem_a_pipeline(ex::e1(), 3);
    CHECK(res.ok);
    CHECK(res.marker_set == FiniteSet(2, {0}));
    CHECK(res.exceptional.empty());
    REQUIRE(res.tilings.size() == 1);
    CHECK(res.tilings[0].base == 0);
    CHECK(res.tilings[0].cuts == std::vector<long long>{0, 2});
    CHECK(res.tilings[0].tags == std::vector<TileTag>{TileTag::Ratio});
    REQUIRE(res.reports.size() == 1);
    CHECK(res.reports[0].ok());
  }

  SECTION("3-cycle with h = 1/4 below the limsup 1/3") {
    FiniteSystem sys = ex::e3().with_h({make_rational(1, 4), make_rational(1, 4),
                                        make_rational(1, 4)});
    FinitePipelineResult res = theorem_a_pipeline(sys, 2);
    CHECK(res.ok);
    CHECK(res.marker_set == FiniteSet(3, {1}));
    REQUIRE(res.tilings.size() == 1);
    CHECK(res.tilings[0].cuts == std::vector<long long>{0, 3});
  }

  SECTION("h at or above the limsup is rejected") {
    CHECK_THROWS_AS(theorem_a_pipeline(ex::e1().with_h({2, 2}), 2), HypothesisViolation);
    CHECK_THROWS_AS(theorem_a_pipeline(ex::e1().with_h({0, 7}), 2), HypothesisViolation);
    try {
      theorem_a_pipeline(ex::e1().with_h({0, 7}), 2);
    } catch (const HypothesisViolation& e) {
      CHECK(e.point() == 1);
    }
  }
}

TEST_CASE("finite pipeline on random systems below the limsup") {
  std::mt19937_64 rng(1371);
  for (int trial = 0; trial < 30; ++trial) {
    FiniteSystem sys = rand_finite_system(rng);
    sys = sys.with_h(limsup_offset_h(sys, 1));
    FinitePipelineResult res = theorem_a_pipeline(sys, 3);
    REQUIRE(res.ok);
    REQUIRE(res.tilings.size() == static_cast<std::size_t>(res.marker_set.count()));
    for (const TilingReport& r : res.reports) REQUIRE(r.ok());
    // Every base returns to the marker set with a single ratio tile.
    for (const Tiling<int>& t : res.tilings) {
      REQUIRE(t.tags.size() == 1);
      CHECK(t.cuts.back() == hitting_time(sys, res.marker_set, t.base));
    }
  }
}

TEST_CASE("stream pipeline tiles every probe at every level") {
  SuccessorSystem sys = ex::even_counter(make_rational(1, 4), 1 << 10);
  MarkerFamily<SuccessorPoint> fam = dyadic_residue_family(4);
  std::vector<SuccessorPoint> probes;
  for (SuccessorPoint p = 0; p < 21; ++p) probes.push_back(p);
  StreamPipelineResult<SuccessorPoint> res = theorem_a_pipeline(sys, fam, probes);
  CHECK(res.ok);
  REQUIRE(res.exceptional.size() == 4);
  REQUIRE(res.tilings.size() == 4);
  for (const auto& level : res.reports)
    for (const TilingReport& r : level) REQUIRE(r.ok());

  // Exceptional sets shrink with the level and empty out on these probes.
  for (std::size_t i = 0; i + 1 < res.exceptional.size(); ++i)
    for (SuccessorPoint p : probes)
      if (res.exceptional[i + 1].contains(p)) CHECK(res.exceptional[i].contains(p));
  for (SuccessorPoint p : probes) {
    bool leaves = false;
    for (const auto& A : res.exceptional)
      if (!A.contains(p)) leaves = true;
    CHECK(leaves);
  }
}
