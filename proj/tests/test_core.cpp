#include <catch2/catch_amalgamated.hpp>

#include "examples.hpp"

using namespace ergotile;

TEST_CASE("orbit_shape on the hand systems") {
  CHECK(orbit_shape(ex::e1(), 0) == OrbitShape{0, 2});
  CHECK(orbit_shape(ex::e2(), 0) == OrbitShape{0, 1});
  CHECK(orbit_shape(ex::e5(), 0) == OrbitShape{1, 2});
  CHECK(orbit_shape(ex::e5(), 1) == OrbitShape{0, 2});
}

TEST_CASE("orbit_shape minimality on random systems") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    FiniteSystem sys = rand_finite_system(rng);
    for (int x = 0; x < sys.size(); ++x) {
      const OrbitShape shape = orbit_shape(sys, x);
      const auto orbit = forward_orbit(sys, x, shape.span() + shape.cycle);
      REQUIRE(orbit[shape.tail] == orbit[shape.tail + shape.cycle]);
      for (long long c = 1; c < shape.cycle; ++c)
        CHECK(orbit[shape.tail] != orbit[shape.tail + c]);
      if (shape.tail > 0)
        CHECK(orbit[shape.tail - 1] != orbit[shape.tail - 1 + shape.cycle]);
      // the first tail + cycle points are pairwise distinct
      for (long long a = 0; a < shape.span(); ++a)
        for (long long b = a + 1; b < shape.span(); ++b) CHECK(orbit[a] != orbit[b]);
    }
  }
}

TEST_CASE("forward_orbit sequences") {
  CHECK(forward_orbit(ex::e1(), 0, 4) == std::vector<int>{0, 1, 0, 1});
  CHECK(forward_orbit(ex::e5(), 0, 5) == std::vector<int>{0, 1, 2, 1, 2});
  CHECK(forward_orbit(ex::e2(), 0, 0).empty());

  auto sys = ex::even_counter(0, 64);
  CHECK(forward_orbit(sys, 5, 3) == std::vector<SuccessorPoint>{5, 6, 7});
  CHECK_THROWS_AS(forward_orbit(sys, 0, 65), WindowExceeded);
}

TEST_CASE("hitting_time minimizes over positive steps") {
  FiniteSystem e1 = ex::e1();
  CHECK(hitting_time(e1, FiniteSet(2, {0}), 0) == 2);  // membership does not shortcut
  CHECK(hitting_time(e1, FiniteSet(2, {0}), 1) == 1);
  CHECK_THROWS_AS(hitting_time(ex::e2(), FiniteSet(1), 0), NotComplete);
  try {
    hitting_time(ex::e2(), FiniteSet(1), 0);
  } catch (const NotComplete& e) {
    CHECK_FALSE(e.exhausted_window());  // finite-system verdicts are exact
  }

  auto sys = ex::even_counter(0, 64);
  StreamSet<SuccessorPoint> three_mod_four = residue_set(4, 3);
  CHECK(hitting_time(sys, three_mod_four, SuccessorPoint{0}) == 3);
  CHECK(hitting_time(sys, three_mod_four, SuccessorPoint{3}) == 4);
  StreamSet<SuccessorPoint> nothing;
  nothing.pred = [](const SuccessorPoint&) { return false; };
  try {
    hitting_time(sys, nothing, SuccessorPoint{0});
    FAIL("expected NotComplete");
  } catch (const NotComplete& e) {
    CHECK(e.exhausted_window());
  }
}

TEST_CASE("hitting_time recursion on random systems") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    FiniteSystem sys = rand_finite_system(rng);
    FiniteSet Y = rand_bounded_set(rng, sys);
    for (int x = 0; x < sys.size(); ++x) {
      const long long hx = hitting_time(sys, Y, x);
      if (Y.contains(sys.next(x)))
        CHECK(hx == 1);
      else
        CHECK(hx == 1 + hitting_time(sys, Y, sys.next(x)));
    }
  }
}

TEST_CASE("set_properties on the hand systems") {
  FiniteSystem e1 = ex::e1();
  SetProperties p = set_properties(e1, FiniteSet(2, {0}));
  CHECK_FALSE(p.forward_invariant);
  CHECK(p.complete);
  REQUIRE(p.boundedness_radius);
  CHECK(*p.boundedness_radius == 1);
  // the forward orbit of each point is the set {0,1}, met in the single
  // point 0, so the singleton is wandering
  CHECK(p.wandering);
  CHECK(p.exact);

  p = set_properties(e1, FiniteSet::universe(2));
  CHECK(p.forward_invariant);
  CHECK(p.complete);
  REQUIRE(p.boundedness_radius);
  CHECK(*p.boundedness_radius == 0);
  CHECK_FALSE(p.wandering);

  p = set_properties(ex::e2(), FiniteSet(1));
  CHECK(p.forward_invariant);
  CHECK_FALSE(p.complete);
  CHECK_FALSE(p.boundedness_radius.has_value());
  CHECK(p.wandering);
}

TEST_CASE("singletons are always wandering") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    FiniteSystem sys = rand_finite_system(rng);
    for (int x = 0; x < sys.size(); ++x) {
      FiniteSet single(sys.size());
      single.insert(x);
      CHECK(set_properties(sys, single).wandering);
    }
  }
}

TEST_CASE("boundedness radius implies completeness and is attained") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    FiniteSystem sys = rand_finite_system(rng);
    FiniteSet Y = rand_bounded_set(rng, sys);
    const SetProperties p = set_properties(sys, Y);
    REQUIRE(p.complete);
    REQUIRE(p.boundedness_radius);
    // every point enters within the radius, some point needs all of it
    bool attained = false;
    for (int x = 0; x < sys.size(); ++x) {
      long long first = -1;
      int q = x;
      for (long long m = 0; m <= *p.boundedness_radius && first < 0; ++m) {
        if (Y.contains(q)) first = m;
        q = sys.next(q);
      }
      REQUIRE(first >= 0);
      attained = attained || first == *p.boundedness_radius;
    }
    CHECK(attained);
  }
}

TEST_CASE("stream set_properties is windowed and labeled approximate") {
  auto sys = ex::even_counter(0, 32);
  SetProperties p = set_properties(sys, residue_set(4, 3));
  CHECK_FALSE(p.exact);
  CHECK(p.complete);
  REQUIRE(p.boundedness_radius);
  CHECK(*p.boundedness_radius == 3);
  CHECK_FALSE(p.wandering);  // two hits within the window
  CHECK_FALSE(p.forward_invariant);
}
