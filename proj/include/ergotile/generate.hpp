#pragma once

#include <random>
#include <vector>

#include "ergotile/measure.hpp"
#include "ergotile/periodic.hpp"
#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"

namespace ergotile {

/// Modulo draws keep generated instances identical across platforms
/// (mt19937_64 output is specified bit-exactly; distributions are not).
inline long long rand_below(std::mt19937_64& rng, long long n) {
  return static_cast<long long>(rng() % static_cast<unsigned long long>(n));
}

inline Rational rand_rational(std::mt19937_64& rng, long long num_lo, long long num_hi,
                              long long max_den) {
  const long long num = num_lo + rand_below(rng, num_hi - num_lo + 1);
  const long long den = 1 + rand_below(rng, max_den);
  return make_rational(num, den);
}

/// The cycles of the functional graph, one representative list per cycle.
inline std::vector<std::vector<int>> all_cycles(const FiniteSystem& sys) {
  std::vector<std::vector<int>> cycles;
  std::vector<bool> on_cycle(sys.size(), false);
  for (int x = 0; x < sys.size(); ++x) {
    const OrbitShape shape = orbit_shape(sys, x);
    int entry = x;
    for (long long j = 0; j < shape.tail; ++j) entry = sys.next(entry);
    if (on_cycle[entry]) continue;
    std::vector<int> cycle;
    int p = entry;
    do {
      on_cycle[p] = true;
      cycle.push_back(p);
      p = sys.next(p);
    } while (p != entry);
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

/// Random finite system with small rational observables. When margin_patch
/// is set, one weight on each cycle is adjusted so that the cycle cocycle
/// lands outside (2/3, 3/2): a floating-point simulation of length N then
/// resolves the limit points to within about exp(-N log(3/2) / c), which is
/// far below any testing tolerance, whereas an unpatched cocycle near 1
/// produces drifts of order c/N that no reasonable tolerance absorbs.
inline FiniteSystem rand_finite_system(std::mt19937_64& rng, int max_points = 12,
                                       bool margin_patch = true) {
  const int N = 1 + static_cast<int>(rand_below(rng, max_points));
  std::vector<int> step(N);
  for (int& t : step) t = static_cast<int>(rand_below(rng, N));
  std::vector<Rational> f(N), g(N), h(N), w(N);
  for (int x = 0; x < N; ++x) {
    f[x] = rand_rational(rng, -9, 9, 9);
    g[x] = rand_rational(rng, 1, 9, 9);
    h[x] = rand_rational(rng, -9, 9, 9);
    w[x] = rand_rational(rng, 1, 9, 9);
  }
  FiniteSystem sys(step, f, g, h, w);
  if (!margin_patch) return sys;
  for (const std::vector<int>& cycle : all_cycles(sys)) {
    Rational rho = 1;
    for (int p : cycle) rho *= w[p];
    if (rho > Rational(2, 3) && rho < Rational(3, 2))
      w[cycle.front()] *= Rational(3, 2) / rho;
  }
  return sys.with_w(w);
}

struct PermutationInstance {
  FiniteSystem sys;
  RationalMeasure mu;
};

/// Random permutation system carrying the weight that makes a random
/// strictly positive measure invariant. Cycle cocycles are then exactly 1,
/// so every ratio sequence converges and all the integral identities are
/// exactly checkable.
inline PermutationInstance rand_permutation_instance(std::mt19937_64& rng, int max_points = 10) {
  const int N = 1 + static_cast<int>(rand_below(rng, max_points));
  std::vector<int> step(N);
  for (int x = 0; x < N; ++x) step[x] = x;
  for (int x = N - 1; x > 0; --x) std::swap(step[x], step[rand_below(rng, x + 1)]);
  std::vector<Rational> f(N), g(N), h(N), w(N, 1);
  std::vector<Rational> mass(N);
  for (int x = 0; x < N; ++x) {
    f[x] = rand_rational(rng, -9, 9, 9);
    g[x] = rand_rational(rng, 1, 9, 9);
    h[x] = 0;
    mass[x] = rand_rational(rng, 1, 9, 9);
  }
  FiniteSystem plain(step, f, g, h, w);
  RationalMeasure mu(mass);
  FiniteSystem sys = plain.with_w(invariant_weight(plain, mu));
  return {std::move(sys), std::move(mu)};
}

/// Random T-bounded set: one mandatory point per cycle plus a sprinkling of
/// extras. Meeting every cycle makes the set complete, hence bounded, on a
/// finite system.
inline FiniteSet rand_bounded_set(std::mt19937_64& rng, const FiniteSystem& sys) {
  FiniteSet out(sys.size());
  for (const std::vector<int>& cycle : all_cycles(sys))
    out.insert(cycle[rand_below(rng, static_cast<long long>(cycle.size()))]);
  for (int x = 0; x < sys.size(); ++x)
    if (rand_below(rng, 3) == 0) out.insert(x);
  return out;
}

/// h-table lying exactly delta below the pointwise limsup.
inline std::vector<Rational> limsup_offset_h(const FiniteSystem& sys, const Rational& delta) {
  std::vector<Rational> h(sys.size());
  for (int x = 0; x < sys.size(); ++x) h[x] = limsup_exact(sys, x) - delta;
  return h;
}

}  // namespace ergotile
