#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ergotile/cocycle.hpp"
#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"

namespace ergotile {

/// Orbit-periodicity data of F = f x g x w. h is deliberately not part of F:
/// it is the comparison hypothesis, not orbit data.
struct PeriodicAnalysis {
  FiniteSet C;  // eventually periodic part: union of the period-n parts
  FiniteSet A;  // points of C where R_{n(x)}(x) attains the limsup
  FiniteSet B;  // lex-min selection inside A; first return time is n(x)
  std::vector<long long> min_period;  // n(x) for x in C, 0 outside
};

struct LimitPointSet {
  std::vector<Rational> values;  // sorted, deduplicated limit points of R_n(x)
  bool converges = false;        // true iff a single limit point
  Rational rho;                  // cycle cocycle at the first periodic point
  long long prefix = 0;          // least m with T^m x in C
};

inline bool F_equal(const FiniteSystem& sys, int p, int q) {
  return sys.f(p) == sys.f(q) && sys.g(p) == sys.g(q) && sys.w(p) == sys.w(q);
}

/// Total order on F-values, componentwise f then g then w.
inline int F_compare(const FiniteSystem& sys, int p, int q) {
  if (sys.f(p) != sys.f(q)) return sys.f(p) < sys.f(q) ? -1 : 1;
  if (sys.g(p) != sys.g(q)) return sys.g(p) < sys.g(q) ? -1 : 1;
  if (sys.w(p) != sys.w(q)) return sys.w(p) < sys.w(q) ? -1 : 1;
  return 0;
}

/// x is in the period-n part iff F(y) = F(T^n y) for every y in the forward
/// orbit of x. Checking the first tau + c orbit points covers the whole
/// orbit, since those are exactly its distinct points.
inline bool in_period_part(const FiniteSystem& sys, int x, long long n) {
  const long long bound = orbit_shape(sys, x).span();
  int p = x;
  int q = x;
  for (long long j = 0; j < n; ++j) q = sys.next(q);
  for (long long k = 0; k < bound; ++k) {
    if (!F_equal(sys, p, q)) return false;
    p = sys.next(p);
    q = sys.next(q);
  }
  return true;
}

inline FiniteSet period_part(const FiniteSystem& sys, long long n) {
  if (n < 1) throw std::invalid_argument("period_part: n must be >= 1");
  FiniteSet out(sys.size());
  for (int x = 0; x < sys.size(); ++x)
    if (in_period_part(sys, x, n)) out.insert(x);
  return out;
}

/// Least F-period of x, or 0 if none. Searching n <= tau + c suffices: if
/// any n works then c_x works (an n-periodic itinerary that repeats with
/// period c_x beyond the tail is c_x-periodic everywhere: shift an index past
/// the tail by a multiple of n, apply the cycle, shift back).
inline long long min_period_of(const FiniteSystem& sys, int x) {
  const long long bound = orbit_shape(sys, x).span();
  for (long long n = 1; n <= bound; ++n)
    if (in_period_part(sys, x, n)) return n;
  return 0;
}

/// Exact limit points of the ratio sequence (R_k(x))_{k>=1}. Let m be least
/// with y = T^m x eventually periodic, n the minimal period of y, and
/// rho = cocycle(y, n). The block expansion
///   S_{nq+r} phi(y) = (sum_{p<q} rho^p) S_n phi(y) + rho^q S_r phi(y)
/// gives three regimes:
///   rho < 1: everything converges; the prefix is folded in exactly.
///   rho = 1: the q-linear terms dominate, every subsequence tends to R_n(y).
///   rho > 1: dividing by rho^q leaves one limit per residue r, which
///            simplifies to R_n(T^r y); the prefix washes out.
inline LimitPointSet limit_point_set(const FiniteSystem& sys, int x) {
  long long m = 0;
  int y = x;
  while (min_period_of(sys, y) == 0) {
    y = sys.next(y);
    ++m;
  }
  const long long n = min_period_of(sys, y);

  LimitPointSet out;
  out.prefix = m;
  out.rho = cocycle(sys, y, n);

  if (out.rho < 1) {
    const Rational scale = cocycle(sys, x, m) / (1 - out.rho);
    const Rational num =
        weighted_sum(sys, Obs::F, x, m) + scale * weighted_sum(sys, Obs::F, y, n);
    const Rational den =
        weighted_sum(sys, Obs::G, x, m) + scale * weighted_sum(sys, Obs::G, y, n);
    out.values = {num / den};
  } else if (out.rho == 1) {
    out.values = {ratio(sys, y, n)};
  } else {
    int p = y;
    for (long long r = 0; r < n; ++r) {
      out.values.push_back(ratio(sys, p, n));
      p = sys.next(p);
    }
    std::sort(out.values.begin(), out.values.end());
    out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  }
  out.converges = out.values.size() == 1;
  return out;
}

inline Rational limsup_exact(const FiniteSystem& sys, int x) {
  return limit_point_set(sys, x).values.back();
}

/// Lex comparison of the F-itineraries of x and y on a prefix long enough to
/// decide equality: both itineraries have tails <= max(tau_x, tau_y) and then
/// repeat with periods dividing lcm(c_x, c_y), so agreement on
/// max + lcm + 1 entries forces agreement everywhere.
inline int itinerary_compare(const FiniteSystem& sys, int x, int y) {
  const OrbitShape sx = orbit_shape(sys, x);
  const OrbitShape sy = orbit_shape(sys, y);
  const long long prefix = std::max(sx.tail, sy.tail) + std::lcm(sx.cycle, sy.cycle) + 1;
  int p = x;
  int q = y;
  for (long long k = 0; k < prefix; ++k) {
    const int c = F_compare(sys, p, q);
    if (c != 0) return c;
    p = sys.next(p);
    q = sys.next(q);
  }
  return 0;
}

inline PeriodicAnalysis eventually_periodic_part(const FiniteSystem& sys) {
  const int N = sys.size();
  PeriodicAnalysis out{FiniteSet(N), FiniteSet(N), FiniteSet(N),
                       std::vector<long long>(N, 0)};
  for (int x = 0; x < N; ++x) {
    const long long n = min_period_of(sys, x);
    if (n > 0) {
      out.C.insert(x);
      out.min_period[x] = n;
    }
  }
  for (int x : out.C.indices())
    if (ratio(sys, x, out.min_period[x]) == limsup_exact(sys, x)) out.A.insert(x);
  for (int x : out.A.indices()) {
    bool minimal = true;
    for (int y : forward_orbit(sys, x, orbit_shape(sys, x).span())) {
      if (!out.A.contains(y)) continue;
      if (itinerary_compare(sys, x, y) > 0) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.B.insert(x);
  }
  return out;
}

}  // namespace ergotile
