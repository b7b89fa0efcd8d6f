#pragma once

#include <stdexcept>
#include <vector>

#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"

namespace ergotile {

enum class Obs { F, G, H, W };

template <typename S>
Rational observe(const S& sys, const typename S::Point& x, Obs which) {
  switch (which) {
    case Obs::F: return sys.f(x);
    case Obs::G: return sys.g(x);
    case Obs::H: return sys.h(x);
    case Obs::W: return sys.w(x);
  }
  throw std::logic_error("observe: bad observable tag");
}

/// w^T(x, k) = prod_{j<k} w(T^j x). Empty product for k = 0.
template <typename S>
Rational cocycle(const S& sys, typename S::Point x, long long k) {
  if (k < 0) throw std::invalid_argument("cocycle: negative exponent");
  sys.require_depth(k);
  Rational acc = 1;
  typename S::Point p = x;
  for (long long j = 0; j < k; ++j) {
    acc *= sys.w(p);
    p = sys.next(p);
  }
  return acc;
}

/// S_n phi(x) = sum_{k<n} phi(T^k x) w^T(x, k), with the cocycle built
/// incrementally alongside the walk.
template <typename S, typename Phi>
Rational weighted_sum_fn(const S& sys, Phi&& phi, typename S::Point x, long long n) {
  if (n < 0) throw std::invalid_argument("weighted_sum: negative length");
  sys.require_depth(n);
  Rational acc = 0;
  Rational cw = 1;
  typename S::Point p = x;
  for (long long k = 0; k < n; ++k) {
    acc += phi(p) * cw;
    cw *= sys.w(p);
    p = sys.next(p);
  }
  return acc;
}

template <typename S>
Rational weighted_sum(const S& sys, Obs which, typename S::Point x, long long n) {
  return weighted_sum_fn(sys, [&](const typename S::Point& p) { return observe(sys, p, which); },
                         x, n);
}

/// R_n(x) = S_n f(x) / S_n g(x). Defined for n >= 1 (g > 0 keeps the
/// denominator nonzero); R_0 would be 0/0 and is rejected.
template <typename S>
Rational ratio(const S& sys, typename S::Point x, long long n) {
  if (n < 1) throw std::invalid_argument("ratio: length must be >= 1");
  return weighted_sum(sys, Obs::F, x, n) / weighted_sum(sys, Obs::G, x, n);
}

/// One-step successor identity S_{n+1} f(x) = f(x) + w(x) S_n f(Tx),
/// checked exactly. Must always hold; exposed as a self-test.
template <typename S>
bool successor_identity_check(const S& sys, typename S::Point x, long long n) {
  if (n < 0) throw std::invalid_argument("successor_identity_check: negative length");
  sys.require_depth(n + 1);
  return weighted_sum(sys, Obs::F, x, n + 1) ==
         sys.f(x) + sys.w(x) * weighted_sum(sys, Obs::F, sys.next(x), n);
}

struct IdentityCheck {
  bool holds = true;
  long long checked = 0;
};

/// Exhaustive self-test of the cocycle identity
///   w^T(x, m+n) = w^T(x, m) w^T(T^m x, n)
/// and the sum-splitting identity
///   S_{m+n} phi(x) = S_m phi(x) + w^T(x, m) S_n phi(T^m x)
/// over all splits m + n <= depth and every observable.
template <typename S>
IdentityCheck identity_sweep(const S& sys, typename S::Point x, long long depth) {
  sys.require_depth(depth);
  constexpr Obs kObs[] = {Obs::F, Obs::G, Obs::H, Obs::W};
  // Length-indexed tables at x; each entry is one public call, so the split
  // checks below compare genuine outputs rather than recomputing per split.
  std::vector<Rational> from_x[4];
  std::vector<Rational> w_x;
  for (long long k = 0; k <= depth; ++k) {
    w_x.push_back(cocycle(sys, x, k));
    for (int o = 0; o < 4; ++o) from_x[o].push_back(weighted_sum(sys, kObs[o], x, k));
  }
  IdentityCheck out;
  typename S::Point xm = x;
  for (long long m = 0; m <= depth; ++m) {
    const Rational& wm = w_x[m];
    for (long long n = 0; m + n <= depth; ++n) {
      if (w_x[m + n] != wm * cocycle(sys, xm, n)) out.holds = false;
      for (int o = 0; o < 4; ++o)
        if (from_x[o][m + n] != from_x[o][m] + wm * weighted_sum(sys, kObs[o], xm, n))
          out.holds = false;
      ++out.checked;
    }
    if (m < depth) xm = sys.next(xm);
  }
  return out;
}

}  // namespace ergotile
