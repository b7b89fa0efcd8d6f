#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergotile/cocycle.hpp"
#include "ergotile/periodic.hpp"
#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"

namespace ergotile {

/// A hypothesis of an integral identity fails; the point where it fails is
/// attached when there is one.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(std::string msg, std::optional<int> point = std::nullopt)
      : std::runtime_error(std::move(msg)), point_(point) {}
  std::optional<int> point() const { return point_; }

 private:
  std::optional<int> point_;
};

/// Finite measure as exact nonnegative point masses.
struct RationalMeasure {
  std::vector<Rational> mass;

  RationalMeasure() = default;
  explicit RationalMeasure(std::vector<Rational> m) : mass(std::move(m)) {
    for (const Rational& v : mass)
      if (v < 0) throw std::invalid_argument("measure: masses must be nonnegative");
  }

  int size() const { return static_cast<int>(mass.size()); }
  const Rational& at(int x) const { return mass.at(x); }
  Rational total() const {
    Rational t = 0;
    for (const Rational& v : mass) t += v;
    return t;
  }
  bool is_zero() const { return total() == 0; }
};

inline void require_matching(const FiniteSystem& sys, const RationalMeasure& mu) {
  if (mu.size() != sys.size())
    throw std::invalid_argument("measure: mass table size does not match the system");
}

/// Integral of an arbitrary rational observable.
template <typename Phi>
Rational integral(const FiniteSystem& sys, const RationalMeasure& mu, Phi&& phi) {
  require_matching(sys, mu);
  Rational out = 0;
  for (int x = 0; x < sys.size(); ++x) out += phi(x) * mu.at(x);
  return out;
}

/// T-w-invariance, checked on singletons (equivalent to the set form by
/// additivity): mu({y}) = sum over preimages x of y of w(x) mu({x}).
inline bool check_invariance(const FiniteSystem& sys, const RationalMeasure& mu) {
  require_matching(sys, mu);
  std::vector<Rational> pushed(sys.size(), 0);
  for (int x = 0; x < sys.size(); ++x) pushed[sys.next(x)] += sys.w(x) * mu.at(x);
  for (int y = 0; y < sys.size(); ++y)
    if (pushed[y] != mu.at(y)) return false;
  return true;
}

/// The unique weight making a strictly positive measure invariant under a
/// permutation: w(x) = mu(Tx)/mu(x). Its cocycle telescopes to 1 around
/// every cycle.
inline std::vector<Rational> invariant_weight(const FiniteSystem& sys, const RationalMeasure& mu) {
  require_matching(sys, mu);
  if (!sys.is_bijection())
    throw PreconditionError("invariant_weight: transformation is not injective");
  std::vector<Rational> w(sys.size());
  for (int x = 0; x < sys.size(); ++x) {
    if (mu.at(x) == 0) throw PreconditionError("invariant_weight: zero mass at point " +
                                               std::to_string(x), x);
    w[x] = mu.at(sys.next(x)) / mu.at(x);
  }
  return w;
}

/// Change of variables: integral of f equals the integral of
/// f(T^k x) cocycle(x, k). Holds for every invariant measure; exposed as a
/// self-test.
inline bool change_of_variables_check(const FiniteSystem& sys, const RationalMeasure& mu,
                                      long long k) {
  if (k < 1) throw std::invalid_argument("change_of_variables_check: k must be >= 1");
  if (!check_invariance(sys, mu))
    throw PreconditionError("change_of_variables_check: measure is not T-w-invariant");
  const Rational lhs = integral(sys, mu, [&](int x) { return sys.f(x); });
  const Rational rhs = integral(sys, mu, [&](int x) {
    int p = x;
    for (long long j = 0; j < k; ++j) p = sys.next(p);
    return sys.f(p) * cocycle(sys, x, k);
  });
  return lhs == rhs;
}

struct IntegralComparison {
  Rational lhs;
  Rational rhs;
  bool equal = false;
};

/// Local-global bridge: the integral of f over the whole space equals the
/// integral over a T-bounded B of the weighted sum of f along the return
/// word, S_{hit(x)} f(x).
inline IntegralComparison local_global_check(const FiniteSystem& sys, const RationalMeasure& mu,
                                             const FiniteSet& B) {
  require_matching(sys, mu);
  const SetProperties props = set_properties(sys, B);
  if (!props.boundedness_radius)
    throw PreconditionError("local_global_check: B is not T-bounded");
  if (!check_invariance(sys, mu))
    throw PreconditionError("local_global_check: measure is not T-w-invariant");
  IntegralComparison out;
  out.lhs = integral(sys, mu, [&](int x) { return sys.f(x); });
  out.rhs = 0;
  for (int x : B.indices())
    out.rhs += weighted_sum(sys, Obs::F, x, hitting_time(sys, B, x)) * mu.at(x);
  out.equal = out.lhs == out.rhs;
  return out;
}

struct InequalityReport {
  Rational int_f;
  Rational int_gh;
  bool holds = false;
};

/// Main integral inequality: integral of f at least the integral of g h,
/// for T-invariant h lying below the pointwise limsup. The executable
/// hypothesis is mu-conullity of the eventually periodic part C, which is
/// what the argument actually consumes; the literal conservativity verdict
/// is reported separately by conservativity_report.
inline InequalityReport technical_inequality_check(const FiniteSystem& sys,
                                                   const RationalMeasure& mu) {
  require_matching(sys, mu);
  for (int x = 0; x < sys.size(); ++x)
    if (sys.h(x) != sys.h(sys.next(x)))
      throw PreconditionError("technical_inequality_check: h is not T-invariant at point " +
                              std::to_string(x), x);
  for (int x = 0; x < sys.size(); ++x)
    if (!(sys.h(x) <= limsup_exact(sys, x)))
      throw PreconditionError("technical_inequality_check: h exceeds the limsup at point " +
                              std::to_string(x), x);
  const PeriodicAnalysis analysis = eventually_periodic_part(sys);
  for (int x = 0; x < sys.size(); ++x)
    if (!analysis.C.contains(x) && mu.at(x) != 0)
      throw PreconditionError("technical_inequality_check: eventually periodic part is not "
                              "mu-conull (mass outside C at point " + std::to_string(x) + ")", x);
  InequalityReport out;
  out.int_f = integral(sys, mu, [&](int x) { return sys.f(x); });
  out.int_gh = integral(sys, mu, [&](int x) { return sys.g(x) * sys.h(x); });
  out.holds = out.int_f >= out.int_gh;
  return out;
}

/// Ratio ergodic theorem, exact form: integral of f equals the integral of
/// g times the pointwise limit of R_n, provided the limits exist on the
/// support of mu.
inline IntegralComparison dowker_check(const FiniteSystem& sys, const RationalMeasure& mu) {
  require_matching(sys, mu);
  if (!sys.is_bijection())
    throw PreconditionError("dowker_check: transformation is not a bijection");
  if (!check_invariance(sys, mu))
    throw PreconditionError("dowker_check: measure is not T-w-invariant");
  IntegralComparison out;
  out.lhs = integral(sys, mu, [&](int x) { return sys.f(x); });
  out.rhs = 0;
  for (int x = 0; x < sys.size(); ++x) {
    if (mu.at(x) == 0) continue;
    const LimitPointSet limits = limit_point_set(sys, x);
    if (!limits.converges)
      throw PreconditionError("dowker_check: ratios do not converge at supported point " +
                              std::to_string(x), x);
    out.rhs += sys.g(x) * limits.values.front() * mu.at(x);
  }
  out.equal = out.lhs == out.rhs;
  return out;
}

struct ConservativityReport {
  bool conservative = false;
  std::optional<FiniteSet> witness;  // a wandering set of positive mass
};

/// Wandering means meeting each forward orbit set in at most one point, so
/// every singleton is wandering and a measure on a finite system is
/// conservative only when it is zero. The verdict is the literal one; the
/// integral identities above use mu-conullity of C instead.
inline ConservativityReport conservativity_report(const FiniteSystem& sys,
                                                  const RationalMeasure& mu) {
  require_matching(sys, mu);
  ConservativityReport out;
  for (int x = 0; x < sys.size(); ++x)
    if (mu.at(x) > 0) {
      FiniteSet w(sys.size());
      w.insert(x);
      out.witness = std::move(w);
      out.conservative = false;
      return out;
    }
  out.conservative = true;
  return out;
}

}  // namespace ergotile
