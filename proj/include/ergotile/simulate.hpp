#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "ergotile/rational.hpp"
#include "ergotile/system.hpp"

namespace ergotile {

/// Floating-point R_1 .. R_N at x, computed incrementally. The running sums
/// and cocycle are rescaled by a common factor whenever they threaten to
/// overflow; the ratios are unaffected, and so is the relative size of all
/// later terms.
inline std::vector<double> simulate_ratios(const FiniteSystem& sys, int x, long long N) {
  std::vector<double> fd(sys.size()), gd(sys.size()), wd(sys.size());
  for (int p = 0; p < sys.size(); ++p) {
    fd[p] = to_double(sys.f(p));
    gd[p] = to_double(sys.g(p));
    wd[p] = to_double(sys.w(p));
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(N));
  double sf = 0;
  double sg = 0;
  double cw = 1;
  int p = x;
  for (long long n = 1; n <= N; ++n) {
    sf += fd[p] * cw;
    sg += gd[p] * cw;
    out.push_back(sf / sg);
    cw *= wd[p];
    p = sys.next(p);
    const double mag = std::max({std::abs(sf), std::abs(sg), cw});
    if (mag > 1e100) {
      sf /= mag;
      sg /= mag;
      cw /= mag;
    }
  }
  return out;
}

struct CrosscheckResult {
  bool subsequence_ok = true;  // every declared limit is visited persistently
  bool clusters_ok = true;     // every persistent simulated value is declared
  std::vector<std::string> failures;
  bool ok() const { return subsequence_ok && clusters_ok; }
};

/// Two-sided comparison of declared limit points against a floating-point
/// simulation of length N.
///
/// Declared side: each declared value must be within tol of the simulation
/// at many indices, including some in the final block.
///
/// Simulated side: a candidate cluster is a final-block value that recurs
/// (within tol) in every block of the second half of the run; sequences that
/// merely drift toward a limit change between blocks and are not flagged.
/// Every candidate must lie within tol of a declared value.
inline CrosscheckResult crosscheck_limits(const FiniteSystem& sys, int x,
                                          const std::vector<Rational>& declared, long long N,
                                          double tol) {
  const std::vector<double> R = simulate_ratios(sys, x, N);
  CrosscheckResult result;
  const long long J = 10;
  const long long block = std::max<long long>(1, N / J);
  const long long last_start = N - block;
  const long long need = std::min<long long>(50, std::max<long long>(1, N / 200));

  for (const Rational& v : declared) {
    const double vd = to_double(v);
    long long count = 0;
    bool in_last = false;
    for (long long n = 0; n < N; ++n)
      if (std::abs(R[n] - vd) <= tol) {
        ++count;
        in_last = in_last || n >= last_start;
      }
    if (count < need || !in_last) {
      result.subsequence_ok = false;
      result.failures.push_back("declared limit " + format_rational(v) + " hit " +
                                std::to_string(count) + " times (needed " + std::to_string(need) +
                                ", including the final block)");
    }
  }

  for (long long n = last_start; n < N; ++n) {
    const double u = R[n];
    bool recurrent = true;
    for (long long j = J / 2; j < J && recurrent; ++j) {
      const long long lo = j * block;
      const long long hi = j + 1 == J ? N : (j + 1) * block;
      bool found = false;
      for (long long m = lo; m < hi && !found; ++m) found = std::abs(R[m] - u) <= tol;
      recurrent = found;
    }
    if (!recurrent) continue;
    bool matched = false;
    for (const Rational& v : declared)
      if (std::abs(u - to_double(v)) <= tol) {
        matched = true;
        break;
      }
    if (!matched) {
      result.clusters_ok = false;
      result.failures.push_back("recurrent simulated value " + std::to_string(u) +
                                " matches no declared limit");
      break;
    }
  }
  return result;
}

}  // namespace ergotile
