#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "ergotile/system.hpp"

namespace ergotile {

/// Frequency-oracle failure: the oracle is missing, rejects a pattern it must
/// accept, or cannot decide within its enumeration cap.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A seed orbit revisits a point, so aperiodicity (or a completeness
/// certificate that needs an open ray) is refuted.
class OrbitClosure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Indexed family A_0, A_1, ... together with an oracle deciding, for a sign
/// pattern s (s[j] = 0: constrained to A_j, s[j] = 1: to its complement),
/// whether the cell A_s meets the forward orbit of x in infinitely many
/// points. ray_uniform marks oracles whose answer does not depend on x; the
/// built-in residue and bit oracles are of this kind.
template <typename P>
struct SeparatingFamily {
  std::vector<StreamSet<P>> sets;
  std::function<bool(const std::vector<int>&, const P&)> infinite_in_orbit;
  bool ray_uniform = false;
};

template <typename P>
struct MarkerLevel {
  StreamSet<P> set;
  std::optional<long long> completeness_radius;  // every point enters within this many steps
  std::optional<long long> boundedness_radius;   // uniform radius, when certified
};

/// Decreasing sequence of marker sets with per-level certificates.
template <typename P>
struct MarkerFamily {
  std::vector<MarkerLevel<P>> levels;
  /// For families built from a separating family: the bounded conjunction
  /// that was subtracted from every level. Within a stretch the constrained
  /// sets separate, it meets a forward orbit at most once.
  std::optional<StreamSet<P>> core;
  long long size() const { return static_cast<long long>(levels.size()); }
};

struct MarkerViolation {
  long long probe_index = 0;
  long long level = 0;
  std::string kind;  // "decreasing" | "vanishing" | "radius"
  std::string detail;
};

struct MarkerReport {
  std::vector<MarkerViolation> violations;
  long long probes_checked = 0;
  bool truncated = false;  // some certified radius exceeded the system window
  bool ok() const { return violations.empty(); }
};

inline std::optional<unsigned long long> checked_lcm(unsigned long long a, unsigned long long b,
                                                     unsigned long long cap) {
  const unsigned long long g = std::gcd(a, b);
  const unsigned long long q = a / g;
  if (b != 0 && q > cap / b) return std::nullopt;
  const unsigned long long l = q * b;
  if (l > cap) return std::nullopt;
  return l;
}

/// Residue-class enumeration cap for oracle and radius computations.
inline constexpr unsigned long long kResidueScanCap = 1ull << 23;

/// Brent-style cycle scan truncated at cap steps.
template <typename P>
bool orbit_closes(const StreamSystem<P>& sys, const P& seed, long long cap) {
  long long power = 1;
  long long lam = 1;
  long long steps = 1;
  P tortoise = seed;
  P hare = sys.next(seed);
  while (!sys.same(tortoise, hare)) {
    if (steps >= cap) return false;
    if (power == lam) {
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
    hare = sys.next(hare);
    ++lam;
    ++steps;
  }
  return true;
}

struct ResidueSpec {
  unsigned long long modulus = 1;
  unsigned long long residue = 0;
};

inline StreamSet<SuccessorPoint> residue_set(unsigned long long modulus,
                                             unsigned long long residue, std::string label = {}) {
  if (modulus == 0) throw std::invalid_argument("residue_set: zero modulus");
  StreamSet<SuccessorPoint> s;
  s.pred = [modulus, residue](const SuccessorPoint& n) { return n % modulus == residue % modulus; };
  s.period = modulus;
  s.universal = modulus == 1;
  s.label = label.empty() ? ("n=" + std::to_string(residue % modulus) + " mod " +
                             std::to_string(modulus))
                          : std::move(label);
  return s;
}

/// Separating family of residue classes on the successor system; the oracle
/// decides pattern infinitude by enumerating residues modulo the lcm of the
/// constrained moduli (a residue cell is infinite in every forward ray iff it
/// is nonempty).
inline SeparatingFamily<SuccessorPoint> residue_separating_family(std::vector<ResidueSpec> specs) {
  SeparatingFamily<SuccessorPoint> fam;
  for (const ResidueSpec& spec : specs) fam.sets.push_back(residue_set(spec.modulus, spec.residue));
  fam.ray_uniform = true;
  fam.infinite_in_orbit = [specs](const std::vector<int>& pattern, const SuccessorPoint&) {
    if (pattern.size() > specs.size())
      throw OracleError("residue oracle: pattern longer than the family");
    unsigned long long L = 1;
    for (std::size_t j = 0; j < pattern.size(); ++j) {
      auto l = checked_lcm(L, specs[j].modulus, kResidueScanCap);
      if (!l) throw OracleError("residue oracle: lcm of moduli exceeds the enumeration cap");
      L = *l;
    }
    for (unsigned long long n = 0; n < L; ++n) {
      bool match = true;
      for (std::size_t j = 0; j < pattern.size(); ++j) {
        const bool member = n % specs[j].modulus == specs[j].residue % specs[j].modulus;
        if (member != (pattern[j] == 0)) {
          match = false;
          break;
        }
      }
      if (match) return true;
    }
    return false;
  };
  return fam;
}

/// A_j = {n : bit j of n is 1}. Any finite bit pattern is realized by
/// infinitely many naturals past any starting point, so the oracle is
/// constantly true. Distinct naturals differ in some bit, so the family
/// separates distinct points of every orbit.
inline SeparatingFamily<SuccessorPoint> bit_separating_family(int count) {
  if (count < 0 || count > 62) throw std::invalid_argument("bit_separating_family: count in [0,62]");
  SeparatingFamily<SuccessorPoint> fam;
  for (int j = 0; j < count; ++j) {
    StreamSet<SuccessorPoint> s;
    const unsigned long long bit = 1ull << j;
    s.pred = [bit](const SuccessorPoint& n) { return (n & bit) != 0; };
    s.period = bit << 1;
    s.label = "bit " + std::to_string(j) + " set";
    fam.sets.push_back(std::move(s));
  }
  fam.ray_uniform = true;
  fam.infinite_in_orbit = [](const std::vector<int>&, const SuccessorPoint&) { return true; };
  return fam;
}

/// Exact first-entry radius of a periodic predicate on the successor system:
/// max over residues r mod L of the least m >= 0 with pred(r + m). Returns
/// nullopt when the predicate is empty on [0, L).
inline std::optional<long long> successor_exact_radius(
    const std::function<bool(const SuccessorPoint&)>& pred, unsigned long long L) {
  if (L == 0 || L > kResidueScanCap) return std::nullopt;
  std::vector<char> member(L);
  bool any = false;
  for (unsigned long long r = 0; r < L; ++r) {
    member[r] = pred(r) ? 1 : 0;
    any = any || member[r];
  }
  if (!any) return std::nullopt;
  // Two descending sweeps resolve the wrap-around of first-entry distances.
  std::vector<long long> dist(L, 0);
  for (int pass = 0; pass < 2; ++pass)
    for (unsigned long long k = L; k-- > 0;) {
      if (member[k])
        dist[k] = 0;
      else
        dist[k] = dist[(k + 1) % L] + 1;
    }
  return *std::max_element(dist.begin(), dist.end());
}

namespace detail {

template <typename P>
bool pattern_matches(const std::vector<StreamSet<P>>& sets, const std::vector<int>& pattern,
                     const P& x) {
  for (std::size_t j = 0; j < pattern.size(); ++j)
    if (sets[j].contains(x) != (pattern[j] == 0)) return false;
  return true;
}

/// Greedy lex-min viable pattern of length i, most significant position
/// first, 0 (= membership) preferred. Correct because the cell of a viable
/// prefix splits into its two extensions, so at least one stays infinite.
template <typename P>
std::vector<int> lexmin_pattern(const SeparatingFamily<P>& fam, long long i, const P& x) {
  std::vector<int> s;
  for (long long j = 0; j < i; ++j) {
    s.push_back(0);
    if (!fam.infinite_in_orbit(s, x)) {
      s.back() = 1;
      if (!fam.infinite_in_orbit(s, x))
        throw OracleError("frequency oracle rejects both extensions of a viable pattern");
    }
  }
  return s;
}

}  // namespace detail

/// Separating family to T-complete marker sequence. Level i keeps the points
/// that lie in the lex-least cell still infinite in their own orbit:
///   s_i(x) = lex-min s in {0,1}^i with A_s cap O(x) infinite,
///   B_i' = {x : x in A_{s_i(x)}},   B_i = B_i' minus B',
/// where B' = intersection of all B_k'. B' is evaluated as the bounded
/// conjunction over k < depth, which contains the true intersection; the
/// subtraction is therefore conservative and exact for points whose orbit
/// certificate lies below the top level.
template <typename P>
MarkerFamily<P> build_complete_markers(const StreamSystem<P>& sys, const SeparatingFamily<P>& fam,
                                       long long depth) {
  if (depth < 0) throw std::invalid_argument("build_complete_markers: negative depth");
  MarkerFamily<P> out;
  if (depth == 0) return out;
  if (static_cast<long long>(fam.sets.size()) + 1 < depth)
    throw std::invalid_argument("build_complete_markers: separating family shorter than depth - 1");
  if (!fam.infinite_in_orbit) throw OracleError("build_complete_markers: frequency oracle missing");
  if (sys.seeds().empty()) throw std::invalid_argument("build_complete_markers: no seed points");
  for (const P& seed : sys.seeds())
    if (orbit_closes(sys, seed, sys.window()))
      throw OrbitClosure("build_complete_markers: a seed orbit closes up within the window");

  // With a ray-uniform oracle the patterns are global; freeze them once.
  std::shared_ptr<const std::vector<std::vector<int>>> frozen;
  if (fam.ray_uniform) {
    std::vector<std::vector<int>> pats;
    for (long long i = 0; i < depth; ++i)
      pats.push_back(detail::lexmin_pattern(fam, i, sys.seeds().front()));
    frozen = std::make_shared<const std::vector<std::vector<int>>>(std::move(pats));
  }

  std::optional<unsigned long long> family_period = 1ull;
  for (long long j = 0; j + 1 < depth && family_period; ++j) {
    if (!fam.sets[j].period)
      family_period = std::nullopt;
    else
      family_period = checked_lcm(*family_period, *fam.sets[j].period, kResidueScanCap);
  }
  if (!fam.ray_uniform) family_period = std::nullopt;

  auto in_core = [fam, frozen, depth](const P& x) {
    for (long long k = 0; k < depth; ++k) {
      const std::vector<int> pat = frozen ? (*frozen)[k] : detail::lexmin_pattern(fam, k, x);
      if (!detail::pattern_matches(fam.sets, pat, x)) return false;
    }
    return true;
  };
  out.core.emplace();
  out.core->pred = in_core;
  out.core->period = family_period;
  out.core->label = "subtracted conjunction";

  for (long long i = 0; i < depth; ++i) {
    auto in_level = [fam, frozen, i](const P& x) {
      if (frozen) return detail::pattern_matches(fam.sets, (*frozen)[i], x);
      return detail::pattern_matches(fam.sets, detail::lexmin_pattern(fam, i, x), x);
    };
    MarkerLevel<P> level;
    level.set.pred = [in_level, in_core](const P& x) { return in_level(x) && !in_core(x); };
    level.set.period = family_period;
    level.set.label = "complete marker level " + std::to_string(i);
    if constexpr (std::is_same_v<P, SuccessorPoint>) {
      if (sys.successor_semantics() && family_period) {
        auto radius = successor_exact_radius(level.set.pred, *family_period);
        level.completeness_radius = radius;
        level.boundedness_radius = radius;
      }
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

/// The ideal dyadic marker family B_i = {n : n = 2^i - 1 mod 2^i} on the
/// successor system, with exact certificates (worst entry time 2^i - 1, from
/// the residue 0 class). Level 0 is the whole space, as complete_to_bounded
/// requires.
inline MarkerFamily<SuccessorPoint> dyadic_residue_family(int count) {
  if (count < 1 || count > 62) throw std::invalid_argument("dyadic_residue_family: count in [1,62]");
  MarkerFamily<SuccessorPoint> out;
  for (int i = 0; i < count; ++i) {
    const unsigned long long mod = 1ull << i;
    MarkerLevel<SuccessorPoint> level;
    level.set = residue_set(mod, mod - 1);
    level.completeness_radius = static_cast<long long>(mod - 1);
    level.boundedness_radius = static_cast<long long>(mod - 1);
    out.levels.push_back(std::move(level));
  }
  return out;
}

/// T-complete decreasing family to T-bounded decreasing family:
///   B_i = A_i union union_{j<i} (A_j minus (T^{<=i})^{-1}(A_{j+1})).
/// Radius bound i*i: a point of A_j either already lies in B_i or moves into
/// A_{j+1} within i steps, so at most i steps per level over at most i
/// levels. Completeness certificates are spot-checked on the seed orbits
/// before anything is built.
template <typename P>
MarkerFamily<P> complete_to_bounded(const StreamSystem<P>& sys, const MarkerFamily<P>& A_seq,
                                    long long count) {
  if (count < 1) throw std::invalid_argument("complete_to_bounded: count must be >= 1");
  if (A_seq.size() < count)
    throw std::invalid_argument("complete_to_bounded: family shorter than count");
  if (!A_seq.levels[0].set.universal)
    throw std::invalid_argument("complete_to_bounded: A_0 must be the whole space");
  for (long long j = 0; j < count; ++j)
    if (!A_seq.levels[j].completeness_radius)
      throw std::invalid_argument("complete_to_bounded: completeness certificate missing at level " +
                                  std::to_string(j));

  for (const P& seed : sys.seeds()) {
    for (long long j = 0; j < count; ++j) {
      const long long radius = *A_seq.levels[j].completeness_radius;
      sys.require_depth(radius);
      bool entered = false;
      P p = seed;
      for (long long m = 0; m <= radius; ++m) {
        if (A_seq.levels[j].set.contains(p)) {
          entered = true;
          break;
        }
        p = sys.next(p);
      }
      if (!entered)
        throw OrbitClosure("complete_to_bounded: completeness certificate refuted at level " +
                           std::to_string(j) + " along a seed orbit");
    }
  }

  MarkerFamily<P> out;
  std::optional<unsigned long long> period = 1ull;
  for (long long i = 0; i < count; ++i) {
    if (period && A_seq.levels[i].set.period)
      period = checked_lcm(*period, *A_seq.levels[i].set.period, kResidueScanCap);
    else
      period = std::nullopt;
    sys.require_depth(i);

    std::vector<StreamSet<P>> A;
    for (long long j = 0; j <= i; ++j) A.push_back(A_seq.levels[j].set);
    auto step = [sys](const P& x) { return sys.next(x); };  // by value: the set outlives the call
    auto pred = [A, i, step](const P& x) {
      if (A[i].contains(x)) return true;
      for (long long j = 0; j < i; ++j) {
        if (!A[j].contains(x)) continue;
        bool enters = false;
        P p = x;
        for (long long m = 0; m <= i; ++m) {
          if (A[j + 1].contains(p)) {
            enters = true;
            break;
          }
          p = step(p);
        }
        if (!enters) return true;
      }
      return false;
    };

    MarkerLevel<P> level;
    level.set.pred = pred;
    level.set.period = period;
    level.set.universal = i == 0;
    level.set.label = "bounded marker level " + std::to_string(i);
    level.boundedness_radius = i * i;
    if constexpr (std::is_same_v<P, SuccessorPoint>) {
      if (sys.successor_semantics() && period) {
        auto exact = successor_exact_radius(level.set.pred, *period);
        if (exact) level.boundedness_radius = *exact;
      }
    }
    level.completeness_radius = level.boundedness_radius;
    out.levels.push_back(std::move(level));
  }
  return out;
}

/// Probe-and-window verification: decreasingness at each probe, vanishing
/// (the probe leaves some level within the index window), and certified entry
/// radii. Violations are report content, never exceptions.
template <typename P>
MarkerReport verify_markers(const StreamSystem<P>& sys, const MarkerFamily<P>& fam,
                            const std::vector<P>& probes, long long window) {
  if (window < 1) throw std::invalid_argument("verify_markers: window must be >= 1");
  MarkerReport report;
  const long long n = fam.size();
  const long long vanish_bound = std::min(n, window);
  for (std::size_t idx = 0; idx < probes.size(); ++idx) {
    const P& x = probes[idx];
    for (long long i = 0; i + 1 < n; ++i)
      if (fam.levels[i + 1].set.contains(x) && !fam.levels[i].set.contains(x))
        report.violations.push_back({static_cast<long long>(idx), i + 1, "decreasing",
                                     "level contains the probe but the previous level does not"});
    bool leaves = vanish_bound == 0;
    for (long long i = 0; i < vanish_bound && !leaves; ++i)
      if (!fam.levels[i].set.contains(x)) leaves = true;
    if (!leaves)
      report.violations.push_back({static_cast<long long>(idx), vanish_bound - 1, "vanishing",
                                   "probe lies in every level of the index window"});
    for (long long i = 0; i < n; ++i) {
      std::optional<long long> radius = fam.levels[i].boundedness_radius;
      if (!radius) radius = fam.levels[i].completeness_radius;
      if (!radius) continue;
      if (*radius > sys.window()) {
        report.truncated = true;
        continue;
      }
      bool entered = false;
      P p = x;
      for (long long m = 0; m <= *radius; ++m) {
        if (fam.levels[i].set.contains(p)) {
          entered = true;
          break;
        }
        p = sys.next(p);
      }
      if (!entered)
        report.violations.push_back({static_cast<long long>(idx), i, "radius",
                                     "no entry within the certified radius"});
    }
    ++report.probes_checked;
  }
  return report;
}

}  // namespace ergotile
