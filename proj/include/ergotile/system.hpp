#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergotile/rational.hpp"

namespace ergotile {

/// Target set unreachable within the decidable horizon. For a finite system
/// the horizon is exact, so the set is genuinely unreachable from the start
/// point; for a stream system it only means "not reached within the window"
/// (exhausted_window = true).
class NotComplete : public std::runtime_error {
 public:
  NotComplete(std::string msg, bool exhausted_window)
      : std::runtime_error(std::move(msg)), exhausted_window_(exhausted_window) {}
  bool exhausted_window() const { return exhausted_window_; }

 private:
  bool exhausted_window_;
};

/// A traversal asked for more depth than the stream system's window allows.
class WindowExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pre-period length tau and minimal cycle length c of a forward orbit:
/// T^tau(x) = T^{tau+c}(x), c minimal, tau minimal given c.
struct OrbitShape {
  long long tail = 0;
  long long cycle = 1;
  long long span() const { return tail + cycle; }  // number of distinct orbit points
  bool operator==(const OrbitShape&) const = default;
};

/// Decidable subset of a finite system's points.
class FiniteSet {
 public:
  FiniteSet() = default;
  explicit FiniteSet(int universe_size) : member_(universe_size, false) {}
  FiniteSet(int universe_size, std::initializer_list<int> indices)
      : member_(universe_size, false) {
    for (int i : indices) member_.at(i) = true;
  }
  static FiniteSet universe(int universe_size) {
    FiniteSet s(universe_size);
    std::fill(s.member_.begin(), s.member_.end(), true);
    return s;
  }

  int universe_size() const { return static_cast<int>(member_.size()); }
  bool contains(int x) const { return member_.at(x); }
  void insert(int x) { member_.at(x) = true; }
  void erase(int x) { member_.at(x) = false; }
  bool empty() const {
    return std::none_of(member_.begin(), member_.end(), [](bool b) { return b; });
  }
  int count() const { return static_cast<int>(std::count(member_.begin(), member_.end(), true)); }
  std::vector<int> indices() const {
    std::vector<int> out;
    for (int i = 0; i < universe_size(); ++i)
      if (member_[i]) out.push_back(i);
    return out;
  }
  FiniteSet complement() const {
    FiniteSet s(universe_size());
    for (int i = 0; i < universe_size(); ++i) s.member_[i] = !member_[i];
    return s;
  }
  bool operator==(const FiniteSet&) const = default;

 private:
  std::vector<bool> member_;
};

/// The exact backend: a finite functional graph on points {0..N-1} with
/// rational observables f, g, h and weight w (g, w strictly positive).
/// Immutable after construction; every operation on it is a pure function.
class FiniteSystem {
 public:
  using Point = int;
  using Set = FiniteSet;

  FiniteSystem(std::vector<int> step, std::vector<Rational> f, std::vector<Rational> g,
               std::vector<Rational> h, std::vector<Rational> w)
      : step_(std::move(step)),
        f_(std::move(f)),
        g_(std::move(g)),
        h_(std::move(h)),
        w_(std::move(w)) {
    const std::size_t n = step_.size();
    if (n == 0) throw std::invalid_argument("finite system: needs at least one point");
    if (f_.size() != n || g_.size() != n || h_.size() != n || w_.size() != n)
      throw std::invalid_argument("finite system: observable tables must match point count");
    for (int t : step_)
      if (t < 0 || static_cast<std::size_t>(t) >= n)
        throw std::invalid_argument("finite system: step table not total");
    for (const Rational& v : g_)
      if (v <= 0) throw std::invalid_argument("finite system: g must be strictly positive");
    for (const Rational& v : w_)
      if (v <= 0) throw std::invalid_argument("finite system: w must be strictly positive");
  }

  int size() const { return static_cast<int>(step_.size()); }
  Point next(Point x) const { return step_.at(x); }
  const Rational& f(Point x) const { return f_.at(x); }
  const Rational& g(Point x) const { return g_.at(x); }
  const Rational& h(Point x) const { return h_.at(x); }
  const Rational& w(Point x) const { return w_.at(x); }
  const std::vector<int>& step_table() const { return step_; }

  void require_depth(long long) const {}  // finite systems have no window cap

  bool is_bijection() const {
    std::vector<bool> hit(step_.size(), false);
    for (int t : step_) {
      if (hit[t]) return false;
      hit[t] = true;
    }
    return true;
  }

  FiniteSystem with_h(std::vector<Rational> h) const {
    return FiniteSystem(step_, f_, g_, std::move(h), w_);
  }
  FiniteSystem with_w(std::vector<Rational> w) const {
    return FiniteSystem(step_, f_, g_, h_, std::move(w));
  }
  FiniteSystem with_f(std::vector<Rational> f) const {
    return FiniteSystem(step_, std::move(f), g_, h_, w_);
  }

 private:
  std::vector<int> step_;
  std::vector<Rational> f_, g_, h_, w_;
};

/// Decidable predicate over stream points. `period` may declare that on the
/// built-in successor system membership of n depends only on n mod period;
/// exact radius computations use it. `universal` marks the whole space.
template <typename P>
struct StreamSet {
  std::function<bool(const P&)> pred;
  std::optional<unsigned long long> period;
  bool universal = false;
  std::string label;

  bool contains(const P& p) const { return pred(p); }
};

/// Lazily evaluated transformation with opaque points. All traversals are
/// truncated at `window` depth; operations that truncate say so instead of
/// claiming a property they did not decide.
template <typename P>
class StreamSystem {
 public:
  using Point = P;
  using Set = StreamSet<P>;
  using StepFn = std::function<P(const P&)>;
  using ObsFn = std::function<Rational(const P&)>;
  using EqFn = std::function<bool(const P&, const P&)>;

  StreamSystem(std::vector<P> seeds, StepFn step, ObsFn f, ObsFn g, ObsFn h, ObsFn w, EqFn same,
               long long window, bool successor_semantics = false)
      : seeds_(std::move(seeds)),
        step_(std::move(step)),
        f_(std::move(f)),
        g_(std::move(g)),
        h_(std::move(h)),
        w_(std::move(w)),
        same_(std::move(same)),
        window_(window),
        successor_semantics_(successor_semantics) {
    if (window_ < 1) throw std::invalid_argument("stream system: window must be >= 1");
  }

  const std::vector<P>& seeds() const { return seeds_; }
  P next(const P& x) const { return step_(x); }
  Rational f(const P& x) const { return f_(x); }
  Rational g(const P& x) const { return g_(x); }
  Rational h(const P& x) const { return h_(x); }
  Rational w(const P& x) const { return w_(x); }
  bool same(const P& a, const P& b) const { return same_(a, b); }
  long long window() const { return window_; }

  /// True for the built-in successor-on-naturals instance, where point sets
  /// with a declared period admit exact radius computations.
  bool successor_semantics() const { return successor_semantics_; }

  void require_depth(long long k) const {
    if (k > window_)
      throw WindowExceeded("stream system: depth " + std::to_string(k) +
                           " exceeds window " + std::to_string(window_));
  }

 private:
  std::vector<P> seeds_;
  StepFn step_;
  ObsFn f_, g_, h_, w_;
  EqFn same_;
  long long window_;
  bool successor_semantics_;
};

using SuccessorPoint = unsigned long long;
using SuccessorSystem = StreamSystem<SuccessorPoint>;

/// Built-in aperiodic instance: n -> n+1 on the naturals.
inline SuccessorSystem make_successor_system(SuccessorSystem::ObsFn f, SuccessorSystem::ObsFn g,
                                             SuccessorSystem::ObsFn h, SuccessorSystem::ObsFn w,
                                             long long window,
                                             std::vector<SuccessorPoint> seeds = {0}) {
  return SuccessorSystem(
      std::move(seeds), [](const SuccessorPoint& n) { return n + 1; }, std::move(f), std::move(g),
      std::move(h), std::move(w),
      [](const SuccessorPoint& a, const SuccessorPoint& b) { return a == b; }, window,
      /*successor_semantics=*/true);
}

/// Minimal (tau, c): walk until the first revisit. The forward orbit of x has
/// exactly tau + c distinct points.
inline OrbitShape orbit_shape(const FiniteSystem& sys, int x) {
  std::vector<long long> seen_at(sys.size(), -1);
  long long k = 0;
  int p = x;
  while (seen_at[p] < 0) {
    seen_at[p] = k++;
    p = sys.next(p);
  }
  return OrbitShape{seen_at[p], k - seen_at[p]};
}

/// (x, Tx, ..., T^{depth-1}x), length exactly `depth`.
template <typename S>
std::vector<typename S::Point> forward_orbit(const S& sys, typename S::Point x, long long depth) {
  if (depth < 0) throw std::invalid_argument("forward_orbit: negative depth");
  sys.require_depth(depth);
  std::vector<typename S::Point> out;
  out.reserve(static_cast<std::size_t>(depth));
  typename S::Point p = x;
  for (long long k = 0; k < depth; ++k) {
    out.push_back(p);
    p = sys.next(p);
  }
  return out;
}

/// Least n >= 1 with T^n x in Y. The minimum ranges over positive n: x in Y
/// by itself does not give a hitting time. Scans n <= tau + c, which is exact
/// for a finite system.
inline long long hitting_time(const FiniteSystem& sys, const FiniteSet& Y, int x) {
  const long long bound = orbit_shape(sys, x).span();
  int p = x;
  for (long long n = 1; n <= bound; ++n) {
    p = sys.next(p);
    if (Y.contains(p)) return n;
  }
  throw NotComplete("hitting_time: target set unreachable from point " + std::to_string(x),
                    /*exhausted_window=*/false);
}

/// Windowed variant: scans n <= window and reports window exhaustion.
template <typename P>
long long hitting_time(const StreamSystem<P>& sys, const StreamSet<P>& Y, const P& x) {
  P p = x;
  for (long long n = 1; n <= sys.window(); ++n) {
    p = sys.next(p);
    if (Y.contains(p)) return n;
  }
  throw NotComplete("hitting_time: target not reached within window", /*exhausted_window=*/true);
}

struct SetProperties {
  bool forward_invariant = false;
  bool complete = false;
  std::optional<long long> boundedness_radius;
  bool wandering = false;
  bool exact = true;  // false when decided on a truncated stream window
};

/// Decides the set properties of Y exactly.
///   forward_invariant: T(Y) subset of Y.
///   complete: every point reaches Y in finitely many steps, 0 included.
///   boundedness_radius: least n with X = union_{m<=n} T^{-m}(Y), if any.
///   wandering: Y meets every forward orbit set in at most one point.
inline SetProperties set_properties(const FiniteSystem& sys, const FiniteSet& Y) {
  SetProperties props;
  props.exact = true;

  props.forward_invariant = true;
  for (int x = 0; x < sys.size(); ++x)
    if (Y.contains(x) && !Y.contains(sys.next(x))) {
      props.forward_invariant = false;
      break;
    }

  // First-entry times over m >= 0 (completeness counts membership itself).
  props.complete = true;
  long long radius = 0;
  for (int x = 0; x < sys.size(); ++x) {
    const long long bound = orbit_shape(sys, x).span();
    std::optional<long long> entry;
    int p = x;
    for (long long m = 0; m < bound; ++m) {
      if (Y.contains(p)) {
        entry = m;
        break;
      }
      p = sys.next(p);
    }
    if (!entry) {
      props.complete = false;
      break;
    }
    radius = std::max(radius, *entry);
  }
  if (props.complete) props.boundedness_radius = radius;

  props.wandering = true;
  for (int x = 0; x < sys.size() && props.wandering; ++x) {
    // The first tau + c orbit points are exactly the distinct points of the
    // forward orbit set.
    int hits = 0;
    for (int p : forward_orbit(sys, x, orbit_shape(sys, x).span()))
      if (Y.contains(p)) ++hits;
    if (hits > 1) props.wandering = false;
  }
  return props;
}

/// Stream variant, restricted to the seed-reachable window; reported as
/// approximate (exact = false).
template <typename P>
SetProperties set_properties(const StreamSystem<P>& sys, const StreamSet<P>& Y) {
  SetProperties props;
  props.exact = false;
  props.forward_invariant = true;
  props.complete = true;
  props.wandering = true;
  long long radius = 0;
  for (const P& seed : sys.seeds()) {
    std::optional<long long> entry;
    std::vector<P> members_seen;  // distinct orbit points found inside Y
    P p = seed;
    for (long long k = 0; k < sys.window(); ++k) {
      const bool in = Y.contains(p);
      if (in && !Y.contains(sys.next(p))) props.forward_invariant = false;
      if (in && !entry) entry = k;
      if (in) {
        bool fresh = true;
        for (const P& q : members_seen)
          if (sys.same(p, q)) {
            fresh = false;
            break;
          }
        if (fresh) members_seen.push_back(p);
        if (members_seen.size() > 1) props.wandering = false;
      }
      p = sys.next(p);
    }
    if (!entry) {
      props.complete = false;
    } else {
      radius = std::max(radius, *entry);
    }
  }
  if (props.complete) props.boundedness_radius = radius;
  return props;
}

}  // namespace ergotile
