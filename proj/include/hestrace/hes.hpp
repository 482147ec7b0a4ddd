#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hestrace/error.hpp"
#include "hestrace/lattice.hpp"

namespace hestrace {

enum class Sign { mu, nu };

inline const char* to_string(Sign s) { return s == Sign::mu ? "mu" : "nu"; }
inline Extremum extremum_of(Sign s) { return s == Sign::mu ? Extremum::least : Extremum::greatest; }
inline Sign flipped(Sign s) { return s == Sign::mu ? Sign::nu : Sign::mu; }

/// One equation `variable =sign body(u_1..u_m)` over its own carrier lattice.
template <FiniteLattice L>
struct Equation {
  using value_type = typename L::value_type;
  using Body = std::function<value_type(std::span<const value_type>)>;

  std::string variable;
  L lattice;
  Sign sign;
  Body body;
};

/// Ordered list of signed equations. Order matters: equation 1 is the innermost fixpoint.
template <FiniteLattice L>
class HierEqSystem {
public:
  using value_type = typename L::value_type;
  using Body = typename Equation<L>::Body;

  std::size_t add(std::string variable, L lattice, Sign sign, Body body) {
    equations_.push_back({std::move(variable), std::move(lattice), sign, std::move(body)});
    return equations_.size() - 1;
  }

  std::size_t size() const noexcept { return equations_.size(); }
  const Equation<L>& equation(std::size_t k) const { return equations_.at(k); }
  Equation<L>& equation(std::size_t k) { return equations_.at(k); }
  const std::vector<Equation<L>>& equations() const noexcept { return equations_; }

private:
  std::vector<Equation<L>> equations_;
};

struct EquationStats {
  std::size_t inner_solves = 0;      ///< extremal fixpoints computed for this equation
  std::size_t body_evaluations = 0;  ///< applications of f_i
  std::size_t longest_chain = 0;     ///< longest Kleene chain seen, in body applications
};

template <FiniteLattice L>
struct Solution {
  std::vector<typename L::value_type> values;
  std::vector<EquationStats> stats;
  std::size_t memo_hits = 0;
};

struct SolveOptions {
  std::size_t budget = default_iteration_budget();
  bool memoize = true;
  /// Re-substitute the solution into every body afterwards.
  bool verify = true;
};

/// Nested-fixpoint solver for a HierEqSystem.
///
/// Level i (1-based) maps the outer arguments (u_{i+1}..u_m) to the i-th intermediate
/// solution (l^(i)_1..l^(i)_i). l^(i)_i is the sign_i-extremal fixpoint of
/// u_i |-> f_i(l^(i-1)_1(u_i..), .., l^(i-1)_{i-1}(u_i..), u_i, .., u_m), each inner value
/// computed recursively; l^(i)_j for j < i is l^(i-1)_j evaluated at the fixpoint.
/// The sign is each equation's own annotation.
template <FiniteLattice L>
class HesSolver {
public:
  using V = typename L::value_type;
  /// Called after every inner fixpoint with (level i, outer args, l^(i)_i).
  using Observer = std::function<void(std::size_t, std::span<const V>, const V&)>;

  explicit HesSolver(const HierEqSystem<L>& hes, SolveOptions options = {})
      : hes_(hes), options_(options), stats_(hes.size()), memo_(hes.size() + 1) {}

  void set_observer(Observer obs) { observer_ = std::move(obs); }

  Solution<L> solve() {
    auto values = intermediate_solution(hes_.size(), {});
    if (options_.verify) {
      for (std::size_t k = 0; k < hes_.size(); ++k) {
        const auto& eq = hes_.equation(k);
        if (!(eq.body(std::span<const V>(values)) == values[k]))
          throw Error("solution is not a fixpoint of equation " + eq.variable);
      }
    }
    return {std::move(values), stats_, memo_hits_};
  }

  /// (l^(i)_1, .., l^(i)_i) at outer = (u_{i+1}, .., u_m). 0 <= i <= m.
  std::vector<V> intermediate_solution(std::size_t i, std::span<const V> outer) {
    const std::size_t m = hes_.size();
    if (i > m) throw Error("intermediate level out of range");
    if (outer.size() != m - i) throw DimensionMismatch("intermediate solution needs m-i outer arguments");
    if (i == 0) return {};

    std::vector<V> key;
    if constexpr (requires(const V& a, const V& b) { a < b; }) {
      if (options_.memoize) {
        key.assign(outer.begin(), outer.end());
        auto it = memo_[i].find(key);
        if (it != memo_[i].end()) {
          ++memo_hits_;
          return it->second;
        }
      }
    }

    const auto& eq = hes_.equation(i - 1);
    auto& st = stats_[i - 1];
    ++st.inner_solves;

    // args = (u_i, u_{i+1}, .., u_m); the inner level sees exactly this as its outer arguments.
    std::vector<V> args;
    args.reserve(m - i + 1);
    args.push_back(eq.sign == Sign::mu ? eq.lattice.bottom() : eq.lattice.top());
    args.insert(args.end(), outer.begin(), outer.end());

    std::vector<V> lower;
    const std::size_t height = eq.lattice.height();
    for (std::size_t it = 1;; ++it) {
      if (it > options_.budget)
        throw BudgetExceeded("equation " + eq.variable + " exceeded iteration budget of " +
                             std::to_string(options_.budget));
      lower = intermediate_solution(i - 1, std::span<const V>(args));
      std::vector<V> full = lower;
      full.insert(full.end(), args.begin(), args.end());
      V next = eq.body(std::span<const V>(full));
      ++st.body_evaluations;
      if (next == args[0]) {
        st.longest_chain = std::max(st.longest_chain, it);
        break;
      }
      bool ordered = eq.sign == Sign::mu ? eq.lattice.leq(args[0], next) : eq.lattice.leq(next, args[0]);
      if (!ordered) throw MonotonicityViolation("equation " + eq.variable + " is not monotone");
      if (it > height)
        throw MonotonicityViolation("equation " + eq.variable + ": chain exceeded lattice height");
      args[0] = std::move(next);
    }

    if (observer_) observer_(i, outer, args[0]);
    lower.push_back(std::move(args[0]));
    if constexpr (requires(const V& a, const V& b) { a < b; }) {
      if (options_.memoize) memo_[i].emplace(std::move(key), lower);
    }
    return lower;
  }

  /// l^(i)_j(outer), 1 <= j <= i <= m.
  V intermediate(std::size_t i, std::size_t j, std::span<const V> outer) {
    if (j < 1 || j > i) throw Error("intermediate index requires 1 <= j <= i");
    return intermediate_solution(i, outer)[j - 1];
  }

  const std::vector<EquationStats>& stats() const noexcept { return stats_; }

private:
  struct VecLess {
    bool operator()(const std::vector<V>& a, const std::vector<V>& b) const {
      if constexpr (requires(const V& x, const V& y) { x < y; })
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
      else
        return false;
    }
  };

  const HierEqSystem<L>& hes_;
  SolveOptions options_;
  std::vector<EquationStats> stats_;
  std::vector<std::map<std::vector<V>, std::vector<V>, VecLess>> memo_;
  std::size_t memo_hits_ = 0;
  Observer observer_;
};

template <FiniteLattice L>
Solution<L> solve(const HierEqSystem<L>& hes, SolveOptions options = {}) {
  return HesSolver<L>(hes, options).solve();
}

template <FiniteLattice L>
typename L::value_type intermediate(const HierEqSystem<L>& hes, std::size_t i, std::size_t j,
                                    std::span<const typename L::value_type> outer) {
  return HesSolver<L>(hes).intermediate(i, j, outer);
}

}  // namespace hestrace
