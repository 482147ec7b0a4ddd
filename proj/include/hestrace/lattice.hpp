#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hestrace/bitset.hpp"
#include "hestrace/error.hpp"

namespace hestrace {

/// Ground-set cap for powerset lattices in normal operation.
inline constexpr std::size_t kMaxPowersetGround = 4096;
/// Element-count cap for anything that enumerates a lattice.
inline constexpr std::size_t kMaxEnumerable = 256;

/// Iteration cap for Kleene chains. HESTRACE_ITERATION_BUDGET overrides it.
inline std::size_t default_iteration_budget() {
  if (const char* env = std::getenv("HESTRACE_ITERATION_BUDGET")) {
    char* end = nullptr;
    auto v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1'000'000;
}

template <class L>
concept FiniteLattice = requires(const L& l, const typename L::value_type& a, std::mt19937_64& rng) {
  typename L::value_type;
  { l.bottom() } -> std::same_as<typename L::value_type>;
  { l.top() } -> std::same_as<typename L::value_type>;
  { l.join(a, a) } -> std::same_as<typename L::value_type>;
  { l.meet(a, a) } -> std::same_as<typename L::value_type>;
  { l.leq(a, a) } -> std::same_as<bool>;
  { l.height() } -> std::convertible_to<std::size_t>;
  { l.random_element(rng) } -> std::same_as<typename L::value_type>;
  { a == a } -> std::convertible_to<bool>;
};

/// Lattices small enough to list every element.
template <class L>
concept EnumerableLattice = FiniteLattice<L> && requires(const L& l) {
  { l.size() } -> std::convertible_to<std::size_t>;
  { l.elements() } -> std::same_as<std::vector<typename L::value_type>>;
};

/// Subsets of {0..n-1} under inclusion.
class PowersetLattice {
public:
  using value_type = BitSet;

  PowersetLattice() = default;
  explicit PowersetLattice(std::size_t ground) : ground_(ground) {
    if (ground > kMaxPowersetGround)
      throw LatticeTooLarge("powerset ground set of " + std::to_string(ground) + " exceeds " +
                            std::to_string(kMaxPowersetGround));
  }

  std::size_t ground_size() const noexcept { return ground_; }

  BitSet bottom() const { return BitSet(ground_); }
  BitSet top() const { return BitSet::full(ground_); }
  BitSet join(const BitSet& a, const BitSet& b) const { return a | b; }
  BitSet meet(const BitSet& a, const BitSet& b) const { return a & b; }
  bool leq(const BitSet& a, const BitSet& b) const { return a.is_subset_of(b); }
  std::size_t height() const noexcept { return ground_; }

  BitSet random_element(std::mt19937_64& rng) const {
    BitSet s(ground_);
    for (std::size_t i = 0; i < ground_; ++i)
      if (rng() & 1u) s.set(i);
    return s;
  }

  std::size_t size() const {
    if (ground_ >= 63) return SIZE_MAX;
    return std::size_t{1} << ground_;
  }

  std::vector<BitSet> elements() const {
    if (size() > kMaxEnumerable)
      throw LatticeTooLarge("powerset of " + std::to_string(ground_) + " elements is too large to enumerate");
    std::vector<BitSet> out;
    out.reserve(size());
    for (std::uint64_t m = 0; m < size(); ++m) out.push_back(BitSet::from_mask(ground_, m));
    return out;
  }

  friend bool operator==(const PowersetLattice&, const PowersetLattice&) = default;

private:
  std::size_t ground_ = 0;
};

/// Total maps {0..d-1} -> L, ordered pointwise.
template <FiniteLattice L>
class FunctionLattice {
public:
  using value_type = std::vector<typename L::value_type>;

  FunctionLattice(std::size_t domain, L codomain) : domain_(domain), codomain_(std::move(codomain)) {}

  std::size_t domain_size() const noexcept { return domain_; }
  const L& codomain() const noexcept { return codomain_; }

  value_type bottom() const { return value_type(domain_, codomain_.bottom()); }
  value_type top() const { return value_type(domain_, codomain_.top()); }
  value_type join(const value_type& a, const value_type& b) const {
    value_type r;
    r.reserve(domain_);
    for (std::size_t x = 0; x < domain_; ++x) r.push_back(codomain_.join(a[x], b[x]));
    return r;
  }
  value_type meet(const value_type& a, const value_type& b) const {
    value_type r;
    r.reserve(domain_);
    for (std::size_t x = 0; x < domain_; ++x) r.push_back(codomain_.meet(a[x], b[x]));
    return r;
  }
  bool leq(const value_type& a, const value_type& b) const {
    for (std::size_t x = 0; x < domain_; ++x)
      if (!codomain_.leq(a[x], b[x])) return false;
    return true;
  }
  std::size_t height() const { return domain_ * codomain_.height(); }
  value_type random_element(std::mt19937_64& rng) const {
    value_type r;
    for (std::size_t x = 0; x < domain_; ++x) r.push_back(codomain_.random_element(rng));
    return r;
  }

  std::size_t size() const
    requires EnumerableLattice<L>
  {
    std::size_t n = 1, c = codomain_.size();
    for (std::size_t x = 0; x < domain_; ++x) {
      if (c != 0 && n > SIZE_MAX / c) return SIZE_MAX;
      n *= c;
    }
    return n;
  }

  std::vector<value_type> elements() const
    requires EnumerableLattice<L>
  {
    if (size() > kMaxEnumerable) throw LatticeTooLarge("function lattice is too large to enumerate");
    auto base = codomain_.elements();
    std::vector<value_type> out{value_type{}};
    for (std::size_t x = 0; x < domain_; ++x) {
      std::vector<value_type> next;
      for (const auto& prefix : out)
        for (const auto& e : base) {
          auto v = prefix;
          v.push_back(e);
          next.push_back(std::move(v));
        }
      out = std::move(next);
    }
    return out;
  }

private:
  std::size_t domain_;
  L codomain_;
};

/// Maps {0..d-1} -> P({0..n-1}), packed row-major into one BitSet of d*n bits.
/// Bit x*n+p is set iff p belongs to the image of x.
template <>
class FunctionLattice<PowersetLattice> {
public:
  using value_type = BitSet;

  FunctionLattice() = default;
  FunctionLattice(std::size_t domain, PowersetLattice codomain)
      : domain_(domain), codomain_(codomain), packed_(domain * codomain.ground_size()) {}

  std::size_t domain_size() const noexcept { return domain_; }
  const PowersetLattice& codomain() const noexcept { return codomain_; }
  std::size_t bit(std::size_t x, std::size_t p) const noexcept { return x * codomain_.ground_size() + p; }

  bool contains(const BitSet& f, std::size_t x, std::size_t p) const { return f.test(bit(x, p)); }

  BitSet image(const BitSet& f, std::size_t x) const {
    BitSet out(codomain_.ground_size());
    for (std::size_t p = 0; p < codomain_.ground_size(); ++p)
      if (f.test(bit(x, p))) out.set(p);
    return out;
  }

  BitSet from_images(const std::vector<BitSet>& images) const {
    BitSet out(packed_.ground_size());
    for (std::size_t x = 0; x < domain_; ++x) images[x].for_each_set([&](std::size_t p) { out.set(bit(x, p)); });
    return out;
  }

  BitSet bottom() const { return packed_.bottom(); }
  BitSet top() const { return packed_.top(); }
  BitSet join(const BitSet& a, const BitSet& b) const { return a | b; }
  BitSet meet(const BitSet& a, const BitSet& b) const { return a & b; }
  bool leq(const BitSet& a, const BitSet& b) const { return a.is_subset_of(b); }
  std::size_t height() const noexcept { return packed_.ground_size(); }
  BitSet random_element(std::mt19937_64& rng) const { return packed_.random_element(rng); }
  std::size_t size() const { return packed_.size(); }
  std::vector<BitSet> elements() const { return packed_.elements(); }

private:
  std::size_t domain_ = 0;
  PowersetLattice codomain_;
  PowersetLattice packed_;
};

using PointwisePowersetLattice = FunctionLattice<PowersetLattice>;

/// Tuples over an ordered list of components, ordered componentwise.
template <FiniteLattice L>
class ProductLattice {
public:
  using value_type = std::vector<typename L::value_type>;

  explicit ProductLattice(std::vector<L> components) : components_(std::move(components)) {}

  const std::vector<L>& components() const noexcept { return components_; }

  value_type bottom() const {
    value_type r;
    for (const auto& c : components_) r.push_back(c.bottom());
    return r;
  }
  value_type top() const {
    value_type r;
    for (const auto& c : components_) r.push_back(c.top());
    return r;
  }
  value_type join(const value_type& a, const value_type& b) const {
    value_type r;
    for (std::size_t k = 0; k < components_.size(); ++k) r.push_back(components_[k].join(a[k], b[k]));
    return r;
  }
  value_type meet(const value_type& a, const value_type& b) const {
    value_type r;
    for (std::size_t k = 0; k < components_.size(); ++k) r.push_back(components_[k].meet(a[k], b[k]));
    return r;
  }
  bool leq(const value_type& a, const value_type& b) const {
    for (std::size_t k = 0; k < components_.size(); ++k)
      if (!components_[k].leq(a[k], b[k])) return false;
    return true;
  }
  std::size_t height() const {
    std::size_t h = 0;
    for (const auto& c : components_) h += c.height();
    return h;
  }
  value_type random_element(std::mt19937_64& rng) const {
    value_type r;
    for (const auto& c : components_) r.push_back(c.random_element(rng));
    return r;
  }

  std::size_t size() const
    requires EnumerableLattice<L>
  {
    std::size_t n = 1;
    for (const auto& c : components_) {
      auto s = c.size();
      if (s != 0 && n > SIZE_MAX / s) return SIZE_MAX;
      n *= s;
    }
    return n;
  }

  std::vector<value_type> elements() const
    requires EnumerableLattice<L>
  {
    if (size() > kMaxEnumerable) throw LatticeTooLarge("product lattice is too large to enumerate");
    std::vector<value_type> out{value_type{}};
    for (const auto& c : components_) {
      std::vector<value_type> next;
      for (const auto& prefix : out)
        for (const auto& e : c.elements()) {
          auto v = prefix;
          v.push_back(e);
          next.push_back(std::move(v));
        }
      out = std::move(next);
    }
    return out;
  }

private:
  std::vector<L> components_;
};

enum class Extremum { least, greatest };

template <class V>
struct FixpointRun {
  V value;
  std::size_t iterations = 0;  ///< body applications, including the final stable one
};

/// Kleene iteration from bottom (least) or top (greatest). Stops on exact equality.
/// Throws MonotonicityViolation if the chain is not a chain or outgrows the lattice height.
template <FiniteLattice L, class F>
FixpointRun<typename L::value_type> kleene_fixpoint(const L& lat, F&& f, Extremum which,
                                                    std::size_t budget = default_iteration_budget()) {
  using V = typename L::value_type;
  const std::size_t height = lat.height();
  V cur = which == Extremum::least ? lat.bottom() : lat.top();
  for (std::size_t it = 1;; ++it) {
    if (it > budget) throw BudgetExceeded("Kleene iteration exceeded budget of " + std::to_string(budget));
    V next = f(static_cast<const V&>(cur));
    if (next == cur) return {std::move(cur), it};
    bool ordered = which == Extremum::least ? lat.leq(cur, next) : lat.leq(next, cur);
    if (!ordered) throw MonotonicityViolation("Kleene chain is not monotone: body is not monotone");
    if (it > height) throw MonotonicityViolation("Kleene chain longer than lattice height");
    cur = std::move(next);
  }
}

template <FiniteLattice L, class F>
typename L::value_type kleene_lfp(const L& lat, F&& f, std::size_t budget = default_iteration_budget()) {
  return kleene_fixpoint(lat, std::forward<F>(f), Extremum::least, budget).value;
}

template <FiniteLattice L, class F>
typename L::value_type kleene_gfp(const L& lat, F&& f, std::size_t budget = default_iteration_budget()) {
  return kleene_fixpoint(lat, std::forward<F>(f), Extremum::greatest, budget).value;
}

/// Test oracle: enumerate the lattice, keep fixpoints, return the unique least/greatest one.
template <EnumerableLattice L, class F>
typename L::value_type brute_force_extremal_fixpoint(const L& lat, F&& f, Extremum which) {
  using V = typename L::value_type;
  std::vector<V> fixpoints;
  for (auto& e : lat.elements())
    if (f(static_cast<const V&>(e)) == e) fixpoints.push_back(std::move(e));
  if (fixpoints.empty()) throw Error("no fixpoint exists: body is not monotone");
  for (const auto& cand : fixpoints) {
    bool extremal = true;
    for (const auto& other : fixpoints) {
      bool ok = which == Extremum::least ? lat.leq(cand, other) : lat.leq(other, cand);
      if (!ok) {
        extremal = false;
        break;
      }
    }
    if (extremal) return cand;
  }
  throw Error("fixpoint set has no unique extremum: body is not monotone");
}

template <class V>
struct MonotonicityCounterexample {
  V lower;
  V upper;
};

/// Looks for a <= b with f(a) not <= f(b). Exhaustive when the lattice is enumerable and
/// the pair count fits the budget; otherwise samples pairs (a, a join r).
template <FiniteLattice L, class F>
std::optional<MonotonicityCounterexample<typename L::value_type>> check_monotone_on_samples(
    const L& lat, F&& f, std::size_t budget = 1000, std::uint64_t seed = 0) {
  using V = typename L::value_type;
  if constexpr (EnumerableLattice<L>) {
    auto n = lat.size();
    if (n <= kMaxEnumerable && n * n <= budget) {
      auto elems = lat.elements();
      std::vector<V> images;
      images.reserve(elems.size());
      for (const auto& e : elems) images.push_back(f(e));
      for (std::size_t a = 0; a < elems.size(); ++a)
        for (std::size_t b = 0; b < elems.size(); ++b)
          if (lat.leq(elems[a], elems[b]) && !lat.leq(images[a], images[b]))
            return MonotonicityCounterexample<V>{elems[a], elems[b]};
      return std::nullopt;
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < budget; ++k) {
    V a = lat.random_element(rng);
    V b = lat.join(a, lat.random_element(rng));
    if (!lat.leq(f(static_cast<const V&>(a)), f(static_cast<const V&>(b))))
      return MonotonicityCounterexample<V>{std::move(a), std::move(b)};
  }
  return std::nullopt;
}

}  // namespace hestrace
