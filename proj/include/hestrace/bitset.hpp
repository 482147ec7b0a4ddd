#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace hestrace {

/// Fixed-width bit vector. Widths up to 128 bits stay inline.
class BitSet {
public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;

  BitSet() = default;
  explicit BitSet(std::size_t width) : width_(width), words_(word_count(width), 0) {}

  static BitSet full(std::size_t width) {
    BitSet s(width);
    std::fill(s.words_.begin(), s.words_.end(), ~word_type{0});
    s.trim();
    return s;
  }

  static BitSet from_indices(std::size_t width, const std::vector<std::size_t>& indices) {
    BitSet s(width);
    for (auto i : indices) s.set(i);
    return s;
  }

  /// Bit i is set iff bit i of `mask` is set; width must be <= 64.
  static BitSet from_mask(std::size_t width, word_type mask) {
    BitSet s(width);
    if (!s.words_.empty()) s.words_[0] = mask;
    s.trim();
    return s;
  }

  std::size_t width() const noexcept { return width_; }

  bool test(std::size_t i) const noexcept { return (words_[i / word_bits] >> (i % word_bits)) & 1u; }
  void set(std::size_t i) noexcept { words_[i / word_bits] |= word_type{1} << (i % word_bits); }
  void reset(std::size_t i) noexcept { words_[i / word_bits] &= ~(word_type{1} << (i % word_bits)); }
  void assign(std::size_t i, bool v) noexcept { v ? set(i) : reset(i); }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](word_type w) { return w == 0; });
  }
  bool any() const noexcept { return !none(); }

  /// Low 64 bits.
  word_type low_word() const noexcept { return words_.empty() ? 0 : words_[0]; }

  bool is_subset_of(const BitSet& other) const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }

  BitSet& operator|=(const BitSet& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  BitSet& operator&=(const BitSet& o) noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  friend BitSet operator|(BitSet a, const BitSet& b) noexcept { return a |= b; }
  friend BitSet operator&(BitSet a, const BitSet& b) noexcept { return a &= b; }
  BitSet operator~() const {
    BitSet r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  friend bool operator==(const BitSet& a, const BitSet& b) noexcept {
    return a.width_ == b.width_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin());
  }
  friend bool operator<(const BitSet& a, const BitSet& b) noexcept {
    if (a.width_ != b.width_) return a.width_ < b.width_;
    return std::lexicographical_compare(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words_.size(); ++k) {
      word_type w = words_[k];
      while (w) {
        out.push_back(k * word_bits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  template <class F>
  void for_each_set(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      word_type w = words_[k];
      while (w) {
        f(k * word_bits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  /// "{0,2}" style rendering of the set bits.
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for_each_set([&](std::size_t i) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    });
    return s + "}";
  }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(width_);
    for (auto w : words_) h ^= std::hash<word_type>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

private:
  static std::size_t word_count(std::size_t width) { return (width + word_bits - 1) / word_bits; }
  void trim() noexcept {
    if (width_ % word_bits && !words_.empty()) words_.back() &= (word_type{1} << (width_ % word_bits)) - 1;
  }

  std::size_t width_ = 0;
  boost::container::small_vector<word_type, 2> words_;
};

}  // namespace hestrace

template <>
struct std::hash<hestrace::BitSet> {
  std::size_t operator()(const hestrace::BitSet& s) const noexcept { return s.hash(); }
};
