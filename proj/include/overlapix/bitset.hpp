/*
 * (C) Copyright 2026 the overlapix authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace overlapix {

/// Fixed-size bit vector over 64-bit words. Backs both the per-study bin
/// coverage vectors and study subsets; one word covers the common case of
/// up to 64 studies, wider instances spill into further words.
class BitVec {
public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits)
      : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  static BitVec all_ones(std::size_t nbits) {
    BitVec v(nbits);
    for (auto& w : v.words_) w = ~std::uint64_t{0};
    v.trim();
    return v;
  }

  std::size_t size() const { return nbits_; }

  bool test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1u;
  }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  BitVec& operator&=(const BitVec& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  BitVec& operator|=(const BitVec& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
  friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }

  bool intersects(const BitVec& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  bool subset_of(const BitVec& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }
  friend bool operator!=(const BitVec& a, const BitVec& b) { return !(a == b); }

  /// Numeric order with bit 0 as the least significant bit; the tie-break
  /// order used everywhere a deterministic ranking of subsets is needed.
  friend bool operator<(const BitVec& a, const BitVec& b) {
    for (std::size_t i = a.words_.size(); i-- > 0;) {
      if (a.words_[i] != b.words_[i]) return a.words_[i] < b.words_[i];
    }
    return false;
  }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        unsigned b = static_cast<unsigned>(std::countr_zero(w));
        fn(wi * 64 + b);
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> set_bits() const {
    std::vector<std::size_t> out;
    for_each_set([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  std::string to01() const {
    std::string s(nbits_, '0');
    for_each_set([&](std::size_t i) { s[i] = '1'; });
    return s;
  }

private:
  void trim() {
    if (nbits_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (nbits_ % 64)) - 1;
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

} // namespace overlapix
