#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace bdloss {

// Bitmask over a ground set {0, ..., p-1}. Element i is bit i; the first
// word is the canonical dense-table index when p <= 64.
class Subset {
 public:
  Subset() = default;
  explicit Subset(int p);

  static Subset from_mask(int p, std::uint64_t mask);
  static Subset full(int p);

  int ground_size() const { return p_; }

  bool test(int i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(int i) { words_[i >> 6] |= bit(i); }
  void reset(int i) { words_[i >> 6] &= ~bit(i); }
  void flip(int i) { words_[i >> 6] ^= bit(i); }

  int count() const;
  // Number of members inside `mask` (same ground set).
  int count_in(const Subset& mask) const;
  bool empty() const { return count() == 0; }
  bool is_subset_of(const Subset& other) const;

  // Only valid for p <= 64.
  std::uint64_t mask() const;

  std::vector<int> elements() const;
  std::string to_string() const;

  friend bool operator==(const Subset& a, const Subset& b) = default;

 private:
  static std::uint64_t bit(int i) { return std::uint64_t{1} << (i & 63); }

  int p_ = 0;
  std::vector<std::uint64_t> words_;
};

inline int popcount(std::uint64_t x) { return std::popcount(x); }

}  // namespace bdloss
