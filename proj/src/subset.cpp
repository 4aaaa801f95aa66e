#include "bdloss/subset.hpp"

#include <stdexcept>

namespace bdloss {

Subset::Subset(int p) : p_(p), words_((p + 63) / 64, 0) {
  if (p < 0) throw std::invalid_argument("Subset: negative ground set size");
}

Subset Subset::from_mask(int p, std::uint64_t mask) {
  if (p > 64) throw std::invalid_argument("Subset::from_mask: p > 64");
  Subset s(p);
  if (p < 64) mask &= (std::uint64_t{1} << p) - 1;
  if (p > 0) s.words_[0] = mask;
  return s;
}

Subset Subset::full(int p) {
  Subset s(p);
  for (int i = 0; i < p; ++i) s.set(i);
  return s;
}

int Subset::count() const {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

int Subset::count_in(const Subset& mask) const {
  int c = 0;
  for (std::size_t k = 0; k < words_.size() && k < mask.words_.size(); ++k) {
    c += std::popcount(words_[k] & mask.words_[k]);
  }
  return c;
}

bool Subset::is_subset_of(const Subset& other) const {
  if (other.p_ != p_) return false;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    if (words_[k] & ~other.words_[k]) return false;
  }
  return true;
}

std::uint64_t Subset::mask() const {
  if (p_ > 64) throw std::logic_error("Subset::mask: ground set larger than 64");
  return words_.empty() ? 0 : words_[0];
}

std::vector<int> Subset::elements() const {
  std::vector<int> out;
  for (int i = 0; i < p_; ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

std::string Subset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int i : elements()) {
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

}  // namespace bdloss
