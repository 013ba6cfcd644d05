#include "pcnrm/offer.h"

#include <bit>
#include <cassert>

namespace pcnrm {

Offer::Offer(int universe)
    : universe_(universe), words_((universe + 63) / 64, 0) {}

Offer Offer::All(int universe) {
  Offer o(universe);
  for (int j = 0; j < universe; ++j) o.insert(j);
  return o;
}

Offer Offer::FromMask(int universe, std::uint64_t mask) {
  assert(universe <= 64);
  Offer o(universe);
  if (universe > 0) {
    o.words_[0] = universe == 64 ? mask : mask & ((std::uint64_t{1} << universe) - 1);
  }
  return o;
}

Offer Offer::FromProducts(int universe, const std::vector<int>& products) {
  Offer o(universe);
  for (int j : products) o.insert(j);
  return o;
}

int Offer::size() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

bool Offer::empty() const {
  for (std::uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

std::vector<int> Offer::products() const {
  std::vector<int> out;
  for (int j = 0; j < universe_; ++j) {
    if (contains(j)) out.push_back(j);
  }
  return out;
}

bool Offer::IsSubsetOf(const Offer& other) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] & ~other.words_[w]) return false;
  }
  return true;
}

Offer Offer::Intersect(const Offer& other) const {
  Offer o = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) o.words_[w] &= other.words_[w];
  return o;
}

Offer Offer::Union(const Offer& other) const {
  Offer o = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) o.words_[w] |= other.words_[w];
  return o;
}

Offer Offer::Minus(const Offer& other) const {
  Offer o = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) o.words_[w] &= ~other.words_[w];
  return o;
}

std::uint64_t Offer::mask() const {
  assert(universe_ <= 64);
  return words_.empty() ? 0 : words_[0];
}

bool operator<(const Offer& a, const Offer& b) {
  if (a.universe_ != b.universe_) return a.universe_ < b.universe_;
  for (std::size_t w = a.words_.size(); w-- > 0;) {
    if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
  }
  return false;
}

}  // namespace pcnrm
