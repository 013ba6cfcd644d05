#ifndef PCNRM_OFFER_H_
#define PCNRM_OFFER_H_

#include <cstdint>
#include <vector>

namespace pcnrm {

// A set of products offered for sale, stored as a bitset over the dense
// product indices of an instance. Ordering is by the bitset read as an
// unsigned integer with product j at bit j.
class Offer {
 public:
  Offer() = default;
  explicit Offer(int universe);

  static Offer All(int universe);
  static Offer FromMask(int universe, std::uint64_t mask);
  static Offer FromProducts(int universe, const std::vector<int>& products);

  int universe() const { return universe_; }
  bool contains(int j) const {
    return (words_[j >> 6] >> (j & 63)) & 1u;
  }
  void insert(int j) { words_[j >> 6] |= std::uint64_t{1} << (j & 63); }
  void erase(int j) { words_[j >> 6] &= ~(std::uint64_t{1} << (j & 63)); }

  int size() const;
  bool empty() const;
  std::vector<int> products() const;

  bool IsSubsetOf(const Offer& other) const;
  Offer Intersect(const Offer& other) const;
  Offer Union(const Offer& other) const;
  Offer Minus(const Offer& other) const;

  // Only valid when universe() <= 64.
  std::uint64_t mask() const;

  friend bool operator==(const Offer& a, const Offer& b) {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }
  friend bool operator!=(const Offer& a, const Offer& b) { return !(a == b); }
  friend bool operator<(const Offer& a, const Offer& b);

 private:
  int universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace pcnrm

#endif  // PCNRM_OFFER_H_
