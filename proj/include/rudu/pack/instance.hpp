#pragma once

#include <cstdint>
#include <vector>

namespace rudu::pack {

/// A rectangular request: width is processing time, height is resource units.
struct Item {
  int id = 0;
  int w = 1;
  int h = 1;

  int area() const { return w * h; }
  friend bool operator==(const Item&, const Item&) = default;
};

/// A batch of items to pack into a strip of width `w_star`.
struct Instance {
  std::vector<Item> items;
  int w_star = 1;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(items.size()); }
  long long total_area() const;
  int max_item_height() const;

  /// Throws rudu::Error when the item invariants do not hold for a grid of
  /// height `height_cap`.
  void validate(int height_cap) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Builds an instance from (w, h) pairs with dense ids.
Instance make_instance(int w_star, const std::vector<std::pair<int, int>>& sizes,
                       std::uint64_t seed = 0);

/// Exact non-negative rational number, always stored in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(long long num, long long den = 1);

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  long long ceil() const { return (num_ + den_ - 1) / den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) { return a.num_ * b.den_ < b.num_ * a.den_; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  long long num_ = 0;
  long long den_ = 1;
};

/// Lower bound on the packed height: max(total area / W*, tallest item).
Rational h_star(const Instance& instance);

}  // namespace rudu::pack
