#include "rudu/pack/instance.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rudu/error.hpp"

namespace rudu::pack {

long long Instance::total_area() const {
  long long area = 0;
  for (const auto& item : items) area += static_cast<long long>(item.w) * item.h;
  return area;
}

int Instance::max_item_height() const {
  int best = 0;
  for (const auto& item : items) best = std::max(best, item.h);
  return best;
}

void Instance::validate(int height_cap) const {
  require(w_star >= 1, "w_star must be >= 1");
  require(!items.empty(), "instance has no items");
  require(items.size() <= 64, "at most 64 items are supported");
  require(w_star <= 64, "w_star must be <= 64");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const std::string tag = "item " + std::to_string(i);
    require(item.id == static_cast<int>(i), tag + ": ids must be dense 0..N-1");
    require(item.w >= 1 && item.h >= 1, tag + ": sides must be >= 1");
    require(item.w <= w_star, tag + ": width exceeds w_star");
    require(item.h <= height_cap, tag + ": height exceeds the grid height");
  }
}

Instance make_instance(int w_star, const std::vector<std::pair<int, int>>& sizes,
                       std::uint64_t seed) {
  Instance instance;
  instance.w_star = w_star;
  instance.seed = seed;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    instance.items.push_back({static_cast<int>(i), sizes[i].first, sizes[i].second});
  }
  return instance;
}

Rational::Rational(long long num, long long den) {
  require(den > 0, "rational denominator must be positive");
  const long long g = std::gcd(num < 0 ? -num : num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational h_star(const Instance& instance) {
  const Rational by_area(instance.total_area(), instance.w_star);
  const Rational tallest(instance.max_item_height());
  return std::max(by_area, tallest);
}

}  // namespace rudu::pack
