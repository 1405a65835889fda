#include "rudu/pack/generator.hpp"

#include <random>

#include "rudu/error.hpp"

namespace rudu::pack {

namespace {

struct Piece {
  int x, y, w, h;
  bool splittable() const { return w >= 2 || h >= 2; }
};

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

SlicedLayout generate_sliced_layout(int w_star, int h_star, int n_items, std::uint64_t seed) {
  require(w_star >= 1 && h_star >= 1, "bin sides must be >= 1");
  require(n_items >= 1, "n_items must be >= 1");
  require(static_cast<long long>(n_items) <= static_cast<long long>(w_star) * h_star,
          "n_items exceeds the number of unit cells in the bin");

  std::mt19937_64 rng(seed);
  std::vector<Piece> pieces{{0, 0, w_star, h_star}};
  std::vector<int> candidates;

  for (int cut = 1; cut < n_items; ++cut) {
    candidates.clear();
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
      if (pieces[i].splittable()) candidates.push_back(i);
    }
    const int index = candidates[uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1)];
    Piece piece = pieces[index];

    bool vertical;  // cut across the width
    if (piece.w >= 2 && piece.h >= 2) {
      vertical = uniform_int(rng, 0, 1) == 0;
    } else {
      vertical = piece.w >= 2;
    }

    Piece second = piece;
    if (vertical) {
      const int at = uniform_int(rng, 1, piece.w - 1);
      piece.w = at;
      second.x += at;
      second.w -= at;
    } else {
      const int at = uniform_int(rng, 1, piece.h - 1);
      piece.h = at;
      second.y += at;
      second.h -= at;
    }
    pieces[index] = piece;
    pieces.push_back(second);
  }

  SlicedLayout layout;
  layout.h_star = h_star;
  layout.instance.w_star = w_star;
  layout.instance.seed = seed;
  for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
    layout.instance.items.push_back({i, pieces[i].w, pieces[i].h});
    layout.origins.push_back({pieces[i].x, pieces[i].y});
  }
  return layout;
}

Instance generate_sliced_instance(int w_star, int h_star, int n_items, std::uint64_t seed) {
  return generate_sliced_layout(w_star, h_star, n_items, seed).instance;
}

Instance sample_sliced_instance(int w_star, int h_min, int h_max, int n_items,
                                std::uint64_t seed) {
  require(h_min >= 1 && h_min <= h_max, "empty H* range");
  std::mt19937_64 rng(seed);
  const int h = uniform_int(rng, h_min, h_max);
  return generate_sliced_instance(w_star, h, n_items, rng());
}

}  // namespace rudu::pack
