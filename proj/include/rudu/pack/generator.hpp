#pragma once

#include <cstdint>
#include <vector>

#include "rudu/pack/instance.hpp"

namespace rudu::pack {

/// Where each sliced item sat in the original rectangle.
struct SliceOrigin {
  int x = 0;
  int y = 0;
};

struct SlicedLayout {
  Instance instance;
  int h_star = 0;
  std::vector<SliceOrigin> origins;  // indexed by item id
};

/// Cuts a W* x H* rectangle into `n_items` pieces by repeated random
/// guillotine cuts. Each round picks a splittable piece uniformly, an axis
/// uniformly among axes of length >= 2, then an interior cut position.
/// The first half keeps the piece's slot and the second half is appended.
SlicedLayout generate_sliced_layout(int w_star, int h_star, int n_items,
                                    std::uint64_t seed);

Instance generate_sliced_instance(int w_star, int h_star, int n_items,
                                  std::uint64_t seed);

/// Sliced instance with H* drawn uniformly from [h_min, h_max].
Instance sample_sliced_instance(int w_star, int h_min, int h_max, int n_items,
                                std::uint64_t seed);

/// Derives a per-item seed from a base seed and an index (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace rudu::pack
