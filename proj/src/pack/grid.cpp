#include "rudu/pack/grid.hpp"

#include <bit>
#include <string>

#include "rudu/error.hpp"

namespace rudu::pack {

OccupancyGrid::OccupancyGrid(int width, int height)
    : width_(width), height_(height), rows_(static_cast<std::size_t>(height), 0) {
  require(width >= 1 && width <= kMaxWidth, "grid width must be in [1, 64]");
  require(height >= 1, "grid height must be >= 1");
}

bool OccupancyGrid::column_occupied(int col) const {
  const std::uint64_t bit = std::uint64_t{1} << col;
  for (auto row : rows_) {
    if (row & bit) return true;
  }
  return false;
}

int OccupancyGrid::filled_height() const {
  for (int r = height_ - 1; r >= 0; --r) {
    if (rows_[r] != 0) return r + 1;
  }
  return 0;
}

int OccupancyGrid::occupied_cells() const {
  int count = 0;
  for (auto row : rows_) count += std::popcount(row);
  return count;
}

void OccupancyGrid::place(int item, int x, int w, std::span<const int> rows) {
  require(x >= 0 && w >= 1 && x + w <= width_, "placement leaves the bin horizontally");
  const std::uint64_t mask = span_mask(x, w);
  int previous = -1;
  for (int r : rows) {
    require(r > previous && r < height_, "placement rows must be increasing and inside the bin");
    require((rows_[r] & mask) == 0, "placement overlaps row " + std::to_string(r));
    previous = r;
  }
  for (int r : rows) rows_[r] |= mask;
  placements_.push_back({item, x, w, std::vector<int>(rows.begin(), rows.end())});
}

void OccupancyGrid::set_cell(int row, int col) {
  require(row >= 0 && row < height_ && col >= 0 && col < width_, "cell outside the grid");
  rows_[row] |= std::uint64_t{1} << col;
}

std::optional<std::vector<int>> allocate_rows(const OccupancyGrid& grid, int x, int w, int h) {
  const std::uint64_t mask = OccupancyGrid::span_mask(x, w);
  const auto rows = grid.row_masks();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(h));
  for (int r = 0; r < grid.height() && static_cast<int>(out.size()) < h; ++r) {
    if ((rows[r] & mask) == 0) out.push_back(r);
  }
  if (static_cast<int>(out.size()) < h) return std::nullopt;
  return out;
}

int allocation_top(const OccupancyGrid& grid, int x, int w, int h) {
  const std::uint64_t mask = OccupancyGrid::span_mask(x, w);
  const auto rows = grid.row_masks();
  int found = 0;
  for (int r = 0; r < grid.height(); ++r) {
    if ((rows[r] & mask) == 0 && ++found == h) return r;
  }
  return -1;
}

bool can_allocate(const OccupancyGrid& grid, int x, int w, int h) {
  return allocation_top(grid, x, w, h) >= 0;
}

}  // namespace rudu::pack
