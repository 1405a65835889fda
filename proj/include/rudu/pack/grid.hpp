#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rudu::pack {

/// Column offset plus the (not necessarily contiguous) rows an item occupies.
struct Placement {
  int item = 0;
  int x = 0;
  int w = 0;
  std::vector<int> rows;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Binary H' x W' occupancy plane. Row 0 is the bottom, column 0 the left.
/// Each row is a bitmask, so W' is limited to 64 columns.
class OccupancyGrid {
 public:
  static constexpr int kMaxWidth = 64;

  OccupancyGrid() = default;
  OccupancyGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool cell(int row, int col) const { return (rows_[row] >> col) & 1u; }
  std::uint64_t row_bits(int row) const { return rows_[row]; }
  std::span<const std::uint64_t> row_masks() const { return rows_; }

  /// True when columns [x, x + w) of `row` are all free.
  bool span_free(int row, int x, int w) const { return (rows_[row] & span_mask(x, w)) == 0; }

  /// True when column `col` holds at least one occupied cell.
  bool column_occupied(int col) const;

  /// 1 + highest occupied row, 0 when empty.
  int filled_height() const;
  int occupied_cells() const;

  /// Marks columns [x, x + w) on each row as occupied and records the
  /// placement. Throws if any target cell is already taken.
  void place(int item, int x, int w, std::span<const int> rows);

  /// Sets individual cells; used to build fixtures. Does not record a placement.
  void set_cell(int row, int col);

  const std::vector<Placement>& placements() const { return placements_; }

  static std::uint64_t span_mask(int x, int w) {
    const std::uint64_t ones = w >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1);
    return ones << x;
  }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<Placement> placements_;
};

/// Bottom-up physical row allocation: the `h` lowest rows whose span
/// [x, x + w) is entirely free. Rows need not be adjacent. Returns nullopt
/// when fewer than `h` such rows exist below the grid height.
std::optional<std::vector<int>> allocate_rows(const OccupancyGrid& grid, int x, int w, int h);

/// Allocation-free feasibility check equivalent to allocate_rows().has_value().
bool can_allocate(const OccupancyGrid& grid, int x, int w, int h);

/// Highest row allocate_rows would return, or -1 when infeasible.
int allocation_top(const OccupancyGrid& grid, int x, int w, int h);

}  // namespace rudu::pack
