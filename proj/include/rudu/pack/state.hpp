#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "rudu/pack/grid.hpp"
#include "rudu/pack/instance.hpp"

namespace rudu::pack {

struct Action {
  int item = 0;
  int x = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

struct PackOptions {
  int height = 0;               // virtual height H'; 0 means H' = W*
  bool adjacency_mask = false;  // restrict x to bin edges or next to occupied columns
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

/// Episode state: the occupancy grid plus which items are packed.
/// Copies are cheap apart from the grid rows; the instance is shared.
class PackState {
 public:
  static constexpr int kMaxItems = 64;

  PackState(std::shared_ptr<const Instance> instance, PackOptions options = {});
  PackState(const Instance& instance, PackOptions options = {});

  const Instance& instance() const { return *instance_; }
  std::shared_ptr<const Instance> shared_instance() const { return instance_; }
  const OccupancyGrid& grid() const { return grid_; }
  const PackOptions& options() const { return options_; }

  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  int item_count() const { return instance_->size(); }
  int action_space() const { return item_count() * width(); }
  int step_count() const { return step_; }

  bool packed(int item) const { return (packed_ >> item) & 1u; }
  std::uint64_t packed_mask() const { return packed_; }
  bool all_packed() const { return step_ == item_count(); }

  int action_index(const Action& a) const { return a.item * width() + a.x; }
  Action action_at(int index) const { return {index / width(), index % width()}; }

  bool is_legal(const Action& a) const;
  std::vector<Action> legal_actions() const;
  bool has_legal_action() const;
  /// Legal-action mask over the full item x column action space.
  std::vector<std::uint8_t> legal_mask() const;

  bool is_terminal() const { return all_packed() || !has_legal_action(); }
  bool is_dead() const { return !all_packed() && !has_legal_action(); }

  /// Places an item. Throws without mutating when the action is illegal.
  StepResult apply(const Action& a);

  /// h_star / H~ once every item is packed, 0 otherwise.
  double terminal_reward() const;
  int filled_height() const { return grid_.filled_height(); }
  Rational lower_bound() const { return h_star_; }

  /// (N + 1) x H' x W' binary planes: occupancy followed by one plane per
  /// item with unpacked items drawn as a w x h block at the bottom left.
  std::vector<double> encode() const;
  void encode_into(std::span<double> out) const;

 private:
  std::shared_ptr<const Instance> instance_;
  PackOptions options_;
  OccupancyGrid grid_;
  std::uint64_t packed_ = 0;
  int step_ = 0;
  Rational h_star_;
};

/// Functional form: returns the successor state without touching `state`.
std::tuple<PackState, double, bool> step(const PackState& state, const Action& action);

/// Packed area over W~ * H~; nullopt for dead or empty states.
std::optional<double> utilization(const PackState& state);

/// Replays an action sequence from a fresh state.
PackState replay(const Instance& instance, std::span<const Action> actions,
                 PackOptions options = {});

}  // namespace rudu::pack
