#include "rudu/pack/state.hpp"

#include <algorithm>

#include "rudu/error.hpp"

namespace rudu::pack {

PackState::PackState(std::shared_ptr<const Instance> instance, PackOptions options)
    : instance_(std::move(instance)), options_(options) {
  require(instance_ != nullptr, "state needs an instance");
  if (options_.height <= 0) options_.height = instance_->w_star;
  instance_->validate(options_.height);
  require(instance_->size() <= kMaxItems, "too many items");
  grid_ = OccupancyGrid(instance_->w_star, options_.height);
  h_star_ = h_star(*instance_);
}

PackState::PackState(const Instance& instance, PackOptions options)
    : PackState(std::make_shared<const Instance>(instance), options) {}

bool PackState::is_legal(const Action& a) const {
  if (a.item < 0 || a.item >= item_count() || packed(a.item)) return false;
  const Item& item = instance_->items[a.item];
  if (a.x < 0 || a.x + item.w > width()) return false;
  if (options_.adjacency_mask) {
    const bool at_edge = a.x == 0 || a.x + item.w == width();
    const bool beside = (a.x > 0 && grid_.column_occupied(a.x - 1)) ||
                        (a.x + item.w < width() && grid_.column_occupied(a.x + item.w));
    if (!at_edge && !beside) return false;
  }
  return can_allocate(grid_, a.x, item.w, item.h);
}

std::vector<Action> PackState::legal_actions() const {
  std::vector<Action> out;
  for (const auto& item : instance_->items) {
    if (packed(item.id)) continue;
    for (int x = 0; x + item.w <= width(); ++x) {
      const Action a{item.id, x};
      if (is_legal(a)) out.push_back(a);
    }
  }
  return out;
}

bool PackState::has_legal_action() const {
  for (const auto& item : instance_->items) {
    if (packed(item.id)) continue;
    for (int x = 0; x + item.w <= width(); ++x) {
      if (is_legal({item.id, x})) return true;
    }
  }
  return false;
}

std::vector<std::uint8_t> PackState::legal_mask() const {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(action_space()), 0);
  for (const auto& a : legal_actions()) mask[action_index(a)] = 1;
  return mask;
}

StepResult PackState::apply(const Action& a) {
  if (!is_legal(a)) fail(ErrorKind::invalid_argument, "illegal action");
  const Item& item = instance_->items[a.item];
  const auto rows = allocate_rows(grid_, a.x, item.w, item.h);
  grid_.place(a.item, a.x, item.w, *rows);
  packed_ |= std::uint64_t{1} << a.item;
  ++step_;
  if (all_packed()) return {terminal_reward(), true};
  return {0.0, !has_legal_action()};
}

double PackState::terminal_reward() const {
  if (!all_packed()) return 0.0;
  return h_star_.to_double() / static_cast<double>(grid_.filled_height());
}

std::vector<double> PackState::encode() const {
  std::vector<double> out(static_cast<std::size_t>(item_count() + 1) * height() * width());
  encode_into(out);
  return out;
}

void PackState::encode_into(std::span<double> out) const {
  const int h = height();
  const int w = width();
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  require(out.size() == plane * static_cast<std::size_t>(item_count() + 1),
          "encode buffer has the wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (grid_.cell(r, c)) out[static_cast<std::size_t>(r) * w + c] = 1.0;
    }
  }
  for (const auto& item : instance_->items) {
    if (packed(item.id)) continue;
    double* base = out.data() + plane * static_cast<std::size_t>(item.id + 1);
    for (int r = 0; r < item.h; ++r) {
      std::fill_n(base + static_cast<std::size_t>(r) * w, item.w, 1.0);
    }
  }
}

std::tuple<PackState, double, bool> step(const PackState& state, const Action& action) {
  PackState next = state;
  const auto result = next.apply(action);
  return {std::move(next), result.reward, result.done};
}

std::optional<double> utilization(const PackState& state) {
  if (!state.all_packed() || state.filled_height() == 0) return std::nullopt;
  return static_cast<double>(state.instance().total_area()) /
         (static_cast<double>(state.width()) * state.filled_height());
}

PackState replay(const Instance& instance, std::span<const Action> actions, PackOptions options) {
  PackState state(instance, options);
  for (const auto& a : actions) state.apply(a);
  return state;
}

}  // namespace rudu::pack
