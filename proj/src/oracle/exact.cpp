#include "rudu/oracle/exact.hpp"

#include <algorithm>
#include <unordered_set>

#include "rudu/error.hpp"

namespace rudu::oracle {

namespace {

struct StateKey {
  std::vector<std::uint64_t> rows;
  std::uint64_t packed;

  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const noexcept {
    std::uint64_t h = key.packed * 0x9E3779B97F4A7C15ull;
    for (auto r : key.rows) h = (h ^ r) * 0x100000001B3ull + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

class CappedSearch {
 public:
  CappedSearch(const pack::Instance& instance, int cap, const OracleLimits& limits,
               std::uint64_t& nodes)
      : instance_(instance), cap_(cap), limits_(limits), nodes_(nodes) {
    // items with equal shape are interchangeable; only the lowest unpacked id branches
    for (const auto& a : instance.items) {
      int twin = -1;
      for (const auto& b : instance.items) {
        if (b.id < a.id && b.w == a.w && b.h == a.h) twin = b.id;
      }
      previous_twin_.push_back(twin);
    }
  }

  bool run(std::vector<pack::Action>& witness) {
    pack::PackState root(instance_, {cap_, limits_.adjacency_mask});
    return dfs(root, witness);
  }

 private:
  bool dfs(const pack::PackState& state, std::vector<pack::Action>& path) {
    if (state.all_packed()) return true;
    if (++nodes_ > limits_.node_limit) {
      fail(ErrorKind::budget_exceeded, "exact search node limit reached");
    }

    long long remaining = 0;
    for (const auto& item : instance_.items) {
      if (!state.packed(item.id)) remaining += item.area();
    }
    const long long free_cells =
        static_cast<long long>(cap_) * state.width() - state.grid().occupied_cells();
    if (remaining > free_cells) return false;

    StateKey key{{state.grid().row_masks().begin(), state.grid().row_masks().end()},
                 state.packed_mask()};
    if (failed_.contains(key)) return false;

    for (const auto& item : instance_.items) {
      if (state.packed(item.id)) continue;
      const int twin = previous_twin_[item.id];
      if (twin >= 0 && !state.packed(twin)) continue;
      for (int x = 0; x + item.w <= state.width(); ++x) {
        const pack::Action a{item.id, x};
        if (!state.is_legal(a)) continue;
        pack::PackState next = state;
        next.apply(a);
        path.push_back(a);
        if (dfs(next, path)) return true;
        path.pop_back();
      }
    }
    failed_.insert(std::move(key));
    return false;
  }

  const pack::Instance& instance_;
  int cap_;
  const OracleLimits& limits_;
  std::uint64_t& nodes_;
  std::vector<int> previous_twin_;
  std::unordered_set<StateKey, StateKeyHash> failed_;
};

}  // namespace

OracleResult solve_exact(const pack::Instance& instance, int h_cap, OracleLimits limits) {
  require(h_cap >= 1, "h_cap must be >= 1");
  instance.validate(h_cap);

  const auto bound = pack::h_star(instance);
  const int lower = static_cast<int>(std::max<long long>(bound.ceil(), instance.max_item_height()));

  OracleResult result;
  for (int cap = lower; cap <= h_cap; ++cap) {
    std::vector<pack::Action> witness;
    CappedSearch search(instance, cap, limits, result.nodes_expanded);
    if (search.run(witness)) {
      // the grid height in the replay is the cap, so H~ <= cap; minimality of
      // the previous caps makes it exactly cap
      result.min_height = cap;
      result.witness = std::move(witness);
      return result;
    }
  }
  fail(ErrorKind::infeasible, "no complete packing fits under the height cap");
}

}  // namespace rudu::oracle
