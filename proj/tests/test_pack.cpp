#include <algorithm>
#include <random>

#include "doctest.h"
#include "rudu/error.hpp"
#include "rudu/pack/generator.hpp"
#include "rudu/pack/state.hpp"

using namespace rudu;
using namespace rudu::pack;

namespace {

// Reference scan: every row whose span is free, lowest first, truncated to h.
std::optional<std::vector<int>> brute_force_rows(const OccupancyGrid& g, int x, int w, int h) {
  std::vector<int> rows;
  for (int r = 0; r < g.height() && static_cast<int>(rows.size()) < h; ++r) {
    bool free = true;
    for (int c = x; c < x + w; ++c) free = free && !g.cell(r, c);
    if (free) rows.push_back(r);
  }
  if (static_cast<int>(rows.size()) < h) return std::nullopt;
  return rows;
}

int count_plane(const std::vector<double>& planes, int plane, int h, int w) {
  int n = 0;
  for (int i = 0; i < h * w; ++i) n += planes[static_cast<std::size_t>(plane) * h * w + i] != 0.0;
  return n;
}

}  // namespace

TEST_CASE("h_star is an exact rational lower bound") {
  CHECK(h_star(generate_sliced_instance(15, 7, 10, 3)) == Rational(7));
  CHECK(h_star(make_instance(15, {{3, 5}})) == Rational(5));
  CHECK(h_star(make_instance(5, {{5, 2}, {5, 2}})) == Rational(4));
  const auto r = h_star(make_instance(4, {{3, 1}, {2, 1}}));
  CHECK(r == Rational(5, 4));
  CHECK_FALSE(r.is_integer());
  CHECK(r.ceil() == 2);
}

TEST_CASE("sliced generator") {
  const auto one = generate_sliced_instance(15, 7, 1, 99);
  REQUIRE(one.size() == 1);
  CHECK(one.items[0].w == 15);
  CHECK(one.items[0].h == 7);

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = generate_sliced_instance(15, 7, 10, seed);
    CHECK(inst.size() == 10);
    CHECK(inst.total_area() == 105);
    for (const auto& it : inst.items) CHECK((it.w >= 1 && it.h >= 1));
  }
  CHECK(generate_sliced_instance(8, 8, 5, 7) == generate_sliced_instance(8, 8, 5, 7));
  CHECK_THROWS_AS(generate_sliced_instance(2, 2, 5, 0), Error);
}

TEST_CASE("sliced generator (4, 4, 3, seed 42) replays its cut sequence") {
  const auto layout = generate_sliced_layout(4, 4, 3, 42);

  // Replay the cuts independently from the same stream.
  struct P { int x, y, w, h; };
  std::mt19937_64 rng(42);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<P> pieces{{0, 0, 4, 4}};
  for (int cut = 1; cut < 3; ++cut) {
    std::vector<int> cand;
    for (int i = 0; i < static_cast<int>(pieces.size()); ++i)
      if (pieces[i].w >= 2 || pieces[i].h >= 2) cand.push_back(i);
    const int idx = cand[pick(0, static_cast<int>(cand.size()) - 1)];
    P a = pieces[idx];
    P b = a;
    const bool vertical = (a.w >= 2 && a.h >= 2) ? pick(0, 1) == 0 : a.w >= 2;
    if (vertical) {
      const int at = pick(1, a.w - 1);
      a.w = at; b.x += at; b.w -= at;
    } else {
      const int at = pick(1, a.h - 1);
      a.h = at; b.y += at; b.h -= at;
    }
    pieces[idx] = a;
    pieces.push_back(b);
  }
  REQUIRE(layout.instance.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(layout.instance.items[i].w == pieces[i].w);
    CHECK(layout.instance.items[i].h == pieces[i].h);
    CHECK(layout.origins[i].x == pieces[i].x);
    CHECK(layout.origins[i].y == pieces[i].y);
  }

  // Frozen shapes: two horizontal cuts.
  CHECK(layout.instance.items[0] == Item{0, 4, 1});
  CHECK(layout.instance.items[1] == Item{1, 4, 1});
  CHECK(layout.instance.items[2] == Item{2, 4, 2});

  // The origins tile the rectangle exactly once.
  int cover[4][4] = {};
  for (int i = 0; i < 3; ++i)
    for (int dy = 0; dy < layout.instance.items[i].h; ++dy)
      for (int dx = 0; dx < layout.instance.items[i].w; ++dx)
        ++cover[layout.origins[i].y + dy][layout.origins[i].x + dx];
  for (auto& row : cover)
    for (int c : row) CHECK(c == 1);
}

TEST_CASE("allocate_rows fixtures") {
  OccupancyGrid empty(5, 5);
  CHECK(allocate_rows(empty, 0, 3, 2) == std::vector<int>{0, 1});

  OccupancyGrid floor(5, 5);
  for (int c = 0; c < 5; ++c) floor.set_cell(0, c);
  CHECK(allocate_rows(floor, 1, 2, 2) == std::vector<int>{1, 2});

  OccupancyGrid gap(5, 5);
  gap.set_cell(1, 2);
  CHECK(allocate_rows(gap, 1, 3, 2) == std::vector<int>{0, 2});
  CHECK(allocation_top(gap, 1, 3, 2) == 2);

  OccupancyGrid full(2, 2);
  full.set_cell(0, 0);
  full.set_cell(1, 0);
  CHECK_FALSE(allocate_rows(full, 0, 1, 1).has_value());
  CHECK(allocation_top(full, 0, 1, 1) == -1);
}

TEST_CASE("allocate_rows equals a brute-force scan on random 8x8 grids") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    OccupancyGrid g(8, 8);
    const double density = std::uniform_real_distribution<double>(0.0, 0.7)(rng);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (std::bernoulli_distribution(density)(rng)) g.set_cell(r, c);
    const int w = std::uniform_int_distribution<int>(1, 8)(rng);
    const int h = std::uniform_int_distribution<int>(1, 8)(rng);
    const int x = std::uniform_int_distribution<int>(0, 8 - w)(rng);
    const auto expected = brute_force_rows(g, x, w, h);
    REQUIRE(allocate_rows(g, x, w, h) == expected);
    REQUIRE(can_allocate(g, x, w, h) == expected.has_value());
    REQUIRE(allocation_top(g, x, w, h) == (expected ? expected->back() : -1));
  }
}

TEST_CASE("legal actions") {
  const auto inst = make_instance(5, {{3, 2}, {2, 1}});
  PackState s(inst);
  const auto actions = s.legal_actions();
  CHECK(actions.size() == 7);
  for (int x = 0; x <= 2; ++x) CHECK(std::count(actions.begin(), actions.end(), Action{0, x}) == 1);
  for (int x = 0; x <= 3; ++x) CHECK(std::count(actions.begin(), actions.end(), Action{1, x}) == 1);

  s.apply({1, 0});
  for (const auto& a : s.legal_actions()) CHECK(a.item != 1);

  // One free row left while the remaining item needs two.
  const auto tall = make_instance(3, {{3, 2}, {3, 2}});
  PackState t(tall, {.height = 3});
  t.apply({0, 0});
  CHECK(t.legal_actions().empty());
  CHECK(t.is_dead());
  CHECK(t.is_terminal());
  CHECK(t.terminal_reward() == 0.0);
  CHECK_FALSE(utilization(t).has_value());
}

TEST_CASE("adjacency mask") {
  const auto inst = make_instance(6, {{2, 1}, {1, 1}});
  PackState s(inst, {.adjacency_mask = true});
  // Empty grid: only the two bin edges qualify.
  std::vector<Action> expected{{0, 0}, {0, 4}, {1, 0}, {1, 5}};
  CHECK(s.legal_actions() == expected);
  s.apply({0, 0});
  const auto next = s.legal_actions();
  CHECK(std::count(next.begin(), next.end(), Action{1, 2}) == 1);  // touches column 1
  CHECK(std::count(next.begin(), next.end(), Action{1, 3}) == 0);
}

TEST_CASE("step rewards") {
  const auto inst = make_instance(4, {{2, 2}, {2, 2}});
  PackState s(inst);
  auto [mid, r0, done0] = step(s, {0, 0});
  CHECK(r0 == 0.0);
  CHECK_FALSE(done0);
  CHECK(s.step_count() == 0);
  auto [end, r1, done1] = step(mid, {1, 2});
  CHECK(done1);
  CHECK(r1 == 1.0);
  CHECK(utilization(end) == 1.0);
}

TEST_CASE("reward 0.7 and utilization 0.7") {
  // Area 105 over width 15 gives H* = 7; stacking forces H~ = 9.
  const auto inst = make_instance(15, {{15, 6}, {5, 3}});
  REQUIRE(h_star(inst) == Rational(7));
  PackState s(inst, {.height = 15});
  s.apply({0, 0});
  const auto [fin, r, done] = step(s, {1, 0});
  CHECK(done);
  CHECK(fin.filled_height() == 9);
  CHECK(r == doctest::Approx(7.0 / 9.0));

  const auto flat = make_instance(15, {{15, 3}, {15, 3}, {15, 1}});
  PackState f(flat, {.height = 15});
  for (int i = 0; i < 3; ++i) f.apply({i, 0});
  CHECK(f.terminal_reward() == 1.0);

  // A thin item on the floor lifts the full-width slab; area 105, H~ = 10.
  const auto seventy = make_instance(15, {{15, 5}, {6, 4}, {6, 1}});
  REQUIRE(seventy.total_area() == 105);
  REQUIRE(h_star(seventy) == Rational(7));
  PackState v(seventy, {.height = 15});
  v.apply({2, 0});
  v.apply({0, 0});
  v.apply({1, 0});
  CHECK(v.filled_height() == 10);
  CHECK(v.terminal_reward() == doctest::Approx(0.7));
  CHECK(*utilization(v) == doctest::Approx(0.7));
}

TEST_CASE("illegal actions throw without mutating") {
  const auto inst = make_instance(3, {{2, 1}, {1, 1}});
  PackState s(inst);
  CHECK_THROWS_AS(s.apply({0, 2}), Error);
  CHECK(s.step_count() == 0);
  s.apply({0, 0});
  CHECK_THROWS_AS(s.apply({0, 0}), Error);
  CHECK(s.step_count() == 1);
}

TEST_CASE("state encoding") {
  const auto inst = make_instance(5, {{3, 2}, {2, 1}, {1, 4}, {2, 2}});
  PackState s(inst, {.height = 8});
  const int h = s.height();
  const int w = s.width();
  auto planes = s.encode();
  REQUIRE(planes.size() == static_cast<std::size_t>(5 * h * w));
  CHECK(count_plane(planes, 0, h, w) == 0);
  for (int i = 0; i < 4; ++i) CHECK(count_plane(planes, i + 1, h, w) == inst.items[i].area());

  s.apply({3, 0});
  planes = s.encode();
  CHECK(count_plane(planes, 4, h, w) == 0);
  CHECK(count_plane(planes, 0, h, w) == 4);

  s.apply({0, 2});
  s.apply({1, 0});
  s.apply({2, 4});
  REQUIRE(s.all_packed());
  planes = s.encode();
  for (int p = 1; p <= 4; ++p) CHECK(count_plane(planes, p, h, w) == 0);
}

TEST_CASE("random rollouts keep area conservation and replay determinism") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = generate_sliced_instance(8, std::uniform_int_distribution<int>(2, 8)(rng), 6, rng());
    PackState s(inst);
    std::vector<Action> taken;
    long long packed_area = 0;
    while (!s.is_terminal()) {
      const auto legal = s.legal_actions();
      const auto a = legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
      const auto before = s.grid();
      s.apply(a);
      taken.push_back(a);
      packed_area += inst.items[a.item].area();
      // Cells only flip from 0 to 1.
      for (int r = 0; r < s.height(); ++r) REQUIRE((before.row_bits(r) & ~s.grid().row_bits(r)) == 0);
      REQUIRE(s.grid().occupied_cells() == packed_area);
      const auto planes = s.encode();
      REQUIRE(count_plane(planes, 0, s.height(), s.width()) == packed_area);
    }
    for (const auto& p : s.grid().placements()) {
      REQUIRE(static_cast<int>(p.rows.size()) == inst.items[p.item].h);
      REQUIRE(p.x + p.w <= s.width());
    }
    if (s.all_packed()) {
      const double r = s.terminal_reward();
      REQUIRE(r > 0.0);
      REQUIRE(r <= 1.0);
      REQUIRE((r == 1.0) == (h_star(inst) == Rational(s.filled_height())));
    }
    const auto again = replay(inst, taken);
    REQUIRE(again.grid() == s.grid());
  }
}

TEST_CASE("instance validation") {
  auto inst = make_instance(4, {{5, 1}});
  CHECK_THROWS_AS(inst.validate(4), Error);
  inst = make_instance(4, {{2, 5}});
  CHECK_THROWS_AS(inst.validate(4), Error);
  inst = make_instance(4, {{2, 2}});
  CHECK_NOTHROW(inst.validate(4));
  inst.items[0].id = 3;
  CHECK_THROWS_AS(inst.validate(4), Error);
}
