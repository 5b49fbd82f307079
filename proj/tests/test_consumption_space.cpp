#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "sitcog/consumption_space.h"
#include "sitcog/rng.h"

using namespace sitcog;

namespace {

double brute_field(GridLocation c, const std::vector<GridLocation>& products, int radius) {
  double best = 0.0;
  for (auto p : products)
    best = std::max(best, std::max(0.0, 1.0 - static_cast<double>(manhattan(c, p)) / radius));
  return best;
}

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("von Neumann neighbours are in bounds and ordered N, E, S, W") {
  ConsumptionSpace space(10, 8, 3);
  const auto inner = space.von_neumann_neighbors({4, 4});
  REQUIRE(inner.size() == 4);
  CHECK(inner[0] == GridLocation{4, 3});
  CHECK(inner[1] == GridLocation{5, 4});
  CHECK(inner[2] == GridLocation{4, 5});
  CHECK(inner[3] == GridLocation{3, 4});
  CHECK(space.von_neumann_neighbors({0, 0}).size() == 2);
  CHECK(space.von_neumann_neighbors({9, 7}).size() == 2);
  CHECK(space.von_neumann_neighbors({0, 4}).size() == 3);
  CHECK(space.von_neumann_neighbors({5, 7}).size() == 3);
}

TEST_CASE("consumer moves respect single occupancy") {
  ConsumptionSpace space(10, 10, 3);
  const int a = space.add_consumer({2, 2});
  const int b = space.add_consumer({3, 2});
  CHECK(space.move_consumer(a, {2, 3}) == MoveResult::accepted);
  CHECK(space.consumer_location(a) == GridLocation{2, 3});
  CHECK(space.consumer_at({2, 3}) == a);
  CHECK_FALSE(space.consumer_at({2, 2}).has_value());
  CHECK(space.move_consumer(a, {2, 3}) == MoveResult::accepted);
  CHECK(space.move_consumer(b, {3, 3}) == MoveResult::accepted);
  CHECK(space.move_consumer(a, {3, 3}) == MoveResult::rejected);
  CHECK(space.consumer_location(a) == GridLocation{2, 3});
  CHECK_THROWS(space.move_consumer(a, {5, 5}));
  CHECK_THROWS(space.add_consumer({3, 3}));
  // Consumers and products may share a cell.
  space.add_product({2, 3});
  CHECK(space.product_at({2, 3}).has_value());
  CHECK(space.audit());
}

TEST_CASE("field equals the max-composed linear decay on every cell") {
  auto rng = substream(11, "placement");
  const int w = 30, h = 25, r = 6;
  std::vector<GridLocation> products;
  for (int i = 0; i < 7; ++i)
    products.push_back({static_cast<int>(rng.uniform_index(w)), static_cast<int>(rng.uniform_index(h))});
  const auto field = rebuild_field(w, h, r, products);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) CHECK(field.at({x, y}) == brute_field({x, y}, products, r));
  for (auto p : products) CHECK(field.at(p) == 1.0);
  const auto lone = rebuild_field(w, h, r, std::vector<GridLocation>{{0, 0}});
  CHECK(lone.at({3, 3}) == 0.0);
  CHECK(lone.at({6, 0}) == 0.0);
  CHECK(lone.at({5, 0}) > 0.0);
}

TEST_CASE("greedy ascent reaches a product within the starting distance") {
  auto rng = substream(12, "placement");
  const int n = 20, r = 8;
  for (int trial = 0; trial < 5; ++trial) {
    ConsumptionSpace space(n, n, r);
    std::vector<GridLocation> products;
    while (products.size() < 4) {
      GridLocation p{static_cast<int>(rng.uniform_index(n)), static_cast<int>(rng.uniform_index(n))};
      if (space.product_at(p)) continue;
      space.add_product(p);
      products.push_back(p);
    }
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        GridLocation c{x, y};
        if (space.field_at(c) <= 0.0) continue;
        int nearest = 1 << 20;
        for (auto p : products) nearest = std::min(nearest, manhattan(c, p));
        int steps = 0;
        while (!space.product_at(c) && steps <= nearest) {
          const auto next = space.ascend(c);
          if (next == c) break;
          c = next;
          ++steps;
        }
        CHECK(space.product_at(c).has_value());
        CHECK(steps <= nearest);
      }
    }
  }
}

TEST_CASE("ascent and descent tie-breaks") {
  ConsumptionSpace empty(10, 10, 4);
  CHECK(empty.ascend({5, 5}) == GridLocation{5, 5});
  CHECK(empty.descend({5, 5}) == GridLocation{5, 5});

  ConsumptionSpace east(10, 10, 4);
  east.add_product({6, 5});
  CHECK(east.ascend({5, 5}) == GridLocation{6, 5});
  // N, S and W tie at distance 2; north wins.
  CHECK(east.descend({5, 5}) == GridLocation{5, 4});

  // Products due north and due east at equal distance: enumerate the
  // neighbour values and take the first maximum in N, E, S, W order.
  ConsumptionSpace tie(12, 12, 6);
  tie.add_product({5, 2});
  tie.add_product({8, 5});
  const GridLocation from{5, 5};
  GridLocation expected = from;
  double best = tie.field_at(from);
  for (auto d : kDirections) {
    const auto n = step(from, d);
    if (tie.field_at(n) > best) {
      best = tie.field_at(n);
      expected = n;
    }
  }
  CHECK(expected == GridLocation{5, 4});
  CHECK(tie.ascend(from) == expected);

  // Ignoring the product underfoot lets a consumer climb elsewhere.
  ConsumptionSpace two(20, 20, 6);
  const int here = two.add_product({5, 5});
  two.add_product({9, 5});
  CHECK(two.ascend({5, 5}) == GridLocation{5, 5});
  CHECK(two.ascend({5, 5}, here) == GridLocation{6, 5});
  CHECK(two.field_without({5, 5}, here) == doctest::Approx(1.0 - 4.0 / 6.0));
}

TEST_CASE("incremental field updates equal a full rebuild after respawns") {
  ConsumptionSpace space(60, 60, 8);
  auto place = substream(13, "placement");
  while (space.product_count() < 25) {
    GridLocation p{static_cast<int>(place.uniform_index(60)), static_cast<int>(place.uniform_index(60))};
    if (!space.product_at(p)) space.add_product(p);
  }
  auto rng = substream(13, "cycle");
  for (int i = 0; i < 2000; ++i) {
    space.respawn_product(static_cast<int>(rng.uniform_index(25)), rng, 10.0);
    if (i % 97 == 0) {
      const auto rebuilt = rebuild_field(60, 60, 8, space.product_locations());
      CHECK(rebuilt == space.field());
    }
  }
  CHECK(rebuild_field(60, 60, 8, space.product_locations()) == space.field());
  CHECK(space.audit());
}

TEST_CASE("respawn stays in bounds and never stacks products") {
  ConsumptionSpace space(165, 165, 12);
  auto place = substream(14, "placement");
  while (space.product_count() < 50) {
    GridLocation p{static_cast<int>(place.uniform_index(165)), static_cast<int>(place.uniform_index(165))};
    if (!space.product_at(p)) space.add_product(p);
  }
  auto rng = substream(14, "cycle");
  for (int i = 0; i < 10000; ++i) {
    const int id = static_cast<int>(rng.uniform_index(50));
    const auto res = space.respawn_product(id, rng, 10.0);
    CHECK(space.in_bounds(res.location));
    CHECK(space.product_at(res.location) == id);
  }
  CHECK(space.audit());
  CHECK(space.product_count() == 50);
}

TEST_CASE("zero spread respawns in place, or at the nearest free cell when probing") {
  ConsumptionSpace space(20, 20, 4);
  const int a = space.add_product({10, 10});
  auto rng = substream(15, "cycle");
  CHECK(space.respawn_product(a, rng, 0.0).location == GridLocation{10, 10});

  ConsumptionSpace crowded(20, 20, 4);
  const int c = crowded.add_product({0, 0});
  crowded.add_product({19, 19});
  for (int k = 0; k < 100; ++k) {
    auto r = substream(static_cast<std::uint64_t>(k), "cycle");
    // A huge sigma clamps to the corners, one of which is held.
    const auto res = crowded.respawn_product(c, r, 1e6);
    CHECK(crowded.in_bounds(res.location));
    CHECK(crowded.product_at(res.location) == c);
  }
  // Probe order from a held cell: nearest ring first, N before W.
  CHECK(crowded.nearest_product_free({19, 19}) == GridLocation{19, 18});
}

TEST_CASE("respawn offsets follow a rounded normal (Kolmogorov-Smirnov, alpha 0.01)") {
  const double sigma = 10.0;
  const int n = 10000;
  ConsumptionSpace space(1001, 1001, 2);
  const int id = space.add_product({500, 500});
  auto rng = substream(16, "cycle");
  std::map<int, int> counts;
  for (int i = 0; i < n; ++i) {
    const auto res = space.respawn_product(id, rng, sigma);
    CHECK(res.redraws == 0);
    ++counts[res.dx];
    space.move_product(id, {500, 500});
  }
  // Rounded offsets take integer values k with P(X <= k) = Phi((k + 0.5) / sigma).
  double cum = 0.0, d = 0.0;
  for (int k = -60; k <= 60; ++k) {
    const double before = cum / n;
    cum += counts.count(k) ? counts[k] : 0;
    const double model_before = phi((k - 0.5) / sigma);
    const double model = phi((k + 0.5) / sigma);
    d = std::max({d, std::fabs(cum / n - model), std::fabs(before - model_before)});
  }
  CHECK(cum == n);
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("respawn trace is deterministic") {
  auto trace = [] {
    ConsumptionSpace space(50, 50, 5);
    space.add_product({10, 10});
    space.add_product({40, 40});
    auto rng = substream(17, "cycle");
    std::vector<GridLocation> out;
    for (int i = 0; i < 200; ++i) out.push_back(space.respawn_product(i % 2, rng, 10.0).location);
    return out;
  };
  CHECK(trace() == trace());
}
