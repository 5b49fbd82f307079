#include <doctest.h>

#include <cmath>
#include <vector>

#include "sitcog/config.h"
#include "sitcog/consumer_agent.h"
#include "sitcog/experiment.h"

using namespace sitcog;

namespace {

RunConfig small_config(bool social, std::uint64_t seed = 3) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.social = social;
  cfg.n_consumers = 10;
  cfg.space.grid_width = 40;
  cfg.space.grid_height = 40;
  return cfg;
}

// Moves the instance under consumer `id`.
void put_product_under(World& w, int instance, int id) {
  w.space.move_product(instance, w.consumers.at(static_cast<std::size_t>(id)).location);
}

// The product already under the consumer, else instance 0.
int free_instance(const World& w, int id) {
  const auto loc = w.consumers.at(static_cast<std::size_t>(id)).location;
  if (const auto here = w.space.product_at(loc)) return *here;
  return 0;
}

double dist(const Signature& a, const Signature& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

Consumer& consumer(World& w, int id) { return w.consumers.at(static_cast<std::size_t>(id)); }

}  // namespace

TEST_CASE("situation set and priority") {
  SituationSet s{Situation::consume_locally, Situation::bored, Situation::search_for_a_friend,
                 Situation::interact_socially};
  CHECK(s.size() == 4);
  CHECK(s.top() == Situation::search_for_a_friend);
  s.erase(Situation::search_for_a_friend);
  CHECK(s.top() == Situation::interact_socially);
  s.insert(Situation::dissatisfied);
  CHECK(s.top() == Situation::dissatisfied);
  CHECK_FALSE(SituationSet{}.top().has_value());
  SituationSet all;
  for (auto x : kSituationPriority) all.insert(x);
  CHECK(all.size() == kSituationCount);
}

TEST_CASE("a fresh consumer only consumes locally") {
  for (bool social : {false, true}) {
    auto w = init_world(small_config(social));
    for (const auto& c : w.consumers)
      CHECK(evaluate_situations(c, w) == SituationSet{Situation::consume_locally});
  }
}

TEST_CASE("rule conditions") {
  auto w = init_world(small_config(true));
  auto& c = consumer(w, 0);

  SUBCASE("weak sparse ties call for a friend") {
    for (int n : w.network.neighbors(0)) w.network.remove_tie(0, n);
    w.network.set_tie(0, 5, 0.1);
    w.network.set_tie(0, 6, 0.1);
    CHECK(evaluate_situations(c, w).contains(Situation::search_for_a_friend));
    w.network.set_tie(0, 7, 0.1);
    CHECK_FALSE(evaluate_situations(c, w).contains(Situation::search_for_a_friend));
  }
  SUBCASE("frustration triggers social interaction unless consuming") {
    c.dissatisfaction_count = w.config.agent.frustration_count;
    CHECK(evaluate_situations(c, w).contains(Situation::interact_socially));
    c.consuming = Consumption{0, 3, 0.0};
    CHECK_FALSE(evaluate_situations(c, w).contains(Situation::interact_socially));
    c.consuming.reset();
    c.dissatisfaction_count = 0;
    c.failed_search_count = w.config.agent.frustration_count;
    CHECK(evaluate_situations(c, w).contains(Situation::interact_socially));
  }
  SUBCASE("boredom") {
    c.boredom_count = w.config.agent.boredom_cycles - 1;
    CHECK_FALSE(evaluate_situations(c, w).contains(Situation::bored));
    c.boredom_count += 1;
    CHECK(evaluate_situations(c, w).contains(Situation::bored));
  }
  SUBCASE("dissatisfaction follows the recent utility window") {
    c.recent_utilities = {0.3, -0.5};
    c.experiences_since_dissatisfied = 1;
    CHECK(evaluate_situations(c, w).contains(Situation::dissatisfied));
    c.recent_utilities = {0.6, -0.5};
    CHECK_FALSE(evaluate_situations(c, w).contains(Situation::dissatisfied));
  }
}

TEST_CASE("non-social consumers never look at the network") {
  auto w = init_world(small_config(false));
  auto& c = consumer(w, 0);
  for (int n : w.network.neighbors(0)) w.network.remove_tie(0, n);
  c.dissatisfaction_count = 99;
  const auto s = evaluate_situations(c, w);
  CHECK_FALSE(s.contains(Situation::search_for_a_friend));
  CHECK_FALSE(s.contains(Situation::interact_socially));
}

TEST_CASE("search for a friend outranks social interaction") {
  auto w = init_world(small_config(true));
  const auto before = w.network.tie_count();
  const auto a = act(w, 0, SituationSet{Situation::consume_locally, Situation::interact_socially,
                                        Situation::search_for_a_friend});
  CHECK(a == Action::search_for_a_friend);
  CHECK(w.network.tie_count() == before + 1);
}

TEST_CASE("dissatisfaction reverses expectations and stops consumption") {
  auto w = init_world(small_config(false));
  auto& c = consumer(w, 1);
  const int inst = free_instance(w, 1);
  put_product_under(w, inst, 1);
  c.ideal = w.type_of(inst).signature;
  c.attract.threshold = -1.0;
  REQUIRE(try_begin_consumption(w, 1, inst));
  c.expectation = Expectation::optimistic;
  c.recent_utilities = {-0.5};
  c.experiences_since_dissatisfied = 1;
  const auto s = evaluate_situations(c, w);
  REQUIRE(s.top() == Situation::dissatisfied);
  CHECK(act(w, 1, s) == Action::dissatisfied);
  CHECK(c.expectation == Expectation::pessimistic);
  CHECK_FALSE(c.consuming.has_value());
  CHECK(w.products[static_cast<std::size_t>(inst)].state == ProductState::available);
  CHECK(c.dissatisfaction_count == 1);
  // First remedy relocates, the next changes values.
  CHECK(c.relocation.has_value());
  CHECK_FALSE(c.change_values_pending);

  c.expectation = Expectation::neutral;
  c.experiences_since_dissatisfied = 1;
  act(w, 1, evaluate_situations(c, w));
  CHECK(c.expectation == Expectation::neutral);
  CHECK(c.change_values_pending);
  CHECK_FALSE(c.relocation.has_value());
}

TEST_CASE("consumption gate") {
  auto w = init_world(small_config(false));
  auto& c = consumer(w, 2);
  const int inst = free_instance(w, 2);
  put_product_under(w, inst, 2);
  const auto& sig = w.type_of(inst).signature;

  SUBCASE("identical ideal with a floor threshold begins") {
    c.ideal = sig;
    c.attract.threshold = -1.0;
    CHECK(try_begin_consumption(w, 2, inst));
    CHECK(w.products[static_cast<std::size_t>(inst)].state == ProductState::being_consumed);
    REQUIRE(c.consuming.has_value());
    CHECK(c.consuming->remaining == w.config.agent.consumption_cycles);
    CHECK(c.failed_search_count == 0);

    SUBCASE("a product in use is treated as absent") {
      auto& other = consumer(w, 3);
      CHECK_FALSE(try_begin_consumption(w, 3, inst));
      CHECK(other.failed_search_count == 0);
      CHECK_FALSE(other.declined_instance.has_value());
    }
  }
  SUBCASE("too far from the ideal declines") {
    c.ideal = sig;
    c.ideal[0] += 2.0 * w.config.agent.max_valuation;
    c.attract.threshold = -1.0;
    CHECK_FALSE(try_begin_consumption(w, 2, inst));
    CHECK(c.failed_search_count == 1);
    CHECK(c.declined_instance == inst);
    CHECK_FALSE(c.consuming.has_value());
  }
}

TEST_CASE("completion updates expectation, learning, values and bookkeeping") {
  auto w = init_world(small_config(false));
  auto& c = consumer(w, 4);
  const int inst = free_instance(w, 4);
  put_product_under(w, inst, 4);
  const auto& type = w.type_of(inst);
  c.ideal = type.signature;
  c.attract.threshold = -1.0;
  REQUIRE(try_begin_consumption(w, 4, inst));
  const double predicted = c.consuming->predicted_utility;
  const auto steps_before = c.attract.map.steps();
  const double threshold_before = c.attract.threshold;

  const double u = complete_consumption(w, 4);
  CHECK(u == type.utility);
  CHECK(c.expectation == (u >= predicted ? Expectation::optimistic : Expectation::pessimistic));
  CHECK(c.attract.map.steps() == steps_before + 1);
  CHECK(c.attract.threshold == doctest::Approx(threshold_before + 0.1 * (u - threshold_before)));
  CHECK(c.units_consumed == 1);
  CHECK(c.recent_utilities.back() == u);
  CHECK(w.pending_respawns == std::vector<int>{inst});
  CHECK(w.consumption_events == 1);
  CHECK_FALSE(c.consuming.has_value());
  CHECK(w.products.size() == 50);
}

TEST_CASE("zero utility against zero prediction counts as optimistic") {
  auto w = init_world(small_config(false));
  auto& c = consumer(w, 5);
  const int inst = free_instance(w, 5);
  put_product_under(w, inst, 5);
  w.types[static_cast<std::size_t>(w.products[static_cast<std::size_t>(inst)].type_id)].utility = 0.0;
  c.ideal = w.type_of(inst).signature;
  c.attract.threshold = -1.0;
  REQUIRE(try_begin_consumption(w, 5, inst));
  c.consuming->predicted_utility = 0.0;
  const auto ideal = c.ideal;
  complete_consumption(w, 5);
  CHECK(c.expectation == Expectation::optimistic);
  CHECK(c.ideal == ideal);  // u = 0 leaves values alone
}

TEST_CASE("value adjustment recurrence") {
  const Signature target = {1.0, 0.5, 2.0, 0.0, 1.5, 0.7};
  Signature ideal = {0.2, 1.1, 0.9, 0.4, 0.3, 1.0};
  auto same = ideal;
  adjust_values(same, target, 0.0, AdjustDirection::toward);
  CHECK(same == ideal);
  auto full = ideal;
  adjust_values(full, target, 1.0, AdjustDirection::toward);
  CHECK(full == target);

  double d = dist(ideal, target);
  for (int i = 0; i < 20; ++i) {
    adjust_values(ideal, target, 0.2, AdjustDirection::toward);
    const double next = dist(ideal, target);
    CHECK(next == doctest::Approx(0.8 * d).epsilon(1e-12));
    d = next;
  }
  Signature away = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  adjust_values(away, target, 0.5, AdjustDirection::away);
  for (std::size_t k = 0; k < away.size(); ++k) {
    const double expected = std::max(0.0, 0.1 - 0.5 * (target[k] - 0.1));
    CHECK(away[k] == doctest::Approx(expected));
    CHECK(away[k] >= 0.0);
  }
}

TEST_CASE("neighbour categorization") {
  auto w = init_world(small_config(true));
  for (int n : w.network.neighbors(0)) w.network.remove_tie(0, n);
  auto& c = consumer(w, 0);
  c.ideal.fill(1.0);
  CHECK_FALSE(categorize_neighbors(c, w.network, w.consumers).has_value());

  SUBCASE("one neighbour takes every label") {
    w.network.set_tie(0, 4, 0.5);
    consumer(w, 4).recent_utilities = {0.2};
    const auto labels = categorize_neighbors(c, w.network, w.consumers);
    REQUIRE(labels.has_value());
    CHECK(*labels == NeighborLabels{4, 4, 4, 4});
  }
  SUBCASE("two neighbours by exhaustive comparison") {
    w.network.set_tie(0, 3, 0.5);
    w.network.set_tie(0, 7, 0.5);
    auto& a = consumer(w, 3);
    auto& b = consumer(w, 7);
    a.ideal.fill(1.5);
    b.ideal.fill(0.2);
    a.recent_utilities = {-0.3, 0.1};
    b.recent_utilities = {0.4};
    const double da = dist(c.ideal, a.ideal), db = dist(c.ideal, b.ideal);
    const double sa = (-0.3 + 0.1) / 2, sb = 0.4;
    const auto labels = categorize_neighbors(c, w.network, w.consumers);
    REQUIRE(labels.has_value());
    CHECK(labels->most_similar == (da <= db ? 3 : 7));
    CHECK(labels->most_dissimilar == (da >= db ? 3 : 7));
    CHECK(labels->most_admired == (sa >= sb ? 3 : 7));
    CHECK(labels->least_admired == (sa <= sb ? 3 : 7));
  }
  SUBCASE("equal distances go to the lower id") {
    w.network.set_tie(0, 8, 0.5);
    w.network.set_tie(0, 2, 0.5);
    consumer(w, 8).ideal.fill(2.0);
    consumer(w, 2).ideal.fill(2.0);
    const auto labels = categorize_neighbors(c, w.network, w.consumers);
    CHECK(labels->most_similar == 2);
    CHECK(labels->most_dissimilar == 2);
    CHECK_FALSE(labels->most_admired.has_value());
  }
}

TEST_CASE("social interaction is one neighbour at a time") {
  auto w = init_world(small_config(true));
  for (int n : w.network.neighbors(0)) w.network.remove_tie(0, n);
  auto& c = consumer(w, 0);
  c.ideal.fill(1.0);
  CHECK_FALSE(interact_socially(w, 0).has_value());

  w.network.set_tie(0, 1, 0.5);
  w.network.set_tie(0, 2, 0.5);
  consumer(w, 1).ideal.fill(0.2);
  consumer(w, 1).recent_utilities = {0.1};
  consumer(w, 2).ideal.fill(1.8);
  consumer(w, 2).recent_utilities = {0.9};
  c.dissatisfaction_count = 7;

  const double before = dist(c.ideal, consumer(w, 2).ideal);
  const auto chosen = interact_socially(w, 0);
  CHECK(chosen == 2);
  CHECK(dist(c.ideal, consumer(w, 2).ideal) == doctest::Approx(0.8 * before));
  CHECK(dist(c.ideal, consumer(w, 2).ideal) < before);
  CHECK(consumer(w, 1).ideal == Signature{0.2, 0.2, 0.2, 0.2, 0.2, 0.2});
  CHECK(c.dissatisfaction_count == 0);
  CHECK(*w.network.strength(0, 2) == doctest::Approx(0.6));
  CHECK(*w.network.strength(0, 1) == 0.5);

  // Next interaction is a spatial approach.
  const auto ideal = c.ideal;
  CHECK(interact_socially(w, 0) == 2);
  CHECK(c.ideal == ideal);
  CHECK(c.expectation == Expectation::social_navigation);
  REQUIRE(c.navigation.has_value());
  CHECK(c.navigation->target == 2);

  // Identical ideals: influence changes nothing.
  auto w2 = init_world(small_config(true));
  for (int n : w2.network.neighbors(0)) w2.network.remove_tie(0, n);
  w2.network.set_tie(0, 1, 0.5);
  consumer(w2, 1).ideal = consumer(w2, 0).ideal;
  const auto same = consumer(w2, 0).ideal;
  interact_socially(w2, 0);
  CHECK(consumer(w2, 0).ideal == same);
}

TEST_CASE("stepping is deterministic and keeps ideals valid") {
  auto trace = [](bool social) {
    auto w = init_world(small_config(social, 8));
    std::vector<Action> actions;
    for (int t = 0; t < 400; ++t) {
      run_cycle(w);
      for (const auto& c : w.consumers) {
        actions.push_back(c.last_action);
        for (double v : c.ideal) {
          CHECK(std::isfinite(v));
          CHECK(v >= 0.0);
        }
      }
    }
    return actions;
  };
  for (bool social : {false, true}) CHECK(trace(social) == trace(social));
}
