#include "sitcog/consumer_agent.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sitcog {

std::string to_string(Expectation e) {
  switch (e) {
    case Expectation::neutral: return "neutral";
    case Expectation::optimistic: return "optimistic";
    case Expectation::pessimistic: return "pessimistic";
    case Expectation::social_navigation: return "social_navigation";
  }
  return "unknown";
}

std::string to_string(Situation s) {
  switch (s) {
    case Situation::consume_locally: return "consume_locally";
    case Situation::interact_socially: return "interact_socially";
    case Situation::bored: return "bored";
    case Situation::dissatisfied: return "dissatisfied";
    case Situation::change_location: return "change_location";
    case Situation::change_values: return "change_values";
    case Situation::search_for_a_friend: return "search_for_a_friend";
  }
  return "unknown";
}

std::string to_string(Action a) {
  switch (a) {
    case Action::none: return "none";
    case Action::dissatisfied: return "dissatisfied";
    case Action::search_for_a_friend: return "search_for_a_friend";
    case Action::interact_socially: return "interact_socially";
    case Action::bored: return "bored";
    case Action::change_location: return "change_location";
    case Action::change_values: return "change_values";
    case Action::forage: return "forage";
    case Action::begin_consumption: return "begin_consumption";
    case Action::decline_product: return "decline_product";
    case Action::consume: return "consume";
    case Action::complete_consumption: return "complete_consumption";
    case Action::navigate: return "navigate";
  }
  return "unknown";
}

std::optional<Situation> SituationSet::top() const {
  for (auto s : kSituationPriority)
    if (contains(s)) return s;
  return std::nullopt;
}

World::World(RunConfig cfg, std::vector<ProductType> type_set, int n_consumers, RandomStream cycle_rng)
    : config(std::move(cfg)),
      types(std::move(type_set)),
      space(config.space.grid_width, config.space.grid_height, config.space.field_radius),
      network(n_consumers),
      rng(cycle_rng) {}

namespace {

double window_sum(const Consumer& c) {
  return std::accumulate(c.recent_utilities.begin(), c.recent_utilities.end(), 0.0);
}

// Moves one cell; a blocked move leaves the consumer in place.
bool move_to(World& world, Consumer& c, GridLocation to) {
  if (world.space.move_consumer(c.id, to) == MoveResult::rejected) return false;
  c.location = to;
  return true;
}

void random_step(World& world, Consumer& c) {
  const auto options = world.space.von_neumann_neighbors(c.location);
  move_to(world, c, options[world.rng.uniform_index(options.size())]);
}

// Greedy Manhattan step: the axis with the larger gap first, x on ties; falls
// back to the other axis when the first cell is occupied.
void step_toward(World& world, Consumer& c, GridLocation target) {
  const int dx = target.x - c.location.x, dy = target.y - c.location.y;
  if (dx == 0 && dy == 0) return;
  const GridLocation along_x{c.location.x + (dx > 0 ? 1 : -1), c.location.y};
  const GridLocation along_y{c.location.x, c.location.y + (dy > 0 ? 1 : -1)};
  const bool x_first = std::abs(dx) >= std::abs(dy);
  const GridLocation first = x_first ? along_x : along_y;
  const GridLocation second = x_first ? along_y : along_x;
  if (move_to(world, c, first)) return;
  if ((x_first ? dy : dx) != 0) move_to(world, c, second);
}

void schedule_remedy(World& world, Consumer& c) {
  if (c.next_remedy_changes_values) {
    c.change_values_pending = true;
  } else {
    const int reach = world.config.agent.relocation_radius;
    const auto span = static_cast<std::uint64_t>(2 * reach + 1);
    const int dx = static_cast<int>(world.rng.uniform_index(span)) - reach;
    const int dy = static_cast<int>(world.rng.uniform_index(span)) - reach;
    c.relocation = Relocation{world.space.clamp({c.location.x + dx, c.location.y + dy}), 2 * reach};
  }
  c.next_remedy_changes_values = !c.next_remedy_changes_values;
}

void abort_consumption(World& world, Consumer& c) {
  if (!c.consuming) return;
  world.products.at(static_cast<std::size_t>(c.consuming->instance)).state = ProductState::available;
  c.consuming.reset();
}

void end_navigation(Consumer& c) {
  c.navigation.reset();
  if (c.expectation == Expectation::social_navigation) c.expectation = Expectation::neutral;
}

Action on_dissatisfied(World& world, Consumer& c) {
  switch (c.expectation) {
    case Expectation::optimistic: c.expectation = Expectation::pessimistic; break;
    case Expectation::pessimistic: c.expectation = Expectation::optimistic; break;
    case Expectation::social_navigation: c.expectation = Expectation::neutral; break;
    case Expectation::neutral: break;
  }
  c.navigation.reset();
  c.relocation.reset();
  abort_consumption(world, c);
  c.experiences_since_dissatisfied = 0;
  ++c.dissatisfaction_count;
  schedule_remedy(world, c);
  return Action::dissatisfied;
}

Action on_bored(World& world, Consumer& c) {
  c.boredom_count = 0;
  schedule_remedy(world, c);
  return Action::bored;
}

Action on_change_location(World& world, Consumer& c) {
  auto& r = *c.relocation;
  step_toward(world, c, r.target);
  if (--r.steps_left <= 0 || c.location == r.target) c.relocation.reset();
  return Action::change_location;
}

Action on_change_values(World& world, Consumer& c) {
  const double p = world.config.agent.perturbation;
  for (auto& v : c.ideal) v = std::max(0.0, v + world.rng.uniform(-p, p));
  c.change_values_pending = false;
  c.declined_instance.reset();
  return Action::change_values;
}

Action navigate(World& world, Consumer& c) {
  auto& nav = *c.navigation;
  const GridLocation target = world.consumers.at(static_cast<std::size_t>(nav.target)).location;
  if (manhattan(c.location, target) > 1) {
    step_toward(world, c, target);
    --nav.steps_left;
  }
  if (manhattan(c.location, target) <= 1 || nav.steps_left <= 0) end_navigation(c);
  return Action::navigate;
}

Action forage(World& world, Consumer& c) {
  if (c.consuming) {
    if (--c.consuming->remaining <= 0) {
      complete_consumption(world, c.id);
      return Action::complete_consumption;
    }
    return Action::consume;
  }
  if (c.navigation) return navigate(world, c);

  if (const auto here = world.space.product_at(c.location)) {
    const auto& instance = world.products.at(static_cast<std::size_t>(*here));
    if (instance.state == ProductState::available && c.declined_instance != *here) {
      c.last_percept = perceive(c.perception, world.type_of(*here).signature);
      if (try_begin_consumption(world, c.id, *here)) return Action::begin_consumption;
      return Action::decline_product;
    }
  }
  // A declined product stops attracting this consumer until its values change.
  const auto next = world.space.ascend(c.location, c.declined_instance.value_or(-1));
  if (next == c.location)
    random_step(world, c);
  else
    move_to(world, c, next);
  return Action::forage;
}

}  // namespace

SituationSet evaluate_situations(const Consumer& c, const World& world) {
  const auto& p = world.config.agent;
  SituationSet s{Situation::consume_locally};
  if (c.boredom_count >= p.boredom_cycles) s.insert(Situation::bored);
  if (c.experiences_since_dissatisfied > 0 && window_sum(c) < 0.0) s.insert(Situation::dissatisfied);
  if (c.relocation) s.insert(Situation::change_location);
  if (c.change_values_pending) s.insert(Situation::change_values);
  if (world.social()) {
    const bool frustrated =
        c.dissatisfaction_count >= p.frustration_count || c.failed_search_count >= p.frustration_count;
    if (!c.consuming && frustrated) s.insert(Situation::interact_socially);
    if (world.network.degree(c.id) <= p.friend_degree_max &&
        world.network.mean_strength(c.id) < p.friend_strength_floor)
      s.insert(Situation::search_for_a_friend);
  }
  return s;
}

Action act(World& world, int id, const SituationSet& situations) {
  auto& c = world.consumers.at(static_cast<std::size_t>(id));
  const auto top = situations.top();
  if (!top) return Action::none;
  switch (*top) {
    case Situation::dissatisfied: return on_dissatisfied(world, c);
    case Situation::search_for_a_friend:
      referral(world.network, id, world.rng, world.config.network.referral_strength);
      return Action::search_for_a_friend;
    case Situation::interact_socially:
      interact_socially(world, id);
      return Action::interact_socially;
    case Situation::bored: return on_bored(world, c);
    case Situation::change_location:
      if (c.relocation) return on_change_location(world, c);
      return forage(world, c);
    case Situation::change_values: return on_change_values(world, c);
    case Situation::consume_locally: return forage(world, c);
  }
  return Action::none;
}

Action step_consumer(World& world, int id) {
  auto& c = world.consumers.at(static_cast<std::size_t>(id));
  if (!c.consuming) ++c.boredom_count;
  c.active_situations = evaluate_situations(c, world);
  c.last_action = act(world, id, c.active_situations);
  return c.last_action;
}

bool try_begin_consumption(World& world, int id, int instance) {
  auto& c = world.consumers.at(static_cast<std::size_t>(id));
  auto& product = world.products.at(static_cast<std::size_t>(instance));
  if (product.state != ProductState::available) return false;
  if (world.space.product_location(instance) != c.location)
    throw std::logic_error("consumer is not on the product's cell");
  const auto& type = world.type_of(instance);
  const double predicted = predicted_utility(c.attract, type.signature);
  const bool attractive = predicted >= c.attract.threshold;
  const bool close = valuation(c.ideal, type.signature) <= world.config.agent.max_valuation;
  if (!(attractive && close)) {
    // A rejected product is experience too: the threshold follows what was seen.
    if (!attractive) update_threshold(c.attract, predicted, world.config.cognition.threshold_rate);
    ++c.failed_search_count;
    c.declined_instance = instance;
    return false;
  }
  product.state = ProductState::being_consumed;
  c.consuming = Consumption{instance, world.config.agent.consumption_cycles, predicted};
  c.boredom_count = 0;
  return true;
}

double complete_consumption(World& world, int id) {
  auto& c = world.consumers.at(static_cast<std::size_t>(id));
  if (!c.consuming) throw std::logic_error("complete_consumption without a consumption in progress");
  const auto [instance, remaining, predicted] = *c.consuming;
  const auto& type = world.type_of(instance);
  const double u = type.utility;
  const auto& cfg = world.config;

  c.expectation = u >= predicted ? Expectation::optimistic : Expectation::pessimistic;
  learn_experience(c.attract, type.signature, u);
  c.perception.train_step(type.signature);
  update_threshold(c.attract, u, cfg.cognition.threshold_rate);
  if (u > 0.0)
    adjust_values(c.ideal, type.signature, cfg.agent.experiential_rate, AdjustDirection::toward);
  else if (u < 0.0)
    adjust_values(c.ideal, type.signature, cfg.agent.experiential_rate, AdjustDirection::away);
  if (u < predicted) ++c.dissatisfaction_count;

  c.recent_utilities.push_back(u);
  while (static_cast<int>(c.recent_utilities.size()) > cfg.agent.admiration_window) c.recent_utilities.pop_front();
  ++c.experiences_since_dissatisfied;
  ++c.units_consumed;
  c.utility_total += u;
  ++c.period_units;
  c.period_utility += u;
  ++world.consumption_events;

  c.consuming.reset();
  c.declined_instance.reset();
  world.pending_respawns.push_back(instance);
  return u;
}

void adjust_values(Signature& ideal, const Signature& target, double eta, AdjustDirection direction) {
  const double sign = direction == AdjustDirection::toward ? 1.0 : -1.0;
  for (std::size_t k = 0; k < ideal.size(); ++k)
    ideal[k] = std::max(0.0, ideal[k] + sign * eta * (target[k] - ideal[k]));
}

std::optional<double> admiration_score(const Consumer& c) {
  if (c.recent_utilities.empty()) return std::nullopt;
  return window_sum(c) / static_cast<double>(c.recent_utilities.size());
}

std::optional<NeighborLabels> categorize_neighbors(const Consumer& c, const TieGraph& network,
                                                   const std::vector<Consumer>& consumers) {
  const auto neighbors = network.neighbors(c.id);
  if (neighbors.empty()) return std::nullopt;
  NeighborLabels labels;
  double min_d = 0.0, max_d = 0.0, best_score = 0.0, worst_score = 0.0;
  for (int n : neighbors) {  // ascending ids, so strict comparisons keep the lower id
    const auto& other = consumers.at(static_cast<std::size_t>(n));
    const double d = valuation(c.ideal, other.ideal);
    if (labels.most_similar < 0 || d < min_d) {
      labels.most_similar = n;
      min_d = d;
    }
    if (labels.most_dissimilar < 0 || d > max_d) {
      labels.most_dissimilar = n;
      max_d = d;
    }
    if (const auto score = admiration_score(other)) {
      if (!labels.most_admired || *score > best_score) {
        labels.most_admired = n;
        best_score = *score;
      }
      if (!labels.least_admired || *score < worst_score) {
        labels.least_admired = n;
        worst_score = *score;
      }
    }
  }
  return labels;
}

std::optional<int> interact_socially(World& world, int id) {
  auto& c = world.consumers.at(static_cast<std::size_t>(id));
  c.dissatisfaction_count = 0;
  c.failed_search_count = 0;
  const auto labels = categorize_neighbors(c, world.network, world.consumers);
  if (!labels) return std::nullopt;
  const int target = labels->most_admired.value_or(labels->most_similar);
  const auto& other = world.consumers.at(static_cast<std::size_t>(target));
  if (c.next_social_is_approach) {
    c.expectation = Expectation::social_navigation;
    c.navigation = Navigation{target, world.config.agent.navigation_max_steps};
    c.relocation.reset();
  } else {
    adjust_values(c.ideal, other.ideal, world.config.agent.social_rate, AdjustDirection::toward);
    c.declined_instance.reset();
  }
  c.next_social_is_approach = !c.next_social_is_approach;
  world.network.strengthen(id, target, world.config.network.tie_strengthen);
  return target;
}

}  // namespace sitcog
