#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "sitcog/cognition.h"
#include "sitcog/config.h"
#include "sitcog/consumption_space.h"
#include "sitcog/product_model.h"
#include "sitcog/rng.h"
#include "sitcog/social_network.h"

namespace sitcog {

enum class Expectation { neutral, optimistic, pessimistic, social_navigation };

std::string to_string(Expectation e);

enum class Situation : std::uint8_t {
  consume_locally,
  interact_socially,
  bored,
  dissatisfied,
  change_location,
  change_values,
  search_for_a_friend,
};

inline constexpr int kSituationCount = 7;

// Rule priority, highest first.
inline constexpr std::array<Situation, kSituationCount> kSituationPriority = {
    Situation::dissatisfied,     Situation::search_for_a_friend, Situation::interact_socially,
    Situation::bored,            Situation::change_location,     Situation::change_values,
    Situation::consume_locally,
};

std::string to_string(Situation s);

class SituationSet {
 public:
  SituationSet() = default;
  SituationSet(std::initializer_list<Situation> items) {
    for (auto s : items) insert(s);
  }
  void insert(Situation s) { bits_ |= bit(s); }
  void erase(Situation s) { bits_ &= static_cast<std::uint8_t>(~bit(s)); }
  bool contains(Situation s) const { return (bits_ & bit(s)) != 0; }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }
  // Highest-priority member.
  std::optional<Situation> top() const;
  bool operator==(const SituationSet&) const = default;

 private:
  static std::uint8_t bit(Situation s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }
  std::uint8_t bits_ = 0;
};

enum class ProductState { available, being_consumed };

struct ProductInstance {
  int id = 0;
  int type_id = 0;
  ProductState state = ProductState::available;
  bool operator==(const ProductInstance&) const = default;
};

struct Consumption {
  int instance = 0;
  int remaining = 0;
  double predicted_utility = 0.0;
  bool operator==(const Consumption&) const = default;
};

struct Navigation {
  int target = 0;  // consumer id
  int steps_left = 0;
  bool operator==(const Navigation&) const = default;
};

struct Relocation {
  GridLocation target;
  int steps_left = 0;
  bool operator==(const Relocation&) const = default;
};

enum class Action {
  none,
  dissatisfied,
  search_for_a_friend,
  interact_socially,
  bored,
  change_location,
  change_values,
  forage,
  begin_consumption,
  decline_product,
  consume,
  complete_consumption,
  navigate,
};

std::string to_string(Action a);

struct Consumer {
  int id = 0;
  GridLocation location;  // mirror of the space's record
  Signature ideal{};
  SelfOrganizingMap perception;
  AttractivenessState attract;
  Expectation expectation = Expectation::neutral;
  SituationSet active_situations;
  int boredom_count = 0;
  int dissatisfaction_count = 0;
  int failed_search_count = 0;
  std::optional<Consumption> consuming;
  std::optional<Navigation> navigation;
  std::optional<Relocation> relocation;
  bool change_values_pending = false;
  // Alternation toggles.
  bool next_remedy_changes_values = false;
  bool next_social_is_approach = false;
  // Last product this consumer declined; cleared when its values change.
  std::optional<int> declined_instance;
  std::deque<double> recent_utilities;  // last W realized utilities
  int experiences_since_dissatisfied = 0;
  std::optional<Percept> last_percept;
  long units_consumed = 0;
  double utility_total = 0.0;
  int period_units = 0;
  double period_utility = 0.0;
  Action last_action = Action::none;
};

// Everything a single run mutates. Owned by that run.
struct World {
  RunConfig config;
  std::vector<ProductType> types;
  ConsumptionSpace space;
  std::vector<ProductInstance> products;
  std::vector<Consumer> consumers;
  TieGraph network;
  RandomStream rng;  // cycle-loop stream
  long cycle = 0;
  long consumption_events = 0;
  std::vector<int> pending_respawns;

  World(RunConfig cfg, std::vector<ProductType> type_set, int n_consumers, RandomStream cycle_rng);

  const ProductType& type_of(int instance) const {
    return types.at(static_cast<std::size_t>(products.at(static_cast<std::size_t>(instance)).type_id));
  }
  bool social() const { return config.social; }
};

SituationSet evaluate_situations(const Consumer& c, const World& world);

// Evaluates situations and performs exactly one primary action.
Action step_consumer(World& world, int id);

// Fires the highest-priority active situation.
Action act(World& world, int id, const SituationSet& situations);

bool try_begin_consumption(World& world, int id, int instance);
double complete_consumption(World& world, int id);

enum class AdjustDirection { toward, away };

// toward: ideal += eta (target - ideal); away: ideal -= eta (target - ideal);
// components clamped at zero.
void adjust_values(Signature& ideal, const Signature& target, double eta, AdjustDirection direction);

struct NeighborLabels {
  int most_similar = -1;
  int most_dissimilar = -1;
  std::optional<int> most_admired;  // needs neighbours with experience
  std::optional<int> least_admired;
  bool operator==(const NeighborLabels&) const = default;
};

// Mean of the consumer's recent realized utilities; empty without experience.
std::optional<double> admiration_score(const Consumer& c);

// Empty when c has no ties.
std::optional<NeighborLabels> categorize_neighbors(const Consumer& c, const TieGraph& network,
                                                   const std::vector<Consumer>& consumers);

// One neighbour (most admired, else most similar) influences c. Returns the
// neighbour, or empty when c has no ties.
std::optional<int> interact_socially(World& world, int id);

}  // namespace sitcog
