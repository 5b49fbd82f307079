#include "sitcog/experiment.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "sitcog/stats.h"

namespace sitcog {

namespace {

class Fnv {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffu;
      h_ *= 0x100000001b3ull;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  void add(std::span<const double> xs) {
    for (double x : xs) add(x);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

GridLocation random_cell(RandomStream& rng, int w, int h) {
  const int x = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(w)));
  const int y = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(h)));
  return {x, y};
}

template <typename Occupied>
GridLocation place(RandomStream& rng, const RunConfig& cfg, Occupied occupied, const char* what) {
  for (int attempt = 0; attempt < kPlacementRetries; ++attempt) {
    const auto cell = random_cell(rng, cfg.space.grid_width, cfg.space.grid_height);
    if (!occupied(cell)) return cell;
  }
  throw ConfigError(std::string("could not place every ") + what + " on a free cell (density too high)");
}

Signature mean_signature(std::span<const ProductType> types) {
  Signature m{};
  for (const auto& t : types)
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += t.signature[k];
  for (auto& v : m) v /= static_cast<double>(types.size());
  return m;
}

void strengthen_contacts(World& world) {
  const double delta = world.config.network.tie_strengthen;
  for (const auto& c : world.consumers) {
    for (const auto& cell : world.space.von_neumann_neighbors(c.location)) {
      const auto other = world.space.consumer_at(cell);
      if (other && *other > c.id) world.network.strengthen(c.id, *other, delta);
    }
  }
}

}  // namespace

World build_world(const RunConfig& config) {
  if (const auto bad = config.validate(); !bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg);
  }
  auto type_rng = substream(config.seed, kTypesStream);
  auto types = generate_type_set(config.products.n_types, config.products.min_type_distance, type_rng,
                                 config.products.type_attempts, config.products.utility_slope);

  World world(config, std::move(types), config.n_consumers, substream(config.seed, kCycleStream));
  auto& space = world.space;

  auto placement = substream(config.seed, kPlacementStream);
  for (int i = 0; i < config.n_products(); ++i) {
    const auto cell = place(placement, config, [&](GridLocation g) { return space.product_at(g).has_value(); },
                            "product");
    const int id = space.add_product(cell);
    world.products.push_back({id, i / config.products.replicas_per_type, ProductState::available});
  }

  auto som_rng = substream(config.seed, kSomStream);
  const auto schedule = config.som_schedule();
  auto conception_schedule = schedule;
  conception_schedule.radius0 = config.cognition.conception_radius0;
  const std::vector<double> lo(kSignatureSize, 0.0), hi(kSignatureSize, 2.0);
  std::vector<double> lo_u = lo, hi_u = hi;
  lo_u.push_back(-1.0);
  hi_u.push_back(1.0);

  const Signature ideal = mean_signature(world.types);
  for (int i = 0; i < config.n_consumers; ++i) {
    const auto cell = place(placement, config, [&](GridLocation g) { return space.consumer_at(g).has_value(); },
                            "consumer");
    Consumer c;
    c.id = space.add_consumer(cell);
    c.location = cell;
    c.ideal = ideal;
    c.perception = SelfOrganizingMap(config.cognition.perception_rows, config.cognition.perception_cols,
                                     kSignatureSize, schedule);
    c.perception.randomize(som_rng, lo, hi);
    SelfOrganizingMap conception(config.cognition.conception_nodes, 1, kConceptionDim, conception_schedule);
    conception.randomize(som_rng, lo_u, hi_u);
    c.attract = AttractivenessState{std::move(conception), config.cognition.initial_threshold};
    world.consumers.push_back(std::move(c));
  }

  auto net_rng = substream(config.seed, kNetworkStream);
  world.network = init_watts_strogatz(config.n_consumers, config.network.ws_degree, config.network.ws_rewire, net_rng,
                                      config.network.tie_initial);
  return world;
}

void prime_consumers(World& world) {
  for (auto& c : world.consumers) {
    for (const auto& t : world.types) {
      c.last_percept = perceive(c.perception, t.signature);
      if (c.attract.map.steps() > 0) (void)assess_attractiveness(c.attract, t.signature);
      c.perception.train_step(t.signature);
      learn_experience(c.attract, t.signature, t.utility);
    }
  }
}

World init_world(const RunConfig& config) {
  auto world = build_world(config);
  prime_consumers(world);
  return world;
}

std::uint64_t network_checksum(const TieGraph& network) {
  Fnv h;
  h.add(network.size());
  for (const auto& t : network.ties()) {
    h.add(t.a);
    h.add(t.b);
    h.add(t.strength);
  }
  return h.value();
}

std::uint64_t world_checksum(const World& world) {
  Fnv h;
  for (const auto& t : world.types) {
    h.add(t.type_id);
    h.add(t.topology.edge_count());
    h.add(t.signature);
    h.add(t.utility);
  }
  for (const auto& p : world.products) {
    const auto loc = world.space.product_location(p.id);
    h.add(p.type_id);
    h.add(loc.x);
    h.add(loc.y);
    h.add(static_cast<int>(p.state));
  }
  for (const auto& c : world.consumers) {
    h.add(c.location.x);
    h.add(c.location.y);
    h.add(c.ideal);
    h.add(c.perception.weights());
    h.add(c.attract.map.weights());
    h.add(c.attract.threshold);
  }
  h.add(network_checksum(world.network));
  return h.value();
}

std::optional<std::string> audit_world(const World& world) {
  const auto& space = world.space;
  if (space.consumer_count() != static_cast<int>(world.consumers.size())) return "consumer count drifted";
  if (space.product_count() != static_cast<int>(world.products.size())) return "product count drifted";
  for (const auto& p : world.products) {
    if (space.product_at(space.product_location(p.id)) != p.id) return "product cell mismatch";
  }
  for (const auto& c : world.consumers) {
    if (space.consumer_location(c.id) != c.location) return "consumer location mirror mismatch";
    if (space.consumer_at(c.location) != c.id) return "consumer cell mismatch";
    for (double v : c.ideal)
      if (!std::isfinite(v) || v < 0.0) return "ideal vector left the non-negative orthant";
    if (c.consuming) {
      const int inst = c.consuming->instance;
      if (world.products.at(static_cast<std::size_t>(inst)).state != ProductState::being_consumed)
        return "consumed product not marked";
      if (space.product_location(inst) != c.location) return "consumer left the product it consumes";
    }
  }
  return std::nullopt;
}

void run_cycle(World& world) {
  ++world.cycle;
  const auto& cfg = world.config;
  if (world.social()) world.network.decay_all(cfg.network.tie_decay, cfg.network.tie_floor);

  std::vector<int> order(world.consumers.size());
  std::iota(order.begin(), order.end(), 0);
  world.rng.shuffle(order.begin(), order.end());
  for (int id : order) step_consumer(world, id);

  for (int inst : world.pending_respawns) {
    world.products.at(static_cast<std::size_t>(inst)).state = ProductState::available;
    world.space.respawn_product(inst, world.rng, cfg.space.respawn_sigma);
  }
  world.pending_respawns.clear();

  if (world.social()) strengthen_contacts(world);
}

void fill_totals(PeriodSample& sample) {
  sample.total_units = 0;
  sample.total_utility = 0.0;
  for (const auto& c : sample.consumers) {
    sample.total_units += c.units;
    sample.total_utility += c.utility;
  }
}

RunResult run(const RunConfig& config, const CycleObserver& observer) {
  RunResult result;
  result.config = config;
  World world = init_world(config);
  result.types = world.types;
  try {
    result.fdc = type_set_fdc(world.types);
  } catch (const stats::DegenerateInput&) {
  }
  result.initial_checksum = world_checksum(world);
  result.initial_network_checksum = network_checksum(world.network);
  if (observer) observer(world);

  result.samples.reserve(static_cast<std::size_t>(config.cycles / config.sample_every));
  for (int cycle = 1; cycle <= config.cycles; ++cycle) {
    run_cycle(world);
    if (const auto why = audit_world(world)) throw InvariantViolation("cycle " + std::to_string(cycle) + ": " + *why);
    if (observer) observer(world);
    if (cycle % config.sample_every != 0) continue;
    PeriodSample s;
    s.cycle = cycle;
    s.product_count = world.space.product_count();
    s.consumers.reserve(world.consumers.size());
    for (auto& c : world.consumers) {
      s.consumers.push_back({c.period_units, c.period_utility, c.ideal});
      c.period_units = 0;
      c.period_utility = 0.0;
    }
    fill_totals(s);
    result.samples.push_back(std::move(s));
  }
  result.consumption_events = world.consumption_events;
  result.final_network_checksum = network_checksum(world.network);
  return result;
}

PairResult run_pair(std::uint64_t seed, const RunConfig& base) {
  RunConfig social = base;
  social.seed = seed;
  social.social = true;
  RunConfig nonsocial = social;
  nonsocial.social = false;

  if (world_checksum(init_world(social)) != world_checksum(init_world(nonsocial)))
    throw DeterminismFault("pair " + std::to_string(seed) + ": initial states differ", seed);

  PairResult pair{seed, run(social), run(nonsocial)};
  if (pair.social.initial_checksum != pair.nonsocial.initial_checksum)
    throw DeterminismFault("pair " + std::to_string(seed) + ": initial checksums differ", seed);
  return pair;
}

std::vector<PairResult> batch(int n_pairs, std::uint64_t seed_base, const RunConfig& base, int workers) {
  if (n_pairs < 1) throw std::invalid_argument("batch needs at least one pair");
  std::vector<PairResult> results(static_cast<std::size_t>(n_pairs));
  const auto seed_of = [&](int i) { return seed_base + static_cast<std::uint64_t>(i); };
  if (workers <= 1) {
    for (int i = 0; i < n_pairs; ++i) results[static_cast<std::size_t>(i)] = run_pair(seed_of(i), base);
    return results;
  }

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  int error_index = n_pairs;
  auto worker = [&] {
    for (int i = next++; i < n_pairs; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = run_pair(seed_of(i), base);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Report the lowest failing seed so the error is order-stable too.
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int w = 0; w < std::min(workers, n_pairs); ++w) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
  return results;
}

std::size_t value_coverage(std::span<const Signature> trajectory, double cell_width) {
  if (!(cell_width > 0.0)) throw std::invalid_argument("cell width must be positive");
  std::set<std::array<long long, kSignatureSize>> cells;
  for (const auto& s : trajectory) {
    std::array<long long, kSignatureSize> key{};
    for (std::size_t k = 0; k < key.size(); ++k) key[k] = static_cast<long long>(std::floor(s[k] / cell_width));
    cells.insert(key);
  }
  return cells.size();
}

double value_path_length(std::span<const Signature> trajectory) {
  double total = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) total += valuation(trajectory[i - 1], trajectory[i]);
  return total;
}

std::vector<Signature> trajectory(std::span<const PeriodSample> samples, int consumer) {
  std::vector<Signature> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.consumers.at(static_cast<std::size_t>(consumer)).ideal);
  return out;
}

RunMetrics run_metrics(std::span<const PeriodSample> samples, const AnalysisParams& analysis) {
  if (samples.size() < 2) throw std::invalid_argument("run metrics need at least two samples");
  RunMetrics m;
  long units = 0;
  double utility = 0.0;
  for (const auto& s : samples) {
    units += s.total_units;
    utility += s.total_utility;
  }
  const auto n = static_cast<double>(samples.size());
  m.units_per_period = static_cast<double>(units) / n;
  m.utility_per_period = utility / n;
  if (units > 0) m.utility_per_unit = utility / static_cast<double>(units);

  const auto n_consumers = samples.front().consumers.size();
  double coverage = 0.0, path = 0.0;
  for (std::size_t c = 0; c < n_consumers; ++c) {
    const auto traj = trajectory(samples, static_cast<int>(c));
    coverage += static_cast<double>(value_coverage(traj, analysis.coverage_cell_width));
    path += value_path_length(traj);
  }
  if (n_consumers > 0) {
    m.mean_coverage = coverage / static_cast<double>(n_consumers);
    m.mean_path_length = path / static_cast<double>(n_consumers);
  }

  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    if (s.cycle <= analysis.transient_cycles) continue;
    xs.push_back(static_cast<double>(s.cycle));
    ys.push_back(static_cast<double>(s.total_units));
  }
  if (xs.size() >= 2) {
    const auto fit = stats::linreg(xs, ys);
    m.trend_slope = fit.slope;
    m.trend_p = fit.slope_p;
  }
  return m;
}

}  // namespace sitcog
