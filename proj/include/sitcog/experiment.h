#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sitcog/config.h"
#include "sitcog/consumer_agent.h"

namespace sitcog {

// Named substreams derived from the master seed. The social flag never
// touches the first four, so both members of a pair start identical.
inline constexpr const char* kTypesStream = "types";
inline constexpr const char* kPlacementStream = "placement";
inline constexpr const char* kSomStream = "som";
inline constexpr const char* kNetworkStream = "network";
inline constexpr const char* kCycleStream = "cycle";

inline constexpr int kPlacementRetries = 1000;

// Types, placements, ideals, untrained SOMs and network; no priming.
World build_world(const RunConfig& config);
// Exposes every consumer to each type once, in type_id order.
void prime_consumers(World& world);
// build_world followed by prime_consumers.
World init_world(const RunConfig& config);

// FNV-1a over everything a pair must share at cycle 0. Excludes the social flag.
std::uint64_t world_checksum(const World& world);
std::uint64_t network_checksum(const TieGraph& network);

// Cheap per-cycle consistency check; empty when everything holds.
std::optional<std::string> audit_world(const World& world);

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// One full cycle: decay, shuffled agent steps, respawns, contact ties.
void run_cycle(World& world);

struct ConsumerSample {
  int units = 0;
  double utility = 0.0;
  Signature ideal{};
  bool operator==(const ConsumerSample&) const = default;
};

struct PeriodSample {
  long cycle = 0;
  std::vector<ConsumerSample> consumers;
  long total_units = 0;
  double total_utility = 0.0;
  int product_count = 0;
  bool operator==(const PeriodSample&) const = default;
};

// Recomputes the aggregates from the per-consumer fields, in id order.
void fill_totals(PeriodSample& sample);

struct RunResult {
  RunConfig config;
  std::vector<ProductType> types;
  std::optional<double> fdc;  // empty for a degenerate type set
  std::uint64_t initial_checksum = 0;
  std::uint64_t initial_network_checksum = 0;
  std::uint64_t final_network_checksum = 0;
  long consumption_events = 0;
  std::vector<PeriodSample> samples;
};

using CycleObserver = std::function<void(const World&)>;

RunResult run(const RunConfig& config, const CycleObserver& observer = {});

struct DeterminismFault : std::runtime_error {
  DeterminismFault(const std::string& what, std::uint64_t seed) : std::runtime_error(what), seed(seed) {}
  std::uint64_t seed;
};

struct PairResult {
  std::uint64_t seed = 0;
  RunResult social;
  RunResult nonsocial;
};

PairResult run_pair(std::uint64_t seed, const RunConfig& base);

// Seeds seed_base + i. workers <= 1 runs sequentially; results are in seed order either way.
std::vector<PairResult> batch(int n_pairs, std::uint64_t seed_base, const RunConfig& base, int workers = 1);

std::size_t value_coverage(std::span<const Signature> trajectory, double cell_width);
double value_path_length(std::span<const Signature> trajectory);

// Sampled ideal vectors of one consumer.
std::vector<Signature> trajectory(std::span<const PeriodSample> samples, int consumer);

struct RunMetrics {
  double units_per_period = 0.0;
  double utility_per_period = 0.0;
  std::optional<double> utility_per_unit;  // empty when nothing was consumed
  double mean_coverage = 0.0;
  double mean_path_length = 0.0;
  double trend_slope = 0.0;
  std::optional<double> trend_p;  // empty with fewer than 3 post-transient samples
};

RunMetrics run_metrics(std::span<const PeriodSample> samples, const AnalysisParams& analysis);
inline RunMetrics run_metrics(const RunResult& r) { return run_metrics(r.samples, r.config.analysis); }

}  // namespace sitcog
