#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "sitcog/csv.h"
#include "sitcog/experiment.h"
#include "sitcog/experiment_io.h"

using namespace sitcog;

namespace {

struct Common {
  std::string config_file;
};

RunConfig load_config(const Common& common) {
  RunConfig cfg;
  if (!common.config_file.empty()) apply_config_file(cfg, common.config_file);
  return cfg;
}

void check_config(const RunConfig& cfg) {
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  const auto bad = cfg.validate();
  if (bad.empty()) return;
  std::string msg = "invalid configuration, offending keys:";
  for (const auto& k : bad) msg += " " + k;
  throw ConfigError(msg);
}

int cmd_gen_types(const Common& common, std::uint64_t seed, int count, std::optional<double> min_dist,
                  const std::string& out) {
  auto cfg = load_config(common);
  cfg.products.n_types = count;
  if (min_dist) cfg.products.min_type_distance = *min_dist;
  auto rng = substream(seed, kTypesStream);
  std::vector<ProductType> types;
  try {
    types = generate_type_set(count, cfg.products.min_type_distance, rng, cfg.products.type_attempts,
                              cfg.products.utility_slope);
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << " [constraint min_type_distance=" << csv::format(cfg.products.min_type_distance)
              << " too large; achieved " << e.achieved << "]\n";
    return 1;
  }
  csv::write_atomic(out, types_csv(types));

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < types.size(); ++i)
    for (std::size_t j = i + 1; j < types.size(); ++j) {
      const double d = valuation(types[i].signature, types[j].signature);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      sum += d;
      ++pairs;
    }
  std::cout << "types=" << types.size();
  if (pairs > 0)
    std::cout << " pairwise_min=" << csv::format(lo) << " pairwise_mean=" << csv::format(sum / pairs)
              << " pairwise_max=" << csv::format(hi);
  std::cout << "\n";
  return 0;
}

int cmd_landscape(const Common& common, std::uint64_t seed, int samples, const std::string& out) {
  const auto cfg = load_config(common);
  if (samples < 2) throw CLI::ValidationError("--samples", "needs at least 2 samples");
  auto rng = substream(seed, kTypesStream);
  std::vector<ProductType> types;
  types.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    types.push_back(make_product_type(i, random_topology(rng), cfg.products.utility_slope));
  const auto analysis = analyze_landscape(types);
  std::optional<double> fdc;
  try {
    fdc = stats::fdc(analysis.utilities, analysis.distances);
  } catch (const stats::DegenerateInput& e) {
    std::cerr << "degenerate landscape: " << e.what() << "\n";
  }
  csv::write_atomic(out, landscape_csv(types, analysis, fdc));
  std::cout << "samples=" << samples << " maxima=" << analysis.maxima.size()
            << " fdc=" << (fdc ? csv::format(*fdc) : std::string(kUndefined)) << "\n";
  return 0;
}

int cmd_run(const Common& common, std::uint64_t seed, std::optional<int> cycles, bool social, const std::string& out,
            const std::string& dump_world, const std::string& dump_network) {
  auto cfg = load_config(common);
  cfg.seed = seed;
  cfg.social = social;
  if (cycles) cfg.cycles = *cycles;
  check_config(cfg);

  std::ofstream world_out, network_out;
  if (!dump_world.empty()) {
    world_out.open(dump_world, std::ios::binary);
    world_out << world_dump_header();
  }
  if (!dump_network.empty()) {
    network_out.open(dump_network, std::ios::binary);
    network_out << network_snapshot_header();
  }
  CycleObserver observer;
  if (world_out.is_open() || network_out.is_open())
    observer = [&](const World& w) {
      if (world_out.is_open()) world_out << world_dump_rows(w);
      if (network_out.is_open()) network_out << network_snapshot_rows(w);
    };

  const auto result = run(cfg, observer);
  csv::write_atomic(out, run_csv(result.samples));
  if (world_out.is_open() && !world_out.flush()) throw std::runtime_error("could not write " + dump_world);
  if (network_out.is_open() && !network_out.flush()) throw std::runtime_error("could not write " + dump_network);
  std::cout << summary_header() << summary_line({seed, social, result.fdc, run_metrics(result)});
  return 0;
}

int cmd_experiment(const Common& common, int pairs, std::uint64_t seed_base, const std::string& out_dir, int workers) {
  auto cfg = load_config(common);
  check_config(cfg);
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<PairResult> results;
  try {
    results = batch(pairs, seed_base, cfg, workers);
  } catch (const DeterminismFault& e) {
    std::cerr << "error: determinism fault in pair with seed " << e.seed << ": " << e.what() << "\n";
    return 1;
  }
  write_experiment(out_dir, cfg, results);
  std::cout << csv::read_file(std::filesystem::path(out_dir) / "report.csv");
  return 0;
}

int cmd_analyze(const std::string& in_dir, const std::string& out) {
  analyze_directory(in_dir, out);
  std::cout << csv::read_file(std::filesystem::path(out) / "report.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Situated-cognition consumer simulation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_file, "key = value configuration file")->check(CLI::ExistingFile);

  std::uint64_t seed = 0;
  std::string out;

  auto* gen = app.add_subcommand("gen-types", "Generate a product type set");
  int count = 10;
  std::optional<double> min_dist;
  gen->add_option("--seed", seed, "master seed")->required();
  gen->add_option("--count", count, "number of types")->check(CLI::PositiveNumber);
  gen->add_option("--min-dist", min_dist, "minimum pairwise signature distance");
  gen->add_option("--out", out, "type-set CSV")->required();

  auto* land = app.add_subcommand("landscape", "Sample unconstrained types and report fitness distance correlation");
  int samples = 2000;
  land->add_option("--seed", seed, "master seed")->required();
  land->add_option("--samples", samples, "number of types");
  land->add_option("--out", out, "landscape CSV")->required();

  auto* runc = app.add_subcommand("run", "Run one simulation");
  std::optional<int> cycles;
  bool social = true;
  std::string dump_world, dump_network;
  runc->add_option("--seed", seed, "master seed")->required();
  runc->add_option("--cycles", cycles, "clock cycles")->check(CLI::PositiveNumber);
  runc->add_flag("--social,!--no-social", social, "enable social behaviour (default)");
  runc->add_option("--out", out, "run CSV")->required();
  runc->add_option("--dump-world", dump_world, "per-cycle entity CSV");
  runc->add_option("--dump-network", dump_network, "per-cycle tie CSV");

  auto* exp = app.add_subcommand("experiment", "Paired social / non-social runs");
  int pairs = 30, workers = 0;
  std::uint64_t seed_base = 0;
  std::string out_dir;
  exp->add_option("--pairs", pairs, "number of pairs")->check(CLI::PositiveNumber);
  exp->add_option("--seed-base", seed_base, "first seed; pair i uses seed-base + i")->required();
  exp->add_option("--out-dir", out_dir, "output directory")->required();
  exp->add_option("--workers", workers, "parallel runs (0 = hardware threads)");

  auto* ana = app.add_subcommand("analyze", "Recompute the report from run CSVs");
  std::string in_dir;
  ana->add_option("--in-dir", in_dir, "experiment directory")->required();
  ana->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_types(common, seed, count, min_dist, out);
    if (land->parsed()) return cmd_landscape(common, seed, samples, out);
    if (runc->parsed()) return cmd_run(common, seed, cycles, social, out, dump_world, dump_network);
    if (exp->parsed()) return cmd_experiment(common, pairs, seed_base, out_dir, workers);
    if (ana->parsed()) return cmd_analyze(in_dir, out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
