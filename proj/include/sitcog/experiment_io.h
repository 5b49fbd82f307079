#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sitcog/experiment.h"
#include "sitcog/stats.h"

namespace sitcog {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Marker written where a value is undefined.
inline constexpr std::string_view kUndefined = "NA";
inline constexpr std::string_view kInsufficientN = "insufficient-n";

// --- product types ---------------------------------------------------------

std::string types_csv(std::span<const ProductType> types);

struct TypeRow {
  int type_id = 0;
  int edge_count = 0;
  double utility = 0.0;
  Signature signature{};
};
std::vector<TypeRow> parse_types_csv(std::string_view text);

// Per-type landscape rows followed by a `# fdc=...` summary line.
std::string landscape_csv(std::span<const ProductType> types, const LandscapeAnalysis& analysis,
                          const std::optional<double>& fdc);

// --- runs ------------------------------------------------------------------

std::string run_csv(std::span<const PeriodSample> samples);
// Aggregates are recomputed from the per-consumer rows.
std::vector<PeriodSample> parse_run_csv(std::string_view text);

std::string run_file_name(std::uint64_t seed, bool social);

std::string world_dump_header();
std::string world_dump_rows(const World& world);
std::string network_snapshot_header();
std::string network_snapshot_rows(const World& world);

struct SummaryRow {
  std::uint64_t seed = 0;
  bool social = true;
  std::optional<double> fdc;
  RunMetrics metrics;
};
std::string summary_header();
std::string summary_line(const SummaryRow& row);

// --- social vs non-social comparison ----------------------------------------

inline constexpr std::array<const char*, 5> kReportMetrics = {
    "units_per_period", "utility_per_period", "utility_per_unit", "mean_coverage", "mean_path_length",
};

// Value of a named report metric; empty when undefined for this run.
std::optional<double> metric_value(const RunMetrics& m, std::string_view metric);

struct MetricComparison {
  std::string metric;
  int n_pairs = 0;  // pairs where both members define the metric
  std::optional<double> social_mean, nonsocial_mean, diff_mean;
  std::optional<stats::TestReport> t;  // empty with fewer than two pairs
  std::optional<stats::TestReport> w;
};

std::vector<MetricComparison> compare_metrics(std::span<const RunMetrics> social,
                                              std::span<const RunMetrics> nonsocial);
std::string report_csv(std::span<const MetricComparison> rows);

// --- experiment directories --------------------------------------------------

// Analysis files derived from per-run metrics: report.csv plus KDE and
// quantile tables, keyed by file name.
std::vector<std::pair<std::string, std::string>> analysis_files(std::span<const RunMetrics> social,
                                                                std::span<const RunMetrics> nonsocial,
                                                                const AnalysisParams& analysis);

// Writes config.txt, every run file, summary.csv and the analysis files.
void write_experiment(const std::filesystem::path& dir, const RunConfig& base, std::span<const PairResult> pairs);

struct AnalysisInput {
  RunConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<RunMetrics> social, nonsocial;
};

// Reads config.txt (optional) and all run_<seed>_<mode>.csv files; throws
// FormatError naming missing partners or malformed files.
AnalysisInput read_experiment(const std::filesystem::path& dir);

// Recomputes the analysis files from raw run CSVs and writes them to out_dir.
std::vector<std::pair<std::string, std::string>> analyze_directory(const std::filesystem::path& in_dir,
                                                                   const std::filesystem::path& out_dir);

}  // namespace sitcog
