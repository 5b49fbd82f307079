#include "sitcog/experiment_io.h"

#include <algorithm>
#include <map>
#include <regex>

#include "sitcog/csv.h"

namespace sitcog {

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::format(*v) : std::string(kUndefined); }

void expect_header(std::string_view got, std::string_view want, std::string_view what) {
  if (got != want)
    throw FormatError(std::string(what) + ": expected header '" + std::string(want) + "', got '" + std::string(got) +
                      "'");
}

constexpr std::string_view kTypesHeader = "type_id,edge_count,utility,s0,s1,s2,s3,s4,s5";
constexpr std::string_view kRunHeader = "cycle,consumer_id,units,utility,i0,i1,i2,i3,i4,i5";
constexpr std::string_view kReportHeader = "metric,social_mean,nonsocial_mean,diff_mean,t_stat,t_p,w_stat,w_p,n_pairs";

}  // namespace

std::string types_csv(std::span<const ProductType> types) {
  std::string out(kTypesHeader);
  out += '\n';
  for (const auto& t : types) {
    out += csv::format(t.type_id) + ',' + csv::format(t.topology.edge_count()) + ',' + csv::format(t.utility);
    for (double s : t.signature) out += ',' + csv::format(s);
    out += '\n';
  }
  return out;
}

std::vector<TypeRow> parse_types_csv(std::string_view text) {
  const auto rows = csv::lines(text);
  if (rows.empty()) throw FormatError("type CSV is empty");
  expect_header(rows.front(), kTypesHeader, "type CSV");
  std::vector<TypeRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    const auto f = csv::split(rows[i]);
    if (f.size() != 9) throw FormatError("type CSV line " + std::to_string(i + 1) + ": expected 9 fields");
    TypeRow r;
    r.type_id = static_cast<int>(csv::parse_int(f[0]));
    r.edge_count = static_cast<int>(csv::parse_int(f[1]));
    r.utility = csv::parse_double(f[2]);
    for (std::size_t k = 0; k < r.signature.size(); ++k) r.signature[k] = csv::parse_double(f[3 + k]);
    out.push_back(r);
  }
  return out;
}

std::string landscape_csv(std::span<const ProductType> types, const LandscapeAnalysis& analysis,
                          const std::optional<double>& fdc) {
  std::string out = "type_id,edge_count,utility,distance,is_maximum,s0,s1,s2,s3,s4,s5\n";
  for (std::size_t i = 0; i < types.size(); ++i) {
    const auto& t = types[i];
    const bool is_max = std::find(analysis.maxima.begin(), analysis.maxima.end(), t.type_id) != analysis.maxima.end();
    out += csv::format(t.type_id) + ',' + csv::format(t.topology.edge_count()) + ',' + csv::format(t.utility) + ',' +
           csv::format(analysis.distances[i]) + ',' + csv::format(is_max);
    for (double s : t.signature) out += ',' + csv::format(s);
    out += '\n';
  }
  out += "# fdc=" + opt(fdc) + ",radius=" + csv::format(analysis.radius) +
         ",maxima=" + csv::format(analysis.maxima.size()) + (fdc ? "" : ",degenerate") + '\n';
  return out;
}

std::string run_csv(std::span<const PeriodSample> samples) {
  std::string out(kRunHeader);
  out += '\n';
  for (const auto& s : samples) {
    for (std::size_t c = 0; c < s.consumers.size(); ++c) {
      const auto& row = s.consumers[c];
      out += csv::format(s.cycle) + ',' + csv::format(c) + ',' + csv::format(row.units) + ',' + csv::format(row.utility);
      for (double v : row.ideal) out += ',' + csv::format(v);
      out += '\n';
    }
  }
  return out;
}

std::vector<PeriodSample> parse_run_csv(std::string_view text) {
  const auto rows = csv::lines(text);
  if (rows.empty()) throw FormatError("run CSV is empty");
  expect_header(rows.front(), kRunHeader, "run CSV");
  std::vector<PeriodSample> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    const auto f = csv::split(rows[i]);
    const auto where = "run CSV line " + std::to_string(i + 1);
    if (f.size() != 10) throw FormatError(where + ": expected 10 fields");
    const long cycle = static_cast<long>(csv::parse_int(f[0]));
    const auto id = csv::parse_int(f[1]);
    if (out.empty() || out.back().cycle != cycle) {
      if (!out.empty() && cycle <= out.back().cycle) throw FormatError(where + ": cycles out of order");
      out.push_back({});
      out.back().cycle = cycle;
    }
    auto& s = out.back();
    if (id != static_cast<long long>(s.consumers.size())) throw FormatError(where + ": consumer ids out of order");
    ConsumerSample c;
    c.units = static_cast<int>(csv::parse_int(f[2]));
    c.utility = csv::parse_double(f[3]);
    for (std::size_t k = 0; k < c.ideal.size(); ++k) c.ideal[k] = csv::parse_double(f[4 + k]);
    s.consumers.push_back(c);
  }
  for (auto& s : out) {
    if (s.consumers.size() != out.front().consumers.size())
      throw FormatError("run CSV: consumer count changes at cycle " + std::to_string(s.cycle));
    fill_totals(s);
  }
  return out;
}

std::string run_file_name(std::uint64_t seed, bool social) {
  return "run_" + std::to_string(seed) + (social ? "_social.csv" : "_nonsocial.csv");
}

std::string world_dump_header() { return "cycle,entity_kind,id,x,y,state\n"; }

std::string world_dump_rows(const World& world) {
  std::string out;
  const auto prefix = csv::format(world.cycle) + ',';
  for (const auto& c : world.consumers)
    out += prefix + "consumer," + csv::format(c.id) + ',' + csv::format(c.location.x) + ',' +
           csv::format(c.location.y) + ',' + to_string(c.expectation) + '\n';
  for (const auto& p : world.products) {
    const auto loc = world.space.product_location(p.id);
    out += prefix + "product," + csv::format(p.id) + ',' + csv::format(loc.x) + ',' + csv::format(loc.y) + ',' +
           (p.state == ProductState::available ? "available" : "being_consumed") + '\n';
  }
  return out;
}

std::string network_snapshot_header() { return "cycle,id_a,id_b,strength\n"; }

std::string network_snapshot_rows(const World& world) {
  std::string out;
  for (const auto& t : world.network.ties())
    out += csv::format(world.cycle) + ',' + csv::format(t.a) + ',' + csv::format(t.b) + ',' + csv::format(t.strength) +
           '\n';
  return out;
}

std::string summary_header() {
  return "seed,social,fdc,units_per_period,utility_per_period,utility_per_unit,mean_coverage,mean_path_length,"
         "trend_slope,trend_p\n";
}

std::string summary_line(const SummaryRow& row) {
  const auto& m = row.metrics;
  return csv::format(row.seed) + ',' + csv::format(row.social) + ',' + opt(row.fdc) + ',' +
         csv::format(m.units_per_period) + ',' + csv::format(m.utility_per_period) + ',' + opt(m.utility_per_unit) +
         ',' + csv::format(m.mean_coverage) + ',' + csv::format(m.mean_path_length) + ',' +
         csv::format(m.trend_slope) + ',' + opt(m.trend_p) + '\n';
}

std::optional<double> metric_value(const RunMetrics& m, std::string_view metric) {
  if (metric == "units_per_period") return m.units_per_period;
  if (metric == "utility_per_period") return m.utility_per_period;
  if (metric == "utility_per_unit") return m.utility_per_unit;
  if (metric == "mean_coverage") return m.mean_coverage;
  if (metric == "mean_path_length") return m.mean_path_length;
  throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

std::vector<MetricComparison> compare_metrics(std::span<const RunMetrics> social,
                                              std::span<const RunMetrics> nonsocial) {
  if (social.size() != nonsocial.size()) throw std::invalid_argument("unpaired metric lists");
  std::vector<MetricComparison> out;
  for (const char* metric : kReportMetrics) {
    std::vector<double> xs, ys, ds;
    for (std::size_t i = 0; i < social.size(); ++i) {
      const auto x = metric_value(social[i], metric), y = metric_value(nonsocial[i], metric);
      if (!x || !y) continue;
      xs.push_back(*x);
      ys.push_back(*y);
      ds.push_back(*x - *y);
    }
    MetricComparison row;
    row.metric = metric;
    row.n_pairs = static_cast<int>(xs.size());
    if (!xs.empty()) {
      row.social_mean = stats::mean(xs);
      row.nonsocial_mean = stats::mean(ys);
      row.diff_mean = stats::mean(ds);
    }
    if (xs.size() >= 2) {
      row.t = stats::paired_t(xs, ys);
      row.w = stats::signed_rank(xs, ys);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string report_csv(std::span<const MetricComparison> rows) {
  auto test_fields = [](const std::optional<stats::TestReport>& r) {
    if (!r) return std::string(kInsufficientN) + ',' + std::string(kInsufficientN);
    return opt(r->statistic) + ',' + csv::format(r->p_value);
  };
  std::string out(kReportHeader);
  out += '\n';
  for (const auto& r : rows)
    out += r.metric + ',' + opt(r.social_mean) + ',' + opt(r.nonsocial_mean) + ',' + opt(r.diff_mean) + ',' +
           test_fields(r.t) + ',' + test_fields(r.w) + ',' + csv::format(r.n_pairs) + '\n';
  return out;
}

std::vector<std::pair<std::string, std::string>> analysis_files(std::span<const RunMetrics> social,
                                                                std::span<const RunMetrics> nonsocial,
                                                                const AnalysisParams& analysis) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.csv", report_csv(compare_metrics(social, nonsocial)));

  // Distribution tables for aggregate consumption and both value-space measures.
  for (const char* metric : {"units_per_period", "mean_coverage", "mean_path_length"}) {
    for (const bool is_social : {true, false}) {
      std::vector<double> xs;
      for (const auto& m : is_social ? social : nonsocial) xs.push_back(*metric_value(m, metric));
      if (xs.empty()) continue;
      const std::string stem = std::string(metric) + (is_social ? "_social" : "_nonsocial");
      const double h = analysis.kde_bandwidth > 0.0 ? analysis.kde_bandwidth : stats::silverman_bandwidth(xs);
      const auto kde = stats::gaussian_kde(xs, h);
      std::string table = "x,density\n";
      for (std::size_t i = 0; i < kde.x.size(); ++i) table += csv::format(kde.x[i]) + ',' + csv::format(kde.density[i]) + '\n';
      files.emplace_back("kde_" + stem + ".csv", std::move(table));
      if (xs.size() < 2) continue;
      std::string qq = "position,sample,normal\n";
      for (const auto& q : stats::quantile_table(xs))
        qq += csv::format(q.position) + ',' + csv::format(q.sample) + ',' + csv::format(q.normal) + '\n';
      files.emplace_back("qq_" + stem + ".csv", std::move(qq));
    }
  }
  return files;
}

void write_experiment(const std::filesystem::path& dir, const RunConfig& base, std::span<const PairResult> pairs) {
  std::filesystem::create_directories(dir);
  csv::write_atomic(dir / "config.txt", config_text(base));
  std::string summary = summary_header();
  std::vector<RunMetrics> social, nonsocial;
  for (const auto& p : pairs) {
    for (const auto* r : {&p.social, &p.nonsocial}) {
      csv::write_atomic(dir / run_file_name(p.seed, r->config.social), run_csv(r->samples));
      const auto m = run_metrics(*r);
      summary += summary_line({p.seed, r->config.social, r->fdc, m});
      (r->config.social ? social : nonsocial).push_back(m);
    }
  }
  csv::write_atomic(dir / "summary.csv", summary);
  for (const auto& [name, contents] : analysis_files(social, nonsocial, base.analysis))
    csv::write_atomic(dir / name, contents);
}

AnalysisInput read_experiment(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  AnalysisInput in;
  if (std::filesystem::exists(dir / "config.txt")) apply_config_file(in.config, dir / "config.txt");

  static const std::regex pattern(R"(run_(\d+)_(social|nonsocial)\.csv)");
  std::map<std::uint64_t, std::array<std::filesystem::path, 2>> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    const auto seed = static_cast<std::uint64_t>(std::stoull(m[1].str()));
    found[seed][m[2].str() == "social" ? 0 : 1] = entry.path();
  }
  if (found.empty()) throw FormatError("no run files in " + dir.string());

  std::string gaps;
  for (const auto& [seed, paths] : found)
    for (int k = 0; k < 2; ++k)
      if (paths[static_cast<std::size_t>(k)].empty()) gaps += " " + run_file_name(seed, k == 0);
  if (!gaps.empty()) throw FormatError("unpaired runs, missing:" + gaps);

  for (const auto& [seed, paths] : found) {
    in.seeds.push_back(seed);
    for (int k = 0; k < 2; ++k) {
      const auto& path = paths[static_cast<std::size_t>(k)];
      std::vector<PeriodSample> samples;
      try {
        samples = parse_run_csv(csv::read_file(path));
      } catch (const std::exception& e) {
        throw FormatError(path.filename().string() + ": " + e.what());
      }
      if (samples.size() < 2) throw FormatError(path.filename().string() + ": fewer than two samples");
      (k == 0 ? in.social : in.nonsocial).push_back(run_metrics(samples, in.config.analysis));
    }
  }
  return in;
}

std::vector<std::pair<std::string, std::string>> analyze_directory(const std::filesystem::path& in_dir,
                                                                   const std::filesystem::path& out_dir) {
  const auto in = read_experiment(in_dir);
  auto files = analysis_files(in.social, in.nonsocial, in.config.analysis);
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, contents] : files) csv::write_atomic(out_dir / name, contents);
  return files;
}

}  // namespace sitcog
