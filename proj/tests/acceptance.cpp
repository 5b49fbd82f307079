// Acceptance checks. One PASS/FAIL line per criterion; exits non-zero if any
// A criterion fails, or a B criterion fails without the sweep script present.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sitcog/csv.h"
#include "sitcog/experiment.h"
#include "sitcog/experiment_io.h"
#include "sitcog/product_model.h"
#include "sitcog/stats.h"

using namespace sitcog;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<Verdict> verdicts;

void report(const std::string& id, bool pass, const std::string& detail) {
  verdicts.push_back({id, pass, detail});
  std::printf("%s %s %s\n", id.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// --- A1 ----------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> directory_contents(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::directory_iterator(dir))
    out.emplace_back(e.path().filename().string(), csv::read_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

void check_a1() {
  const auto root = fs::temp_directory_path() / "sitcog_acceptance_a1";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto t0 = Clock::now();
  bool ok = true;
  for (const char* name : {"first", "second"}) {
    const std::string cmd = std::string("\"") + SITCOG_CLI + "\" experiment --pairs 2 --seed-base 1 --out-dir \"" +
                            (root / name).string() + "\" > \"" + (root / (std::string(name) + ".log")).string() +
                            "\" 2>&1";
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  const double elapsed = seconds_since(t0);
  const bool identical = ok && directory_contents(root / "first") == directory_contents(root / "second");
  std::size_t files = ok ? directory_contents(root / "first").size() : 0;

  bool checksums = true;
  for (std::uint64_t seed : {1, 2}) {
    RunConfig s;
    s.seed = seed;
    s.social = true;
    auto n = s;
    n.social = false;
    checksums = checksums && world_checksum(init_world(s)) == world_checksum(init_world(n));
  }
  report("A1", ok && identical && checksums && elapsed < 300.0,
         "two `experiment --pairs 2` runs byte-identical=" + std::string(identical ? "yes" : "no") + " (" +
             std::to_string(files) + " files), cycle-0 pair checksums equal=" + (checksums ? "yes" : "no") +
             ", wall " + fmt(elapsed) + " s for both (budget 300 s)");
}

// --- A2 ----------------------------------------------------------------------

double pearson_two_pass(const std::vector<double>& u, const std::vector<double>& d) {
  const double n = static_cast<double>(u.size());
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
  const double md = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double c = 0.0, su = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    c += (u[i] - mu) * (d[i] - md);
    su += (u[i] - mu) * (u[i] - mu);
    sd += (d[i] - md) * (d[i] - md);
  }
  return c / std::sqrt(su * sd);
}

double slope_cramer(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double signed_rank_enumerated(const std::vector<double>& d) {
  std::vector<double> nz;
  for (double x : d)
    if (x != 0.0) nz.push_back(x);
  const std::size_t n = nz.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return std::abs(nz[a]) < std::abs(nz[b]); });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(nz[idx[j + 1]]) == std::abs(nz[idx[i]])) ++j;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = (static_cast<double>(i + j) + 2.0) / 2.0;
    i = j + 1;
  }
  double wplus = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (nz[i] > 0) wplus += rank[i];
  }
  const double w = std::min(wplus, total - wplus);
  long extreme = 0;
  const long patterns = 1L << n;
  for (long mask = 0; mask < patterns; ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s += rank[i];
    if (std::min(s, total - s) <= w + 1e-9) ++extreme;
  }
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(patterns));
}

double euclid(const Signature& a, const Signature& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

void check_a2() {
  RandomStream rng(2024);
  std::vector<std::string> failed;
  auto near = [](double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); };

  bool fdc_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(10), d(10);
    for (int i = 0; i < 10; ++i) {
      d[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0);
      u[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0) - 0.3 * d[static_cast<std::size_t>(i)];
    }
    fdc_ok = fdc_ok && near(stats::fdc(u, d), pearson_two_pass(u, d), 1e-12);
  }
  if (!fdc_ok) failed.push_back("fdc");

  bool lr_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
      x.push_back(20.0 * (i + 1));
      y.push_back(100.0 + rng.normal(0.0, 10.0) + 0.01 * i);
    }
    lr_ok = lr_ok && near(stats::linreg(x, y).slope, slope_cramer(x, y), 1e-10);
  }
  if (!lr_ok) failed.push_back("linreg_slope");

  // Reference values computed once with scipy.stats.ttest_rel and wilcoxon.
  const std::vector<double> x = {12.9, 13.5, 12.8, 15.6, 17.2, 19.2, 12.6, 15.3, 14.4, 11.3, 16.1, 14.8, 13.9};
  const std::vector<double> y = {12.0, 12.2, 11.2, 13.0, 15.0, 15.8, 12.2, 13.4, 12.9, 11.0, 14.2, 13.1, 14.2};
  const auto t = stats::paired_t(x, y);
  if (!(t.statistic && near(*t.statistic, 5.387503392301169, 1e-9) && near(t.p_value, 0.0001633561759933331, 1e-7)))
    failed.push_back("paired_t");

  bool sr_ok = true;
  const auto w = stats::signed_rank(x, y);
  sr_ok = sr_ok && w.statistic && *w.statistic == 1.0 && near(w.p_value, 0.00048828125, 1e-12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(12));
    std::vector<double> a, b, d;
    for (int i = 0; i < n; ++i) {
      const double diff = static_cast<double>(static_cast<int>(rng.uniform_index(9)) - 4);
      a.push_back(5.0 + diff);
      b.push_back(5.0);
      d.push_back(diff);
    }
    const auto r = stats::signed_rank(a, b);
    if (r.degenerate) continue;
    sr_ok = sr_ok && near(r.p_value, signed_rank_enumerated(d), 1e-12);
  }
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> ranks(static_cast<std::size_t>(n));
    std::iota(ranks.begin(), ranks.end(), 1.0);
    const auto dist = stats::signed_rank_distribution(ranks);
    sr_ok = sr_ok && near(std::accumulate(dist.begin(), dist.end(), 0.0), 1.0, 1e-14);
  }
  if (!sr_ok) failed.push_back("signed_rank");

  bool cov_ok = true, path_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Signature> traj;
    Signature p;
    p.fill(1.0);
    for (int i = 0; i < 100; ++i) {
      for (auto& v : p) v = std::max(0.0, v + rng.uniform(-0.05, 0.05));
      traj.push_back(p);
    }
    std::set<std::vector<long>> cells;
    double len = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      std::vector<long> key;
      for (double v : traj[i]) key.push_back(static_cast<long>(std::floor(v / 0.05)));
      cells.insert(key);
      if (i > 0) len += euclid(traj[i - 1], traj[i]);
    }
    cov_ok = cov_ok && value_coverage(traj, 0.05) == cells.size();
    path_ok = path_ok && near(value_path_length(traj), len, 1e-12);
  }
  if (!cov_ok) failed.push_back("value_coverage");
  if (!path_ok) failed.push_back("value_path_length");

  std::string detail = "fdc, linreg_slope, paired_t, signed_rank (incl. exact sums to 1 for n<=12), value_coverage, "
                       "value_path_length vs independent oracles";
  if (!failed.empty()) {
    detail += "; mismatches:";
    for (const auto& f : failed) detail += " " + f;
  }
  report("A2", failed.empty(), detail);
}

// --- A3 ----------------------------------------------------------------------

void check_a3() {
  std::vector<std::string> problems;
  for (bool social : {true, false}) {
    RunConfig cfg;
    cfg.seed = 1;
    cfg.social = social;
    long audits = 0;
    std::optional<std::uint64_t> first_network;
    bool network_constant = true;
    std::string first_problem;
    const auto result = run(cfg, [&](const World& w) {
      ++audits;
      if (const auto bad = audit_world(w); bad && first_problem.empty())
        first_problem = "cycle " + std::to_string(w.cycle) + ": " + *bad;
      if (!social) {
        const auto sum = network_checksum(w.network);
        if (!first_network) first_network = sum;
        network_constant = network_constant && sum == *first_network;
      }
    });
    const std::string mode = social ? "social" : "non-social";
    if (!first_problem.empty()) problems.push_back(mode + " audit " + first_problem);
    if (result.samples.size() != 500) problems.push_back(mode + " sample count");
    for (const auto& s : result.samples) {
      if (s.consumers.size() != 40 || s.product_count != 50) {
        problems.push_back(mode + " population at cycle " + std::to_string(s.cycle));
        break;
      }
      bool ideals_ok = true;
      for (const auto& c : s.consumers)
        for (double v : c.ideal) ideals_ok = ideals_ok && std::isfinite(v) && v >= 0.0;
      if (!ideals_ok) {
        problems.push_back(mode + " ideal at cycle " + std::to_string(s.cycle));
        break;
      }
    }
    if (!social && (!network_constant || result.final_network_checksum != result.initial_network_checksum))
      problems.push_back("non-social network changed");
    if (audits != cfg.cycles + 1) problems.push_back(mode + " audit count");
  }
  std::string detail = "seed 1, 10,000 cycles each mode: per-cycle occupancy audit, 40 consumers / 50 products at "
                       "all 500 samples, finite non-negative ideals, constant non-social network checksum";
  for (const auto& p : problems) detail += "; " + p;
  report("A3", problems.empty(), detail);
}

// --- A4 ----------------------------------------------------------------------

void check_a4() {
  std::vector<std::string> problems;
  auto rng = substream(1, kTypesStream);
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_topology(rng);
    int edges = 0;
    bool symmetric = true;
    for (int a = 0; a < kProductVertices; ++a) {
      symmetric = symmetric && !t.has_edge(a, a);
      for (int b = 0; b < kProductVertices; ++b) {
        symmetric = symmetric && t.has_edge(a, b) == t.has_edge(b, a);
        if (a < b && t.has_edge(a, b)) ++edges;
      }
    }
    std::vector<int> stack = {0};
    std::set<int> seen = {0};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < kProductVertices; ++u)
        if (u != v && t.has_edge(v, u) && seen.insert(u).second) stack.push_back(u);
    }
    if (!symmetric || edges < 5 || edges > 15 || seen.size() != 6) {
      problems.push_back("topology " + std::to_string(i));
      break;
    }
  }
  auto all_equal = [](const Signature& s) {
    return std::all_of(s.begin(), s.end(), [&](double v) { return std::fabs(v - s[0]) <= 1e-12; });
  };
  if (!all_equal(layout_signature(ProductTopology::complete()))) problems.push_back("K6 signature");
  if (!all_equal(layout_signature(ProductTopology::cycle({0, 1, 2, 3, 4, 5})))) problems.push_back("C6 signature");
  for (int e = 5; e <= 15; ++e) {
    const double u = utility_from_edges(e);
    if ((u > 0) - (u < 0) != (e > 8) - (e < 8)) problems.push_back("utility sign at " + std::to_string(e));
  }
  std::string detail = "1,000 seeded topologies connected with 5-15 edges, K6/C6 equal components, sign(U(e)) = "
                       "sign(e-8) for e in [5,15]";
  for (const auto& p : problems) detail += "; " + p;
  report("A4", problems.empty(), detail);
}

// --- A5 ----------------------------------------------------------------------

void check_a5() {
  const auto t0 = Clock::now();
  const RunConfig defaults;
  int negative = 0, defined = 0;
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto rng = substream(seed, kTypesStream);
    const auto types = generate_type_set(defaults.products.n_types, defaults.products.min_type_distance, rng,
                                         defaults.products.type_attempts, defaults.products.utility_slope);
    try {
      const double f = type_set_fdc(types);
      ++defined;
      sum += f;
      if (f < 0.0) ++negative;
    } catch (const stats::DegenerateInput&) {
    }
  }
  const double elapsed = seconds_since(t0);
  const double mean = defined > 0 ? sum / defined : 0.0;
  const bool pass = negative >= 28 && mean >= -0.45 && mean <= -0.05 && elapsed < 60.0;
  report("A5", pass,
         "seeds 1..30: FDC negative in " + std::to_string(negative) + "/30 (need >= 28), mean " + fmt(mean) +
             " (need within [-0.45, -0.05]), " + std::to_string(30 - defined) + " degenerate, " + fmt(elapsed) +
             " s");
}

// --- B -----------------------------------------------------------------------

std::vector<double> column(const std::vector<RunMetrics>& ms, double RunMetrics::*field) {
  std::vector<double> out;
  for (const auto& m : ms) out.push_back(m.*field);
  return out;
}

void check_b() {
  const auto t0 = Clock::now();
  const RunConfig base;
  const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto pairs = batch(30, 1, base, workers);
  const double elapsed = seconds_since(t0);
  std::vector<RunMetrics> soc, non;
  for (const auto& p : pairs) {
    soc.push_back(run_metrics(p.social));
    non.push_back(run_metrics(p.nonsocial));
  }
  const std::string timing = "30 pairs x 10,000 cycles, " + std::to_string(workers) + " worker(s), " +
                             fmt(elapsed) + " s";

  {
    const auto s = column(soc, &RunMetrics::units_per_period), n = column(non, &RunMetrics::units_per_period);
    const auto w = stats::signed_rank(s, n);
    const auto t = stats::paired_t(s, n);
    const double ms = stats::mean(s), mn = stats::mean(n);
    report("B1", ms > mn && w.p_value < 0.05,
           "units/period social " + fmt(ms) + " vs non-social " + fmt(mn) + ", signed-rank p=" + fmt(w.p_value) +
               " (need < 0.05, social higher), paired t p=" + fmt(t.p_value) + "; " + timing);
  }
  {
    int lower = 0, defined = 0;
    for (std::size_t i = 0; i < soc.size(); ++i) {
      if (!soc[i].utility_per_unit || !non[i].utility_per_unit) continue;
      ++defined;
      if (*soc[i].utility_per_unit < *non[i].utility_per_unit) ++lower;
    }
    report("B2", lower >= 20,
           "utility/unit social < non-social in " + std::to_string(lower) + "/" + std::to_string(defined) +
               " pairs (need >= 20/30)");
  }
  {
    const auto sp = column(soc, &RunMetrics::mean_path_length), np = column(non, &RunMetrics::mean_path_length);
    const auto sc = column(soc, &RunMetrics::mean_coverage), nc = column(non, &RunMetrics::mean_coverage);
    const auto w = stats::signed_rank(sp, np);
    const double msp = stats::mean(sp), mnp = stats::mean(np), msc = stats::mean(sc), mnc = stats::mean(nc);
    report("B3", msp > mnp && w.p_value < 0.05 && msc > mnc,
           "path length social " + fmt(msp) + " vs " + fmt(mnp) + " (signed-rank p=" + fmt(w.p_value) +
               "), coverage social " + fmt(msc) + " vs " + fmt(mnc));
  }
  {
    int flat = 0;
    for (const auto& m : soc)
      if (m.trend_p && *m.trend_p >= 0.05) ++flat;
    report("B4", flat >= 25,
           "post-transient trend slope not significant at 5% in " + std::to_string(flat) +
               "/30 social runs (need >= 25)");
  }
}

}  // namespace

int main() {
  check_a1();
  check_a2();
  check_a3();
  check_a4();
  check_a5();
  check_b();

  bool a_ok = true, b_ok = true;
  for (const auto& v : verdicts) (v.id[0] == 'A' ? a_ok : b_ok) = (v.id[0] == 'A' ? a_ok : b_ok) && v.pass;
  const bool sweep = fs::exists(SITCOG_SWEEP_SCRIPT);
  if (!b_ok)
    std::printf("note: B criteria failing under defaults; parameter sweep %s at %s\n",
                sweep ? "shipped" : "MISSING", SITCOG_SWEEP_SCRIPT);
  return a_ok && (b_ok || sweep) ? 0 : 1;
}
