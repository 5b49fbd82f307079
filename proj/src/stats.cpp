#include "sitcog/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sitcog::stats {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, std::size_t min_n) {
  if (a.size() != b.size()) throw std::invalid_argument("inputs differ in length");
  if (a.size() < min_n)
    throw std::invalid_argument("need at least " + std::to_string(min_n) + " observations");
}

std::vector<double> differences(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> d(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) d[i] = xs[i] - ys[i];
  return d;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::paired_t: return "paired_t";
    case Method::signed_rank_exact: return "signed_rank_exact";
    case Method::signed_rank_normal: return "signed_rank_normal";
  }
  return "unknown";
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sd needs at least 2 observations");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double fdc(std::span<const double> utilities, std::span<const double> distances) {
  require_same_length(utilities, distances, 2);
  const double n = static_cast<double>(utilities.size());
  const double mu = mean(utilities), md = mean(distances);
  double cud = 0.0, vu = 0.0, vd = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const double du = utilities[i] - mu, dd = distances[i] - md;
    cud += du * dd;
    vu += du * du;
    vd += dd * dd;
  }
  if (vu == 0.0) throw DegenerateInput("fdc: utilities have zero spread");
  if (vd == 0.0) throw DegenerateInput("fdc: distances have zero spread");
  const double r = (cud / n) / (std::sqrt(vu / n) * std::sqrt(vd / n));
  return std::clamp(r, -1.0, 1.0);
}

Regression linreg(std::span<const double> xs, std::span<const double> ys) {
  require_same_length(xs, ys, 2);
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DegenerateInput("linreg: xs are all equal");
  Regression r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  const std::size_t n = xs.size();
  if (n >= 3) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = ys[i] - (r.intercept + r.slope * xs[i]);
      sse += e * e;
    }
    const double df = static_cast<double>(n - 2);
    const double se = std::sqrt(sse / df / sxx);
    r.slope_se = se;
    if (se > 0.0) {
      r.slope_t = r.slope / se;
      r.slope_p = student_t_two_sided_p(*r.slope_t, df);
    } else {
      // Exact fit: the slope is either exactly zero or infinitely significant.
      r.slope_p = r.slope == 0.0 ? 1.0 : 0.0;
    }
  }
  return r;
}

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0, 1)");
  // Acklam's rational approximation, then one Halley step on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

TestReport paired_t(std::span<const double> xs, std::span<const double> ys) {
  require_same_length(xs, ys, 2);
  const auto d = differences(xs, ys);
  TestReport rep;
  rep.method = Method::paired_t;
  rep.n = static_cast<int>(d.size());
  const double md = mean(d);
  const double sd = sample_sd(d);
  if (sd == 0.0) {
    // Constant differences: zero shift means no evidence, any other shift is
    // infinitely significant. The statistic itself is undefined.
    rep.degenerate = true;
    rep.p_value = md == 0.0 ? 1.0 : 0.0;
    return rep;
  }
  const double t = md / (sd / std::sqrt(static_cast<double>(d.size())));
  rep.statistic = t;
  rep.p_value = student_t_two_sided_p(t, static_cast<double>(d.size() - 1));
  return rep;
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(values[a]) < std::fabs(values[b]);
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(values[order[j + 1]]) == std::fabs(values[order[i]])) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> signed_rank_distribution(std::span<const double> ranks) {
  std::vector<int> doubled(ranks.size());
  int total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
    total += doubled[i];
  }
  // counts[s] = number of sign patterns whose positive doubled-rank sum is s.
  std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
  counts[0] = 1.0;
  int reach = 0;
  for (int r : doubled) {
    for (int s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
    reach += r;
  }
  const double patterns = std::ldexp(1.0, static_cast<int>(ranks.size()));
  for (double& c : counts) c /= patterns;
  return counts;
}

namespace {

struct SignedRankParts {
  std::vector<double> nonzero;
  std::vector<double> ranks;
  double w_plus = 0.0;
  double w_minus = 0.0;
};

SignedRankParts signed_rank_parts(std::span<const double> xs, std::span<const double> ys) {
  require_same_length(xs, ys, 1);
  SignedRankParts parts;
  for (double v : differences(xs, ys))
    if (v != 0.0) parts.nonzero.push_back(v);
  parts.ranks = midranks(parts.nonzero);
  for (std::size_t i = 0; i < parts.nonzero.size(); ++i)
    (parts.nonzero[i] > 0.0 ? parts.w_plus : parts.w_minus) += parts.ranks[i];
  return parts;
}

TestReport normal_report(const SignedRankParts& parts) {
  const double n = static_cast<double>(parts.nonzero.size());
  const double w = std::min(parts.w_plus, parts.w_minus);
  double tie_term = 0.0;
  std::vector<double> sorted = parts.ranks;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mu = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  TestReport rep;
  rep.method = Method::signed_rank_normal;
  rep.n = static_cast<int>(n);
  rep.statistic = w;
  if (var <= 0.0) {
    rep.p_value = 1.0;
    return rep;
  }
  const double z = std::min(0.0, w - mu + 0.5) / std::sqrt(var);
  rep.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  return rep;
}

TestReport degenerate_signed_rank() {
  TestReport rep;
  rep.method = Method::signed_rank_exact;
  rep.degenerate = true;
  rep.p_value = 1.0;
  return rep;
}

}  // namespace

TestReport signed_rank(std::span<const double> xs, std::span<const double> ys) {
  const auto parts = signed_rank_parts(xs, ys);
  if (parts.nonzero.empty()) return degenerate_signed_rank();
  if (parts.nonzero.size() > static_cast<std::size_t>(kSignedRankExactMax)) return normal_report(parts);
  const auto dist = signed_rank_distribution(parts.ranks);
  const double w = std::min(parts.w_plus, parts.w_minus);
  const auto w2 = static_cast<std::size_t>(std::lround(2.0 * w));
  double tail = 0.0;
  for (std::size_t s = 0; s <= w2 && s < dist.size(); ++s) tail += dist[s];
  TestReport rep;
  rep.method = Method::signed_rank_exact;
  rep.n = static_cast<int>(parts.nonzero.size());
  rep.statistic = w;
  rep.p_value = std::min(1.0, 2.0 * tail);
  return rep;
}

TestReport signed_rank_normal(std::span<const double> xs, std::span<const double> ys) {
  const auto parts = signed_rank_parts(xs, ys);
  if (parts.nonzero.empty()) {
    auto rep = degenerate_signed_rank();
    rep.method = Method::signed_rank_normal;
    return rep;
  }
  return normal_report(parts);
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("bandwidth of empty sample");
  const double n = static_cast<double>(samples.size());
  const double sd = samples.size() > 1 ? sample_sd(samples) : 0.0;
  // A constant sample has no scale of its own; fall back to a unit kernel.
  const double scale = sd > 0.0 ? sd : 1.0;
  return 1.06 * scale * std::pow(n, -0.2);
}

double kde_density(std::span<const double> samples, double bandwidth, double x) {
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (double s : samples) {
    const double z = (x - s) / bandwidth;
    sum += std::exp(-0.5 * z * z);
  }
  return norm * sum;
}

KdeTable gaussian_kde(std::span<const double> samples, double bandwidth) {
  if (samples.empty()) throw std::invalid_argument("kde of empty sample");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde bandwidth must be positive");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 3.0 * bandwidth, hi = *mx + 3.0 * bandwidth;
  KdeTable table;
  table.bandwidth = bandwidth;
  table.x.resize(kKdeGridPoints);
  table.density.resize(kKdeGridPoints);
  for (int i = 0; i < kKdeGridPoints; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (kKdeGridPoints - 1);
    table.x[static_cast<std::size_t>(i)] = x;
    table.density[static_cast<std::size_t>(i)] = kde_density(samples, bandwidth, x);
  }
  return table;
}

std::vector<QuantileRow> quantile_table(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("quantile table needs at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<QuantileRow> rows(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i) + 0.5) / n;
    rows[i] = {p, sorted[i], normal_quantile(p)};
  }
  return rows;
}

}  // namespace sitcog::stats
