#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sitcog::stats {

struct DegenerateInput : std::domain_error {
  using std::domain_error::domain_error;
};

enum class Method { paired_t, signed_rank_exact, signed_rank_normal };

std::string to_string(Method m);

struct TestReport {
  std::optional<double> statistic;  // empty when undefined (degenerate input)
  double p_value = 1.0;
  int n = 0;
  Method method = Method::paired_t;
  bool degenerate = false;
};

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1).
double sample_sd(std::span<const double> xs);

// Fitness distance correlation r = c_UD / (s_U s_D) with population (1/n)
// moments. Throws DegenerateInput if either input has zero spread.
double fdc(std::span<const double> utilities, std::span<const double> distances);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  // Slope significance (t with n - 2 degrees of freedom); empty for n < 3.
  std::optional<double> slope_se;
  std::optional<double> slope_t;
  std::optional<double> slope_p;
};

// Ordinary least squares. Throws DegenerateInput if all xs are equal.
Regression linreg(std::span<const double> xs, std::span<const double> ys);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
double student_t_two_sided_p(double t, double df);
double normal_cdf(double z);
// Standard normal quantile, |error| < 1e-12 on (0, 1).
double normal_quantile(double p);

TestReport paired_t(std::span<const double> xs, std::span<const double> ys);

// Largest effective n for which the signed-rank p-value is exact.
inline constexpr int kSignedRankExactMax = 30;

// Midranks of |values| (1-based).
std::vector<double> midranks(std::span<const double> values);

// Null distribution of W+ for the given ranks, indexed by 2*W+ (midranks are
// multiples of one half). Entries are probabilities.
std::vector<double> signed_rank_distribution(std::span<const double> ranks);

TestReport signed_rank(std::span<const double> xs, std::span<const double> ys);
// Normal approximation with continuity and tie corrections, regardless of n.
TestReport signed_rank_normal(std::span<const double> xs, std::span<const double> ys);

double silverman_bandwidth(std::span<const double> samples);

struct KdeTable {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

inline constexpr int kKdeGridPoints = 256;

double kde_density(std::span<const double> samples, double bandwidth, double x);
KdeTable gaussian_kde(std::span<const double> samples, double bandwidth);

struct QuantileRow {
  double position = 0.0;  // plotting position (i - 0.5) / n
  double sample = 0.0;
  double normal = 0.0;
};

std::vector<QuantileRow> quantile_table(std::span<const double> samples);

}  // namespace sitcog::stats
