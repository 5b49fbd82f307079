#include "sitcog/cognition.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sitcog {

SelfOrganizingMap::SelfOrganizingMap(int rows, int cols, int dim, SomSchedule schedule)
    : rows_(rows), cols_(cols), dim_(dim), schedule_(schedule),
      weights_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * static_cast<std::size_t>(dim), 0.0) {
  if (rows <= 0 || cols <= 0 || dim <= 0) throw std::invalid_argument("SOM shape must be positive");
  if (schedule_.radius0 <= 0.0) schedule_.radius0 = std::max(rows, cols) / 2.0;
  if (!(schedule_.alpha_floor > 0.0) || !(schedule_.radius_floor > 0.0))
    throw std::invalid_argument("SOM schedule floors must be positive");
}

std::span<const double> SelfOrganizingMap::weight(int node) const {
  return std::span<const double>(weights_).subspan(static_cast<std::size_t>(node) * static_cast<std::size_t>(dim_),
                                                   static_cast<std::size_t>(dim_));
}

std::span<double> SelfOrganizingMap::weight(int node) {
  return std::span<double>(weights_).subspan(static_cast<std::size_t>(node) * static_cast<std::size_t>(dim_),
                                             static_cast<std::size_t>(dim_));
}

void SelfOrganizingMap::randomize(RandomStream& rng, std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != static_cast<std::size_t>(dim_) || hi.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("SOM init bounds must match the input dimension");
  for (int n = 0; n < node_count(); ++n) {
    auto w = weight(n);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng.uniform(lo[k], hi[k]);
  }
}

double SelfOrganizingMap::learning_rate() const {
  return std::max(schedule_.alpha_floor, schedule_.alpha0 * std::pow(schedule_.alpha_decay, static_cast<double>(steps_)));
}

double SelfOrganizingMap::radius() const {
  return std::max(schedule_.radius_floor, schedule_.radius0 * std::pow(schedule_.radius_decay, static_cast<double>(steps_)));
}

void SelfOrganizingMap::require_dim(std::span<const double> x, int compared_dims) const {
  if (compared_dims < 0) {
    if (x.size() != static_cast<std::size_t>(dim_))
      throw std::domain_error("SOM input has dimension " + std::to_string(x.size()) + ", expected " +
                              std::to_string(dim_));
  } else if (compared_dims > dim_ || x.size() < static_cast<std::size_t>(compared_dims)) {
    throw std::domain_error("SOM input too short for the compared dimensions");
  }
}

double SelfOrganizingMap::distance_to(int node, std::span<const double> x, int compared_dims) const {
  require_dim(x, compared_dims);
  const auto w = weight(node);
  const std::size_t k_end = compared_dims < 0 ? w.size() : static_cast<std::size_t>(compared_dims);
  double ss = 0.0;
  for (std::size_t k = 0; k < k_end; ++k) ss += (x[k] - w[k]) * (x[k] - w[k]);
  return std::sqrt(ss);
}

int SelfOrganizingMap::bmu(std::span<const double> x, int compared_dims) const {
  require_dim(x, compared_dims);
  const std::size_t k_end = compared_dims < 0 ? static_cast<std::size_t>(dim_) : static_cast<std::size_t>(compared_dims);
  int best = 0;
  double best_ss = std::numeric_limits<double>::infinity();
  for (int n = 0; n < node_count(); ++n) {
    const auto w = weight(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < k_end; ++k) ss += (x[k] - w[k]) * (x[k] - w[k]);
    if (ss < best_ss) {
      best_ss = ss;
      best = n;
    }
  }
  return best;
}

void SelfOrganizingMap::train_step(std::span<const double> x) {
  require_dim(x, -1);
  const int winner = bmu(x);
  const double alpha = learning_rate();
  const double r = radius();
  const double two_r2 = 2.0 * r * r;
  for (int n = 0; n < node_count(); ++n) {
    const double dr = row_of(n) - row_of(winner), dc = col_of(n) - col_of(winner);
    const double h = std::exp(-(dr * dr + dc * dc) / two_r2);
    const double rate = alpha * h;
    auto w = weight(n);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += rate * (x[k] - w[k]);
  }
  ++steps_;
}

Percept perceive(const SelfOrganizingMap& perception, const Signature& signature) {
  const int node = perception.bmu(signature);
  return {perception.row_of(node), perception.col_of(node), perception.distance_to(node, signature)};
}

double predicted_utility(const AttractivenessState& state, const Signature& signature) {
  if (state.map.steps() == 0) throw UnprimedMap("attractiveness map has not been primed");
  const int node = state.map.bmu(signature, kSignatureSize);
  return state.map.weight(node)[kSignatureSize];
}

bool assess_attractiveness(const AttractivenessState& state, const Signature& signature) {
  return predicted_utility(state, signature) >= state.threshold;
}

void learn_experience(AttractivenessState& state, const Signature& signature, double utility) {
  std::array<double, kConceptionDim> x{};
  std::copy(signature.begin(), signature.end(), x.begin());
  x[kSignatureSize] = utility;
  state.map.train_step(x);
}

void update_threshold(AttractivenessState& state, double realized_utility, double rate) {
  state.threshold = std::clamp(state.threshold + rate * (realized_utility - state.threshold), -1.0, 1.0);
}

}  // namespace sitcog
