#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "sitcog/product_model.h"
#include "sitcog/rng.h"

namespace sitcog {

struct SomSchedule {
  double alpha0 = 0.3;
  double alpha_decay = 0.999;
  double alpha_floor = 0.01;
  double radius0 = 0.0;  // <= 0: half the larger map dimension
  double radius_decay = 0.999;
  double radius_floor = 0.5;
  bool operator==(const SomSchedule&) const = default;
};

// Kohonen map on a rows x cols lattice with a Gaussian neighbourhood.
class SelfOrganizingMap {
 public:
  SelfOrganizingMap() = default;
  SelfOrganizingMap(int rows, int cols, int dim, SomSchedule schedule = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return dim_; }
  int node_count() const { return rows_ * cols_; }
  long steps() const { return steps_; }
  const SomSchedule& schedule() const { return schedule_; }

  std::span<const double> weight(int node) const;
  std::span<double> weight(int node);
  std::span<const double> weights() const { return weights_; }

  // Uniform draws on [lo[k], hi[k]) per component.
  void randomize(RandomStream& rng, std::span<const double> lo, std::span<const double> hi);

  double learning_rate() const;
  double radius() const;

  // Best-matching unit over the first `compared_dims` components (all when
  // negative). Ties go to the lowest node index.
  int bmu(std::span<const double> x, int compared_dims = -1) const;
  double distance_to(int node, std::span<const double> x, int compared_dims = -1) const;

  // One Kohonen update at the current rate and radius, then advances the schedule.
  void train_step(std::span<const double> x);

  int row_of(int node) const { return node / cols_; }
  int col_of(int node) const { return node % cols_; }

  bool operator==(const SelfOrganizingMap&) const = default;

 private:
  void require_dim(std::span<const double> x, int compared_dims) const;

  int rows_ = 0;
  int cols_ = 0;
  int dim_ = 0;
  SomSchedule schedule_;
  long steps_ = 0;
  std::vector<double> weights_;
};

struct Percept {
  int row = 0;
  int col = 0;
  double quantization_error = 0.0;
};

Percept perceive(const SelfOrganizingMap& perception, const Signature& signature);

inline constexpr int kConceptionDim = kSignatureSize + 1;

// One-dimensional map over (signature, experienced utility) plus the
// threshold that decides attractiveness.
struct AttractivenessState {
  SelfOrganizingMap map;
  double threshold = 0.0;

  bool operator==(const AttractivenessState&) const = default;
};

struct UnprimedMap : std::logic_error {
  using std::logic_error::logic_error;
};

// Utility stored at the BMU of `signature` (utility component not compared).
double predicted_utility(const AttractivenessState& state, const Signature& signature);

bool assess_attractiveness(const AttractivenessState& state, const Signature& signature);

void learn_experience(AttractivenessState& state, const Signature& signature, double utility);

// threshold += rate * (realized - threshold), clamped to [-1, 1].
void update_threshold(AttractivenessState& state, double realized_utility, double rate);

}  // namespace sitcog
