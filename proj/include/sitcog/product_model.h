#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sitcog/rng.h"

namespace sitcog {

inline constexpr int kProductVertices = 6;
inline constexpr int kMinEdges = kProductVertices - 1;
inline constexpr int kMaxEdges = kProductVertices * (kProductVertices - 1) / 2;
inline constexpr int kSignatureSize = kProductVertices;

// Distances of the laid-out vertices from the layout centroid, in vertex order.
using Signature = std::array<double, kSignatureSize>;

using Edge = std::pair<int, int>;

// Undirected simple graph on six vertices.
class ProductTopology {
 public:
  ProductTopology() = default;

  // Throws std::invalid_argument on self-loops, duplicates or bad vertex ids.
  static ProductTopology from_edges(std::span<const Edge> edges);
  static ProductTopology complete();
  // Cycle visiting the vertices in the given order.
  static ProductTopology cycle(const std::array<int, kProductVertices>& order);
  static ProductTopology path(const std::array<int, kProductVertices>& order);

  bool has_edge(int a, int b) const { return adjacency_[index(a)][index(b)]; }
  void add_edge(int a, int b);
  int edge_count() const { return edge_count_; }
  int degree(int v) const;
  // Edges with first < second, in lexicographic order.
  std::vector<Edge> edges() const;
  bool connected() const;
  // Connected, no self-loops, symmetric, edge count in [5, 15].
  bool valid() const;

  bool operator==(const ProductTopology&) const = default;

 private:
  static std::size_t index(int v);

  std::array<std::array<bool, kProductVertices>, kProductVertices> adjacency_{};
  int edge_count_ = 0;
};

struct LayoutParams {
  double step = 0.01;
  double tolerance = 1e-8;  // stop once the largest angle update is below this
  int max_iterations = 10000;
  double overlap_gap = 0.1;  // radians
  double overlap_weight = 1.0;
};

struct LayoutResult {
  Signature signature{};
  std::array<double, kProductVertices> angles{};
  // Standard deviation of the edge chord lengths (overlap penalty excluded).
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Circle layout relaxed by gradient descent on the variance of the edge chord
// lengths plus a penalty on vertex pairs closer than overlap_gap. Vertices
// start evenly spaced in index order. Deterministic.
LayoutResult relax_layout(const ProductTopology& topology, const LayoutParams& params = {});

inline Signature layout_signature(const ProductTopology& topology) {
  return relax_layout(topology).signature;
}

inline constexpr double kDefaultUtilitySlope = 1.0;
inline constexpr int kUtilityMidpoint = 8;

// Logistic utility in (-1, 1), zero at eight edges. Throws std::domain_error
// for edge counts outside [5, 15].
double utility_from_edges(int edges, double slope = kDefaultUtilitySlope);

// Euclidean distance between two signatures.
double valuation(const Signature& ideal, const Signature& signature);

struct ProductType {
  int type_id = 0;
  ProductTopology topology;
  Signature signature{};
  double utility = 0.0;
};

ProductType make_product_type(int type_id, const ProductTopology& topology,
                              double slope = kDefaultUtilitySlope);

// Random connected topology: each of the 15 vertex pairs is joined with
// probability 1/2, redrawn until the graph is connected.
ProductTopology random_topology(RandomStream& rng);

struct GenerationError : std::runtime_error {
  GenerationError(const std::string& what, int achieved)
      : std::runtime_error(what), achieved(achieved) {}
  int achieved;
};

inline constexpr int kDefaultTypeAttempts = 10000;
inline constexpr double kDefaultMinTypeDistance = 0.35;

// Draws candidate types until n of them are pairwise at least d_min apart in
// signature space. Each candidate draw counts as one attempt.
std::vector<ProductType> generate_type_set(int n, double d_min, RandomStream& rng,
                                           int max_attempts = kDefaultTypeAttempts,
                                           double slope = kDefaultUtilitySlope);

double mean_nearest_neighbor_distance(std::span<const ProductType> types);

// Type ids of the types with no strictly better type within radius.
std::vector<int> identify_maxima(std::span<const ProductType> types, double radius);

// Zero for a maximum, otherwise the distance to the closest maximum.
double nearest_max_distance(const ProductType& type, std::span<const ProductType> maxima);

struct LandscapeAnalysis {
  double radius = 0.0;
  std::vector<int> maxima;
  std::vector<double> utilities;
  std::vector<double> distances;  // nearest-maximum distance per type
};

// Maxima with radius = mean nearest-neighbour distance (or the given radius).
LandscapeAnalysis analyze_landscape(std::span<const ProductType> types, double radius = 0.0);

// Fitness distance correlation of a type set. Throws stats::DegenerateInput
// when every type is a maximum or all utilities are equal.
double type_set_fdc(std::span<const ProductType> types);

}  // namespace sitcog
