#include "sitcog/product_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "sitcog/stats.h"

namespace sitcog {

std::size_t ProductTopology::index(int v) {
  if (v < 0 || v >= kProductVertices) throw std::invalid_argument("vertex id out of range");
  return static_cast<std::size_t>(v);
}

void ProductTopology::add_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("self-loop");
  auto& ab = adjacency_[index(a)][index(b)];
  if (ab) throw std::invalid_argument("duplicate edge");
  ab = true;
  adjacency_[index(b)][index(a)] = true;
  ++edge_count_;
}

ProductTopology ProductTopology::from_edges(std::span<const Edge> edges) {
  ProductTopology t;
  for (const auto& [a, b] : edges) t.add_edge(a, b);
  return t;
}

ProductTopology ProductTopology::complete() {
  ProductTopology t;
  for (int a = 0; a < kProductVertices; ++a)
    for (int b = a + 1; b < kProductVertices; ++b) t.add_edge(a, b);
  return t;
}

ProductTopology ProductTopology::path(const std::array<int, kProductVertices>& order) {
  ProductTopology t;
  for (int i = 0; i + 1 < kProductVertices; ++i) t.add_edge(order[i], order[i + 1]);
  return t;
}

ProductTopology ProductTopology::cycle(const std::array<int, kProductVertices>& order) {
  ProductTopology t = path(order);
  t.add_edge(order.back(), order.front());
  return t;
}

int ProductTopology::degree(int v) const {
  const auto& row = adjacency_[index(v)];
  return static_cast<int>(std::count(row.begin(), row.end(), true));
}

std::vector<Edge> ProductTopology::edges() const {
  std::vector<Edge> out;
  for (int a = 0; a < kProductVertices; ++a)
    for (int b = a + 1; b < kProductVertices; ++b)
      if (has_edge(a, b)) out.emplace_back(a, b);
  return out;
}

bool ProductTopology::connected() const {
  std::array<bool, kProductVertices> seen{};
  std::array<int, kProductVertices> stack{};
  int top = 0, visited = 1;
  stack[top++] = 0;
  seen[0] = true;
  while (top > 0) {
    const int v = stack[--top];
    for (int w = 0; w < kProductVertices; ++w) {
      if (has_edge(v, w) && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack[top++] = w;
        ++visited;
      }
    }
  }
  return visited == kProductVertices;
}

bool ProductTopology::valid() const {
  for (int a = 0; a < kProductVertices; ++a) {
    if (has_edge(a, a)) return false;
    for (int b = 0; b < kProductVertices; ++b)
      if (has_edge(a, b) != has_edge(b, a)) return false;
  }
  return edge_count_ >= kMinEdges && edge_count_ <= kMaxEdges && connected();
}

namespace {

struct Objective {
  double value = 0.0;
  double chord_sd = 0.0;
  std::array<double, kProductVertices> gradient{};
};

struct EdgeList {
  std::array<Edge, kMaxEdges> edges{};
  std::size_t size = 0;
};

Objective evaluate_layout(const EdgeList& graph, const std::array<double, kProductVertices>& angles,
                          const LayoutParams& params) {
  std::array<double, kProductVertices> cs{}, sn{};
  for (std::size_t v = 0; v < kProductVertices; ++v) {
    cs[v] = std::cos(angles[v]);
    sn[v] = std::sin(angles[v]);
  }
  Objective obj;
  const auto m = static_cast<double>(graph.size);
  std::array<double, kMaxEdges> lengths{}, sines{};
  double mean_len = 0.0;
  for (std::size_t e = 0; e < graph.size; ++e) {
    const auto a = static_cast<std::size_t>(graph.edges[e].first);
    const auto b = static_cast<std::size_t>(graph.edges[e].second);
    const double cos_delta = cs[a] * cs[b] + sn[a] * sn[b];
    sines[e] = sn[a] * cs[b] - cs[a] * sn[b];
    lengths[e] = std::sqrt(std::max(0.0, 2.0 - 2.0 * cos_delta));
    mean_len += lengths[e];
  }
  mean_len /= m;
  double var = 0.0;
  for (std::size_t e = 0; e < graph.size; ++e) {
    const double dev = lengths[e] - mean_len;
    var += dev * dev;
    if (lengths[e] <= 0.0) continue;
    // d var / d L_e = 2 (L_e - mean) / m ; d L / d delta = sin(delta) / L
    const double g = 2.0 * dev / m * sines[e] / lengths[e];
    obj.gradient[static_cast<std::size_t>(graph.edges[e].first)] += g;
    obj.gradient[static_cast<std::size_t>(graph.edges[e].second)] -= g;
  }
  var /= m;
  obj.chord_sd = std::sqrt(var);
  obj.value = var;

  const double cos_gap = std::cos(params.overlap_gap);
  for (std::size_t a = 0; a < kProductVertices; ++a) {
    for (std::size_t b = a + 1; b < kProductVertices; ++b) {
      if (cs[a] * cs[b] + sn[a] * sn[b] <= cos_gap) continue;
      const double wrapped = std::remainder(angles[a] - angles[b], 2.0 * std::numbers::pi);
      const double sep = std::fabs(wrapped);
      if (sep >= params.overlap_gap) continue;
      const double short_by = params.overlap_gap - sep;
      obj.value += params.overlap_weight * short_by * short_by;
      const double sign = wrapped > 0.0 ? 1.0 : (wrapped < 0.0 ? -1.0 : 0.0);
      const double g = -2.0 * params.overlap_weight * short_by * sign;
      obj.gradient[a] += g;
      obj.gradient[b] -= g;
    }
  }
  return obj;
}

}  // namespace

LayoutResult relax_layout(const ProductTopology& topology, const LayoutParams& params) {
  EdgeList edges;
  for (const auto& e : topology.edges()) edges.edges[edges.size++] = e;
  if (edges.size == 0) throw std::invalid_argument("layout of a graph without edges");
  LayoutResult result;
  for (int v = 0; v < kProductVertices; ++v)
    result.angles[static_cast<std::size_t>(v)] = 2.0 * std::numbers::pi * v / kProductVertices;

  for (int it = 0; it < params.max_iterations; ++it) {
    const auto obj = evaluate_layout(edges, result.angles, params);
    double largest = 0.0;
    for (std::size_t v = 0; v < kProductVertices; ++v) {
      const double update = params.step * obj.gradient[v];
      result.angles[v] -= update;
      largest = std::max(largest, std::fabs(update));
    }
    result.iterations = it + 1;
    if (largest < params.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.residual = evaluate_layout(edges, result.angles, params).chord_sd;

  double cx = 0.0, cy = 0.0;
  for (double a : result.angles) {
    cx += std::cos(a);
    cy += std::sin(a);
  }
  cx /= kProductVertices;
  cy /= kProductVertices;
  for (std::size_t v = 0; v < kProductVertices; ++v)
    result.signature[v] = std::hypot(std::cos(result.angles[v]) - cx, std::sin(result.angles[v]) - cy);
  return result;
}

double utility_from_edges(int edges, double slope) {
  if (edges < kMinEdges || edges > kMaxEdges)
    throw std::domain_error("edge count " + std::to_string(edges) + " outside [5, 15]");
  return 2.0 / (1.0 + std::exp(-slope * (edges - kUtilityMidpoint))) - 1.0;
}

double valuation(const Signature& ideal, const Signature& signature) {
  double ss = 0.0;
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    const double d = ideal[i] - signature[i];
    ss += d * d;
  }
  return std::sqrt(ss);
}

ProductType make_product_type(int type_id, const ProductTopology& topology, double slope) {
  return {type_id, topology, layout_signature(topology), utility_from_edges(topology.edge_count(), slope)};
}

ProductTopology random_topology(RandomStream& rng) {
  constexpr int kMaxTries = 10000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    ProductTopology topology;
    for (int a = 0; a < kProductVertices; ++a)
      for (int b = a + 1; b < kProductVertices; ++b)
        if (rng.bernoulli(0.5)) topology.add_edge(a, b);
    // A connected graph on six vertices has at least five edges.
    if (topology.connected()) return topology;
  }
  throw std::runtime_error("random_topology: no connected graph after 10000 tries (broken rng?)");
}

std::vector<ProductType> generate_type_set(int n, double d_min, RandomStream& rng, int max_attempts,
                                           double slope) {
  if (n < 1) throw std::invalid_argument("type set size must be at least 1");
  if (d_min < 0.0) throw std::invalid_argument("minimum signature distance must be non-negative");
  std::vector<ProductType> types;
  types.reserve(static_cast<std::size_t>(n));
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(types.size()) < n; ++attempt) {
    auto candidate = make_product_type(static_cast<int>(types.size()), random_topology(rng), slope);
    const bool far_enough = std::all_of(types.begin(), types.end(), [&](const ProductType& t) {
      return valuation(t.signature, candidate.signature) >= d_min;
    });
    if (far_enough) types.push_back(std::move(candidate));
  }
  if (static_cast<int>(types.size()) < n) {
    throw GenerationError("generated only " + std::to_string(types.size()) + " of " +
                              std::to_string(n) + " types with minimum signature distance " +
                              std::to_string(d_min) + " in " + std::to_string(max_attempts) +
                              " attempts",
                          static_cast<int>(types.size()));
  }
  return types;
}

double mean_nearest_neighbor_distance(std::span<const ProductType> types) {
  if (types.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < types.size(); ++j)
      if (i != j) best = std::min(best, valuation(types[i].signature, types[j].signature));
    sum += best;
  }
  return sum / static_cast<double>(types.size());
}

std::vector<int> identify_maxima(std::span<const ProductType> types, double radius) {
  if (types.empty()) throw std::invalid_argument("identify_maxima: empty type set");
  if (!(radius > 0.0)) throw std::invalid_argument("identify_maxima: radius must be positive");
  std::vector<int> maxima;
  for (std::size_t i = 0; i < types.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < types.size() && !dominated; ++j) {
      dominated = j != i && types[j].utility > types[i].utility &&
                  valuation(types[i].signature, types[j].signature) <= radius;
    }
    if (!dominated) maxima.push_back(types[i].type_id);
  }
  return maxima;
}

double nearest_max_distance(const ProductType& type, std::span<const ProductType> maxima) {
  if (maxima.empty()) throw std::domain_error("nearest_max_distance: no maxima");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : maxima) {
    if (m.type_id == type.type_id) return 0.0;
    best = std::min(best, valuation(type.signature, m.signature));
  }
  return best;
}

LandscapeAnalysis analyze_landscape(std::span<const ProductType> types, double radius) {
  LandscapeAnalysis out;
  out.radius = radius > 0.0 ? radius : mean_nearest_neighbor_distance(types);
  // Coincident signatures give a zero radius; any positive radius then works.
  if (!(out.radius > 0.0)) out.radius = std::numeric_limits<double>::min();
  out.maxima = identify_maxima(types, out.radius);
  std::vector<ProductType> max_types;
  for (const auto& t : types)
    if (std::find(out.maxima.begin(), out.maxima.end(), t.type_id) != out.maxima.end())
      max_types.push_back(t);
  for (const auto& t : types) {
    out.utilities.push_back(t.utility);
    out.distances.push_back(nearest_max_distance(t, max_types));
  }
  return out;
}

double type_set_fdc(std::span<const ProductType> types) {
  const auto landscape = analyze_landscape(types);
  return stats::fdc(landscape.utilities, landscape.distances);
}

}  // namespace sitcog
