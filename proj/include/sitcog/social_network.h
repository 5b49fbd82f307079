#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sitcog/rng.h"

namespace sitcog {

struct Tie {
  int a = 0;
  int b = 0;
  double strength = 0.0;
  bool operator==(const Tie&) const = default;
};

// Removal compares with this slack so that a tie decayed to the floor in
// floating point (e.g. 0.051 - 0.001) survives until the next decay.
inline constexpr double kTieFloorSlack = 1e-9;

// Undirected weighted ties over consumer ids; strengths in [0, 1].
class TieGraph {
 public:
  explicit TieGraph(int n = 0) : adjacency_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(adjacency_.size()); }
  std::optional<double> strength(int a, int b) const;
  bool has_tie(int a, int b) const { return strength(a, b).has_value(); }
  int degree(int a) const { return static_cast<int>(row(a).size()); }
  // Zero for an isolated node.
  double mean_strength(int a) const;
  // Ascending ids.
  std::vector<int> neighbors(int a) const;
  // Each tie once, a < b, ascending.
  std::vector<Tie> ties() const;
  std::size_t tie_count() const;

  void set_tie(int a, int b, double strength);
  void remove_tie(int a, int b);

  // Adds delta (creating the tie at delta when absent), clamped at 1.
  void strengthen(int a, int b, double delta);
  // Subtracts gamma from every tie and removes ties that fall below floor.
  void decay_all(double gamma, double floor);

  bool connected() const;
  // Symmetric, no self-ties, strengths within [0, 1].
  bool audit() const;

  bool operator==(const TieGraph&) const = default;

 private:
  const std::map<int, double>& row(int a) const;
  std::map<int, double>& row(int a);

  std::vector<std::map<int, double>> adjacency_;
};

struct NetworkInitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ring lattice of even degree k; each lattice edge (i, i + j) has its far end
// rewired with probability beta to a uniform node that is neither i nor a
// current neighbour of i. Redrawn until connected.
TieGraph init_watts_strogatz(int n, int k, double beta, RandomStream& rng, double initial_strength = 0.5,
                             int max_attempts = 100);

// Friend-of-friend tie for c: the non-neighbour two hops away with the
// largest product of connecting strengths (lowest id on ties); otherwise a
// uniform random non-neighbour. Returns the new neighbour, if any.
std::optional<int> referral(TieGraph& graph, int c, RandomStream& rng, double strength = 0.5);

}  // namespace sitcog
