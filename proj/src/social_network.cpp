#include "sitcog/social_network.h"

#include <algorithm>
#include <string>

namespace sitcog {

const std::map<int, double>& TieGraph::row(int a) const {
  if (a < 0 || a >= size()) throw std::out_of_range("consumer id " + std::to_string(a) + " not in network");
  return adjacency_[static_cast<std::size_t>(a)];
}

std::map<int, double>& TieGraph::row(int a) {
  if (a < 0 || a >= size()) throw std::out_of_range("consumer id " + std::to_string(a) + " not in network");
  return adjacency_[static_cast<std::size_t>(a)];
}

std::optional<double> TieGraph::strength(int a, int b) const {
  const auto& r = row(a);
  if (auto it = r.find(b); it != r.end()) return it->second;
  return std::nullopt;
}

double TieGraph::mean_strength(int a) const {
  const auto& r = row(a);
  if (r.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [_, s] : r) sum += s;
  return sum / static_cast<double>(r.size());
}

std::vector<int> TieGraph::neighbors(int a) const {
  std::vector<int> out;
  for (const auto& [b, _] : row(a)) out.push_back(b);
  return out;
}

std::vector<Tie> TieGraph::ties() const {
  std::vector<Tie> out;
  for (int a = 0; a < size(); ++a)
    for (const auto& [b, s] : adjacency_[static_cast<std::size_t>(a)])
      if (a < b) out.push_back({a, b, s});
  return out;
}

std::size_t TieGraph::tie_count() const {
  std::size_t twice = 0;
  for (const auto& r : adjacency_) twice += r.size();
  return twice / 2;
}

void TieGraph::set_tie(int a, int b, double s) {
  if (a == b) throw std::invalid_argument("self-tie");
  s = std::clamp(s, 0.0, 1.0);
  row(a)[b] = s;
  row(b)[a] = s;
}

void TieGraph::remove_tie(int a, int b) {
  row(a).erase(b);
  row(b).erase(a);
}

void TieGraph::strengthen(int a, int b, double delta) {
  if (a == b) throw std::invalid_argument("self-tie");
  set_tie(a, b, strength(a, b).value_or(0.0) + delta);
}

void TieGraph::decay_all(double gamma, double floor) {
  for (int a = 0; a < size(); ++a) {
    auto& r = adjacency_[static_cast<std::size_t>(a)];
    for (auto it = r.begin(); it != r.end();) {
      it->second -= gamma;
      if (it->second < floor - kTieFloorSlack)
        it = r.erase(it);
      else
        ++it;
    }
  }
}

bool TieGraph::connected() const {
  if (size() == 0) return true;
  std::vector<bool> seen(adjacency_.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [w, _] : adjacency_[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == size();
}

bool TieGraph::audit() const {
  for (int a = 0; a < size(); ++a) {
    for (const auto& [b, s] : adjacency_[static_cast<std::size_t>(a)]) {
      if (a == b || b < 0 || b >= size() || s < 0.0 || s > 1.0) return false;
      const auto back = strength(b, a);
      if (!back || *back != s) return false;
    }
  }
  return true;
}

TieGraph init_watts_strogatz(int n, int k, double beta, RandomStream& rng, double initial_strength,
                             int max_attempts) {
  if (k < 2 || k % 2 != 0 || n <= k) throw std::invalid_argument("Watts-Strogatz needs even k >= 2 and n > k");
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("rewire probability outside [0, 1]");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    TieGraph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = 1; j <= k / 2; ++j) g.set_tie(i, (i + j) % n, initial_strength);
    for (int j = 1; j <= k / 2; ++j) {
      for (int i = 0; i < n; ++i) {
        const int far = (i + j) % n;
        if (!g.has_tie(i, far) || !rng.bernoulli(beta)) continue;
        if (g.degree(i) >= n - 1) continue;
        int target;
        do {
          target = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        } while (target == i || g.has_tie(i, target));
        g.remove_tie(i, far);
        g.set_tie(i, target, initial_strength);
      }
    }
    if (g.connected()) return g;
  }
  throw NetworkInitError("no connected Watts-Strogatz graph after " + std::to_string(max_attempts) +
                         " attempts (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

std::optional<int> referral(TieGraph& graph, int c, RandomStream& rng, double strength) {
  int best = -1;
  double best_score = -1.0;
  for (int a : graph.neighbors(c)) {
    const double sca = *graph.strength(c, a);
    for (int b : graph.neighbors(a)) {
      if (b == c || graph.has_tie(c, b)) continue;
      const double score = sca * *graph.strength(a, b);
      if (score > best_score || (score == best_score && b < best)) {
        best_score = score;
        best = b;
      }
    }
  }
  if (best < 0) {
    std::vector<int> candidates;
    for (int b = 0; b < graph.size(); ++b)
      if (b != c && !graph.has_tie(c, b)) candidates.push_back(b);
    if (candidates.empty()) return std::nullopt;
    best = candidates[rng.uniform_index(candidates.size())];
  }
  graph.set_tie(c, best, strength);
  return best;
}

}  // namespace sitcog
