// Shared helpers and independent brute-force oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "anomq/ged.hpp"
#include "anomq/graph.hpp"
#include "anomq/scan_stats.hpp"

namespace anomq::testing {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("anomq_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Random graph on n vertices, each pair present with probability pe.
inline std::vector<Edge> random_edges(std::size_t n, double pe, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(pe);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  return edges;
}

inline std::vector<double> uniform_pvalues(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& x : p) x = 1.0 - u(rng);  // (0, 1]
  return p;
}

// ---------------------------------------------------------------------------
// Nonparametric scan score written directly from the definitions, without the
// library's grid scan.

inline double ref_bj(double a, double na, double n) {
  const double q = na / n;
  if (q <= a) return 0.0;
  double kl = q * std::log(q / a);
  if (q < 1.0) kl += (1.0 - q) * std::log((1.0 - q) / (1.0 - a));
  return n * kl;
}

inline double ref_hc(double a, double na, double n) {
  return std::max(0.0, (na - n * a) / std::sqrt(n * a * (1.0 - a)));
}

inline double ref_npss(const std::vector<double>& p, Statistic stat, double alpha_max) {
  std::vector<double> grid{alpha_max};
  for (double x : p)
    if (x <= alpha_max) grid.push_back(x);
  double best = 0.0;
  for (double a : grid) {
    if (a >= 1.0) continue;
    double na = 0;
    for (double x : p)
      if (x <= a) ++na;
    const double n = static_cast<double>(p.size());
    best = std::max(best, stat == Statistic::BJ ? ref_bj(a, na, n) : ref_hc(a, na, n));
  }
  return best;
}

// Max of ref_npss over every non-empty subset.
inline double exhaustive_subset_max(const std::vector<double>& p, Statistic stat,
                                    double alpha_max) {
  const std::size_t n = p.size();
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<double> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) sub.push_back(p[i]);
    best = std::max(best, ref_npss(sub, stat, alpha_max));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Edit-sequence search: breadth-first over isomorphism classes of small
// graphs, one unit edit per step (add/remove an edge, add/remove an isolated
// vertex). Graphs are (n, upper-triangle bitmask) pairs.

struct TinyGraph {
  int n = 0;
  std::uint32_t mask = 0;
  auto operator<=>(const TinyGraph&) const = default;
};

inline int pair_bit(int u, int v) {
  if (u > v) std::swap(u, v);
  return v * (v - 1) / 2 + u;
}

inline TinyGraph to_tiny(const SmallGraph& g) {
  TinyGraph t{static_cast<int>(g.size()), 0};
  for (auto [u, v] : g.edges()) t.mask |= 1u << pair_bit(static_cast<int>(u), static_cast<int>(v));
  return t;
}

inline TinyGraph canonical(const TinyGraph& g) {
  std::vector<int> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  TinyGraph best{g.n, ~0u};
  do {
    std::uint32_t m = 0;
    for (int u = 0; u < g.n; ++u)
      for (int v = u + 1; v < g.n; ++v)
        if (g.mask >> pair_bit(u, v) & 1u) m |= 1u << pair_bit(perm[u], perm[v]);
    best.mask = std::min(best.mask, m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (g.n < 2) best.mask = 0;
  return best;
}

inline std::size_t edit_search_distance(const SmallGraph& a, const SmallGraph& b) {
  static std::map<std::pair<TinyGraph, TinyGraph>, std::size_t> cache;
  const TinyGraph start = canonical(to_tiny(a));
  const TinyGraph goal = canonical(to_tiny(b));
  if (auto it = cache.find({start, goal}); it != cache.end()) return it->second;

  const int cap = std::max(start.n, goal.n);
  std::map<TinyGraph, std::size_t> dist{{start, 0}};
  std::queue<TinyGraph> frontier;
  frontier.push(start);
  while (!frontier.empty()) {
    const TinyGraph cur = frontier.front();
    frontier.pop();
    const std::size_t d = dist[cur];
    if (cur == goal) {
      cache[{start, goal}] = d;
      return d;
    }
    std::vector<TinyGraph> next;
    for (int u = 0; u < cur.n; ++u)
      for (int v = u + 1; v < cur.n; ++v) next.push_back({cur.n, cur.mask ^ (1u << pair_bit(u, v))});
    if (cur.n < cap) next.push_back({cur.n + 1, cur.mask});
    for (int x = 0; x < cur.n; ++x) {
      bool isolated = true;
      for (int y = 0; y < cur.n; ++y)
        if (y != x && (cur.mask >> pair_bit(x, y) & 1u)) isolated = false;
      if (!isolated) continue;
      // drop x by shifting higher ids down
      TinyGraph r{cur.n - 1, 0};
      for (int u = 0; u < cur.n; ++u)
        for (int v = u + 1; v < cur.n; ++v)
          if (cur.mask >> pair_bit(u, v) & 1u)
            r.mask |= 1u << pair_bit(u > x ? u - 1 : u, v > x ? v - 1 : v);
      next.push_back(r);
    }
    for (const auto& nx : next) {
      const TinyGraph c = canonical(nx);
      if (dist.emplace(c, d + 1).second) frontier.push(c);
    }
  }
  return SIZE_MAX;  // unreachable: every pair is connected by edits
}

// Induced subgraph on vs is isomorphic to the pattern (both relabeled).
inline bool isomorphic(const SmallGraph& a, const SmallGraph& b) {
  if (a.size() != b.size() || a.num_edges() != b.num_edges()) return false;
  return canonical(to_tiny(a)) == canonical(to_tiny(b));
}

}  // namespace anomq::testing
