#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anomq/ged.hpp"
#include "anomq/graph.hpp"
#include "anomq/query_graph.hpp"
#include "anomq/scan_stats.hpp"
#include "json.hpp"

namespace anomq {

// One star per query vertex: the vertex and its query neighbors.
struct StarPattern {
  std::size_t center = 0;
  std::size_t leaf_count = 0;
};

struct StarMatch {
  Vertex root = 0;
  std::size_t pattern = 0;
  std::vector<Vertex> vertices;  // root first, then leaves in selection order
  double score = 0.0;
};

struct TraceEntry {
  std::size_t iteration = 0;
  double f_up = 0.0;
  double f_low = 0.0;
  std::size_t ged = 0;
};

struct SearchState {
  std::size_t i = 0;
  std::vector<Vertex> s_up;  // sorted
  Subgraph s_low;
  std::size_t consumed = 0;  // positions of the priority order already examined
  double epsilon = 1e-6;
  std::vector<TraceEntry> trace;
};

struct EngineOptions {
  double epsilon = 1e-6;
  std::size_t max_iters = 0;  // 0 means n
  GedOptions ged;
};

struct LowerBound {
  Subgraph subgraph;
  std::size_t ged = 0;
  bool ged_exact = true;
};

enum class StopReason { Converged, Exhausted, FixedPoint, MaxIters };
std::string to_string(StopReason r);

struct QueryResult {
  Subgraph subgraph;
  ScoreValue score;
  std::size_t ged = 0;
  bool ged_exact = true;
  std::size_t iterations = 0;
  bool feasible = false;
  bool signal = false;  // score > 0
  StopReason stop = StopReason::Converged;
  std::vector<TraceEntry> trace;
  double runtime_ms = 0.0;
};

std::vector<StarPattern> decompose_stars(const QueryGraph& q);

// Re-sorts by (priority desc, |deg(v) - maxdeg(Q)| asc, id asc).
PriorityOrder refine_order(const AttributedGraph& g, const PriorityOrder& order,
                           const QueryGraph& q);

// The m leading vertices of the refined order.
std::vector<Vertex> select_roots(const AttributedGraph& g, const PriorityOrder& order,
                                 const QueryGraph& q);

// S = s_up ∩ V(s_low), topped up with the next unconsumed vertices of order.
// Advances state.consumed past every vertex it examines.
std::vector<Vertex> build_upper_bound(SearchState& state, const PriorityOrder& order,
                                      std::size_t m);

std::optional<StarMatch> best_star_match(const AttributedGraph& g, Vertex v,
                                         const StarPattern& pat, const SubsetScorer& scorer);

// Greedy star assembly: repeatedly union the (root, pattern) match that
// minimizes GED to q, stop once GED increases, keep the GED-minimal union.
LowerBound max_q(const AttributedGraph& g, std::span<const Vertex> s_up, const QueryGraph& q,
                 const SubsetScorer& scorer, const GedOptions& ged_opts = {});

// Alternates upper-bound refresh and max_q until |F(up) - F(low)| < epsilon,
// the priority order is used up, or max_iters. Returns the best-scoring
// lower bound seen over all iterations.
QueryResult anomaly_max_q(const AttributedGraph& g, const QueryGraph& q, const ScoreSpec& spec,
                          const EngineOptions& opts = {});

nlohmann::json to_json(const QueryResult& r, const AttributedGraph* g = nullptr);

}  // namespace anomq
