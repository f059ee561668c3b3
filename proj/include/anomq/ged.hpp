#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anomq/graph.hpp"
#include "anomq/query_graph.hpp"

namespace anomq {

/// Plain unlabeled graph on vertices 0..n-1 with an adjacency matrix, the
/// operand type for edit-distance computations.
class SmallGraph {
 public:
  SmallGraph() = default;
  SmallGraph(std::size_t n, std::span<const Edge> edges);

  // Relabels the subgraph's vertices to 0..k-1 in ascending order.
  static SmallGraph from(const Subgraph& s);
  static SmallGraph from(const QueryGraph& q);

  std::size_t size() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool adjacent(std::size_t u, std::size_t v) const { return adj_[u * n_ + v] != 0; }
  std::size_t degree(std::size_t v) const { return degree_[v]; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degree_;
};

struct GedOptions {
  std::size_t exact_limit = 16;        // combined vertex count for the exact solver
  std::size_t node_budget = 2'000'000;  // search nodes before the exact solver gives up
};

struct GedResult {
  std::size_t distance = 0;
  bool exact = false;
  // mapping[u] = vertex of b matched to vertex u of a, or -1 when u is deleted.
  std::vector<int> mapping;
};

// Unit-cost GED: vertex insert/delete and edge insert/delete each cost 1,
// substitution is free. Equivalently
//   |n_a - n_b| + |E_a| + |E_b| - 2 * (edges preserved by the best injection).

// Branch-and-bound over injections of the smaller graph into the larger.
// Throws ResourceLimit above exact_limit. If node_budget runs out the best
// mapping found so far is returned with exact = false.
GedResult ged_exact(const SmallGraph& a, const SmallGraph& b, const GedOptions& opts = {});

// Upper bound: degree-sorted assignment refined by swap/move local search.
GedResult ged_bounded(const SmallGraph& a, const SmallGraph& b);

// Exact when a.size() + b.size() <= exact_limit, bounded otherwise.
GedResult ged(const SmallGraph& a, const SmallGraph& b, const GedOptions& opts = {});

}  // namespace anomq
