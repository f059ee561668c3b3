#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace anomq {

using Vertex = std::uint32_t;

// Undirected edge, stored normalized with first < second.
using Edge = std::pair<Vertex, Vertex>;

inline Edge make_edge(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }

struct BuildStats {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

struct AttrStats {
  std::size_t rows = 0;
  std::size_t steps = 0;
  std::size_t missing_rows = 0;
};

/// Undirected attributed network with CSR adjacency.
///
/// Vertex ids are dense (0..n-1). The per-vertex observation matrix W (n x T)
/// and the calibrated p-values are optional and attached after construction.
/// Once built, a graph is treated as immutable and may be shared by
/// concurrent queries.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  // Self-loops and duplicate (including reversed) pairs are dropped.
  static AttributedGraph from_edges(std::size_t n, std::span<const Edge> edges,
                                    BuildStats* stats = nullptr);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(Vertex u, Vertex v) const;

  // Sorted, each edge once with first < second.
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_attrs() const { return steps_ > 0; }
  std::size_t num_steps() const { return steps_; }
  std::span<const double> attr_row(Vertex v) const {
    return {attrs_.data() + static_cast<std::size_t>(v) * steps_, steps_};
  }
  // values is row-major n x steps.
  void set_attrs(std::size_t steps, std::vector<double> values);

  bool has_pvalues() const { return !pvalues_.empty(); }
  std::span<const double> pvalues() const { return pvalues_; }
  double pvalue(Vertex v) const { return pvalues_[v]; }
  // Every entry must lie in (0, 1].
  void set_pvalues(std::vector<double> pvalues);

  // Optional external-id side table.
  bool has_labels() const { return !labels_.empty(); }
  const std::string& label(Vertex v) const { return labels_[v]; }
  void set_labels(std::vector<std::string> labels);

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adj_;
  std::vector<Edge> edges_;
  std::size_t steps_ = 0;
  std::vector<double> attrs_;
  std::vector<double> pvalues_;
  std::vector<std::string> labels_;
};

/// Vertex-induced subgraph: vertices sorted ascending, edges are exactly the
/// host edges with both endpoints inside.
struct Subgraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
  friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

Subgraph induced_subgraph(const AttributedGraph& g, std::span<const Vertex> vs);

bool is_connected(std::size_t n, std::span<const Edge> edges);

// "src<TAB>dst" per line (any whitespace accepted), '#' starts a comment line.
AttributedGraph load_edge_list(const std::filesystem::path& path, BuildStats* stats = nullptr);
void write_edge_list(const std::filesystem::path& path, const AttributedGraph& g);

// CSV with header "vertex,t_0,...,t_{T-1}". Missing rows get fill_value.
AttributedGraph load_attributes(const std::filesystem::path& path, const AttributedGraph& g,
                                double fill_value = 0.0, AttrStats* stats = nullptr);

// CSV "vertex,pvalue". Vertices without a row get p = 1 (no signal).
AttributedGraph load_pvalues(const std::filesystem::path& path, const AttributedGraph& g,
                             std::size_t* missing = nullptr);
void write_pvalues(const std::filesystem::path& path, std::span<const double> pvalues);

// "vertex<TAB>external id" per line.
AttributedGraph load_labels(const std::filesystem::path& path, const AttributedGraph& g);

}  // namespace anomq
