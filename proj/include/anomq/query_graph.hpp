#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "anomq/graph.hpp"
#include "json.hpp"

namespace anomq {

enum class Shape { Ring, Line, Star, Bipartite, Tree, Custom };

std::string to_string(Shape s);

/// Description of a query shape, as read from {"shape":"ring","k":3} or
/// {"edges":[[0,1],...]}.
struct QuerySpec {
  Shape shape = Shape::Custom;
  int k = 0;          // ring / line vertex count, star leaf count
  int a = 0, b = 0;   // bipartite sides
  int branching = 0;  // balanced tree
  int depth = 0;
  std::vector<Edge> edges;  // custom only

  static QuerySpec ring(int k) { return with(Shape::Ring, [k](QuerySpec& s) { s.k = k; }); }
  static QuerySpec line(int k) { return with(Shape::Line, [k](QuerySpec& s) { s.k = k; }); }
  static QuerySpec star(int leaves) {
    return with(Shape::Star, [leaves](QuerySpec& s) { s.k = leaves; });
  }
  static QuerySpec bipartite(int a, int b) {
    return with(Shape::Bipartite, [a, b](QuerySpec& s) { s.a = a; s.b = b; });
  }
  static QuerySpec tree(int branching, int depth) {
    return with(Shape::Tree, [=](QuerySpec& s) { s.branching = branching; s.depth = depth; });
  }
  static QuerySpec custom(std::vector<Edge> edges) {
    QuerySpec s;
    s.edges = std::move(edges);
    return s;
  }

  std::string name() const;

 private:
  template <class F>
  static QuerySpec with(Shape shape, F&& set) {
    QuerySpec s;
    s.shape = shape;
    set(s);
    return s;
  }
};

/// Small unlabeled target shape. Always connected with m >= 2.
struct QueryGraph {
  std::size_t m = 0;
  std::vector<Edge> edges;
  Shape shape = Shape::Custom;

  std::vector<std::size_t> degrees() const;
  std::size_t max_degree() const;
};

QueryGraph build_query(const QuerySpec& spec);

QuerySpec query_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QuerySpec& spec);

// The six default experiment shapes (ring, line, star, bipartite, tree,
// double star).
std::vector<QuerySpec> default_queries();

}  // namespace anomq
