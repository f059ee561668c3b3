#include "anomq/query_graph.hpp"

#include <algorithm>
#include <set>

#include "anomq/error.hpp"

namespace anomq {

std::string to_string(Shape s) {
  switch (s) {
    case Shape::Ring: return "ring";
    case Shape::Line: return "line";
    case Shape::Star: return "star";
    case Shape::Bipartite: return "bipartite";
    case Shape::Tree: return "tree";
    case Shape::Custom: return "custom";
  }
  return "custom";
}

std::string QuerySpec::name() const {
  switch (shape) {
    case Shape::Ring: return "ring(" + std::to_string(k) + ")";
    case Shape::Line: return "line(" + std::to_string(k) + ")";
    case Shape::Star: return "star(" + std::to_string(k) + ")";
    case Shape::Bipartite: return "bipartite(" + std::to_string(a) + "," + std::to_string(b) + ")";
    case Shape::Tree:
      return "tree(" + std::to_string(branching) + "," + std::to_string(depth) + ")";
    case Shape::Custom: return "custom(" + std::to_string(edges.size()) + " edges)";
  }
  return "custom";
}

std::vector<std::size_t> QueryGraph::degrees() const {
  std::vector<std::size_t> d(m, 0);
  for (auto [u, v] : edges) {
    ++d[u];
    ++d[v];
  }
  return d;
}

std::size_t QueryGraph::max_degree() const {
  auto d = degrees();
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

}  // namespace

QueryGraph build_query(const QuerySpec& spec) {
  QueryGraph q;
  q.shape = spec.shape;
  auto add = [&](std::size_t u, std::size_t v) {
    q.edges.push_back(make_edge(static_cast<Vertex>(u), static_cast<Vertex>(v)));
  };
  switch (spec.shape) {
    case Shape::Ring:
      require(spec.k >= 3, "ring(k) needs k >= 3");
      q.m = spec.k;
      for (std::size_t i = 0; i < q.m; ++i) add(i, (i + 1) % q.m);
      break;
    case Shape::Line:
      require(spec.k >= 2, "line(k) needs k >= 2");
      q.m = spec.k;
      for (std::size_t i = 0; i + 1 < q.m; ++i) add(i, i + 1);
      break;
    case Shape::Star:
      require(spec.k >= 1, "star(k) needs at least one leaf");
      q.m = spec.k + 1;
      for (std::size_t i = 1; i < q.m; ++i) add(0, i);
      break;
    case Shape::Bipartite:
      require(spec.a >= 1 && spec.b >= 1, "bipartite(a,b) needs a, b >= 1");
      q.m = spec.a + spec.b;
      for (int i = 0; i < spec.a; ++i)
        for (int j = 0; j < spec.b; ++j) add(i, spec.a + j);
      break;
    case Shape::Tree: {
      require(spec.branching >= 1 && spec.depth >= 1, "tree needs branching >= 1 and depth >= 1");
      std::size_t level_begin = 0, level_size = 1;
      q.m = 1;
      for (int d = 0; d < spec.depth; ++d) {
        for (std::size_t p = level_begin; p < level_begin + level_size; ++p) {
          for (int c = 0; c < spec.branching; ++c) add(p, q.m++);
        }
        level_begin += level_size;
        level_size *= spec.branching;
      }
      break;
    }
    case Shape::Custom: {
      std::size_t m = 0;
      std::set<Edge> seen;
      for (auto [u, v] : spec.edges) {
        require(u != v, "query edge list contains a self-loop");
        auto e = make_edge(u, v);
        if (seen.insert(e).second) q.edges.push_back(e);
        m = std::max<std::size_t>(m, std::max(u, v) + 1);
      }
      q.m = m;
      break;
    }
  }
  require(q.m >= 2, "query graph needs at least 2 vertices");
  require(is_connected(q.m, q.edges), "query graph is disconnected");
  std::sort(q.edges.begin(), q.edges.end());
  return q;
}

QuerySpec query_spec_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("edges")) {
      std::vector<Edge> edges;
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw InputError("query edge must be [u, v]");
        auto u = e[0].get<long long>(), v = e[1].get<long long>();
        if (u < 0 || v < 0) throw InputError("query vertex ids must be non-negative");
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
      }
      return QuerySpec::custom(std::move(edges));
    }
    const auto shape = j.at("shape").get<std::string>();
    if (shape == "ring") return QuerySpec::ring(j.at("k").get<int>());
    if (shape == "line") return QuerySpec::line(j.at("k").get<int>());
    if (shape == "star") return QuerySpec::star(j.at("k").get<int>());
    if (shape == "bipartite") return QuerySpec::bipartite(j.at("a").get<int>(), j.at("b").get<int>());
    if (shape == "tree") {
      return QuerySpec::tree(j.at("branching").get<int>(), j.at("depth").get<int>());
    }
    throw InputError("unknown query shape \"" + shape + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad query spec: ") + e.what());
  }
}

nlohmann::json to_json(const QuerySpec& spec) {
  using nlohmann::json;
  switch (spec.shape) {
    case Shape::Ring:
    case Shape::Line:
    case Shape::Star: return json{{"shape", to_string(spec.shape)}, {"k", spec.k}};
    case Shape::Bipartite: return json{{"shape", "bipartite"}, {"a", spec.a}, {"b", spec.b}};
    case Shape::Tree:
      return json{{"shape", "tree"}, {"branching", spec.branching}, {"depth", spec.depth}};
    case Shape::Custom: {
      json edges = json::array();
      for (auto [u, v] : spec.edges) edges.push_back({u, v});
      return json{{"edges", edges}};
    }
  }
  return {};
}

std::vector<QuerySpec> default_queries() {
  // two 3-leaf stars whose centers are joined
  auto double_star = QuerySpec::custom({{0, 1}, {0, 2}, {0, 3}, {0, 4}, {4, 5}, {4, 6}, {4, 7}});
  return {QuerySpec::ring(3),         QuerySpec::line(4), QuerySpec::star(4),
          QuerySpec::bipartite(2, 3), QuerySpec::tree(2, 2), double_star};
}

}  // namespace anomq
