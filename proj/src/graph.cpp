#include "anomq/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "anomq/error.hpp"
#include "text_util.hpp"

namespace anomq {

AttributedGraph AttributedGraph::from_edges(std::size_t n, std::span<const Edge> edges,
                                            BuildStats* stats) {
  AttributedGraph g;
  g.n_ = n;
  BuildStats st;
  st.vertices = n;
  g.edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw std::invalid_argument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for " + std::to_string(n) + " vertices");
    }
    if (u == v) {
      ++st.self_loops_dropped;
      continue;
    }
    g.edges_.push_back(make_edge(u, v));
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  auto last = std::unique(g.edges_.begin(), g.edges_.end());
  st.duplicates_dropped = static_cast<std::size_t>(g.edges_.end() - last);
  g.edges_.erase(last, g.edges_.end());
  st.edges = g.edges_.size();

  g.offsets_.assign(n + 1, 0);
  for (auto [u, v] : g.edges_) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adj_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : g.edges_) {
    g.adj_[cursor[u]++] = v;
    g.adj_[cursor[v]++] = u;
  }
  // edges_ is sorted, so every neighbor list is already ascending
  if (stats) *stats = st;
  return g;
}

bool AttributedGraph::has_edge(Vertex u, Vertex v) const {
  if (u >= n_ || v >= n_) return false;
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

void AttributedGraph::set_attrs(std::size_t steps, std::vector<double> values) {
  if (steps == 0 || values.size() != n_ * steps) {
    throw std::invalid_argument("attribute matrix must have " + std::to_string(n_) +
                                " rows and at least one column");
  }
  steps_ = steps;
  attrs_ = std::move(values);
}

void AttributedGraph::set_pvalues(std::vector<double> pvalues) {
  if (pvalues.size() != n_) {
    throw std::invalid_argument("p-value vector length " + std::to_string(pvalues.size()) +
                                " != vertex count " + std::to_string(n_));
  }
  for (std::size_t v = 0; v < pvalues.size(); ++v) {
    if (!(pvalues[v] > 0.0 && pvalues[v] <= 1.0)) {
      throw std::invalid_argument("p-value of vertex " + std::to_string(v) +
                                  " outside (0,1]: " + std::to_string(pvalues[v]));
    }
  }
  pvalues_ = std::move(pvalues);
}

void AttributedGraph::set_labels(std::vector<std::string> labels) {
  if (labels.size() != n_) throw std::invalid_argument("label table size mismatch");
  labels_ = std::move(labels);
}

Subgraph induced_subgraph(const AttributedGraph& g, std::span<const Vertex> vs) {
  Subgraph s;
  s.vertices.assign(vs.begin(), vs.end());
  std::sort(s.vertices.begin(), s.vertices.end());
  s.vertices.erase(std::unique(s.vertices.begin(), s.vertices.end()), s.vertices.end());
  for (Vertex v : s.vertices) {
    if (v >= g.num_vertices()) {
      throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
    }
  }
  for (Vertex u : s.vertices) {
    for (Vertex w : g.neighbors(u)) {
      if (w > u && std::binary_search(s.vertices.begin(), s.vertices.end(), w)) {
        s.edges.emplace_back(u, w);
      }
    }
  }
  return s;
}

bool is_connected(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

}  // namespace

AttributedGraph load_edge_list(const std::filesystem::path& path, BuildStats* stats) {
  auto in = open_input(path);
  std::vector<Edge> raw;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = detail::split_ws(body);
    if (fields.size() != 2) {
      throw InputError(where(path, lineno) + ": expected \"src<TAB>dst\", got \"" +
                       std::string(body) + "\"");
    }
    auto u = detail::parse_uint(fields[0]);
    auto v = detail::parse_uint(fields[1]);
    if (!u || !v) {
      throw InputError(where(path, lineno) + ": vertex ids must be non-negative integers");
    }
    raw.push_back({static_cast<Vertex>(*u), static_cast<Vertex>(*v)});
    n = std::max<std::size_t>(n, std::max(*u, *v) + 1);
  }
  if (raw.empty()) throw InputError(path.string() + ": empty graph");
  // Self-loops and duplicates are normalized away here, not reported as errors.
  auto g = AttributedGraph::from_edges(n, raw, stats);
  return g;
}

void write_edge_list(const std::filesystem::path& path, const AttributedGraph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "# vertices " << g.num_vertices() << " edges " << g.num_edges() << "\n";
  for (auto [u, v] : g.edges()) out << u << '\t' << v << '\n';
}

AttributedGraph load_attributes(const std::filesystem::path& path, const AttributedGraph& g,
                                double fill_value, AttrStats* stats) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::size_t steps = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) break;
  }
  std::vector<std::string> names;
  {
    auto header = detail::split_csv(detail::trim(line));
    if (header.size() < 2 || header[0] != "vertex") {
      throw InputError(where(path, lineno) + ": header must be \"vertex,t_0,...\"");
    }
    steps = header.size() - 1;
    for (auto h : header) names.emplace_back(h);
  }
  const std::size_t n = g.num_vertices();
  std::vector<double> values(n * steps, fill_value);
  std::vector<char> seen(n, 0);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty()) continue;
    auto cells = detail::split_csv(body);
    if (cells.size() != steps + 1) {
      throw InputError(where(path, lineno) + ": expected " + std::to_string(steps + 1) +
                       " columns, got " + std::to_string(cells.size()));
    }
    auto v = detail::parse_uint(cells[0]);
    if (!v) throw InputError(where(path, lineno) + ", column 1: bad vertex id");
    if (*v >= n) {
      throw InputError(where(path, lineno) + ": vertex " + std::to_string(*v) +
                       " outside graph of " + std::to_string(n) + " vertices");
    }
    if (seen[*v]) {
      throw InputError(where(path, lineno) + ": duplicate row for vertex " + std::to_string(*v));
    }
    seen[*v] = 1;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      auto x = detail::parse_double(cells[c]);
      if (!x) {
        throw InputError(where(path, lineno) + ", column " + std::to_string(c + 1) + " (" +
                         names[c] + "): non-numeric value \"" + std::string(cells[c]) + "\"");
      }
      values[*v * steps + (c - 1)] = *x;
    }
    ++rows;
  }
  AttributedGraph out = g;
  out.set_attrs(steps, std::move(values));
  if (stats) *stats = {rows, steps, n - rows};
  return out;
}

AttributedGraph load_pvalues(const std::filesystem::path& path, const AttributedGraph& g,
                             std::size_t* missing) {
  auto in = open_input(path);
  const std::size_t n = g.num_vertices();
  std::vector<double> p(n, 1.0);
  std::vector<char> seen(n, 0);
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto cells = detail::split_csv(body);
    if (!header_done) {
      header_done = true;
      if (cells.size() == 2 && cells[0] == "vertex") continue;
    }
    if (cells.size() != 2) throw InputError(where(path, lineno) + ": expected \"vertex,pvalue\"");
    auto v = detail::parse_uint(cells[0]);
    auto x = detail::parse_double(cells[1]);
    if (!v || !x) throw InputError(where(path, lineno) + ": malformed row");
    if (*v >= n) throw InputError(where(path, lineno) + ": vertex out of range");
    if (seen[*v]) throw InputError(where(path, lineno) + ": duplicate row");
    if (!(*x > 0.0 && *x <= 1.0)) throw InputError(where(path, lineno) + ": p-value outside (0,1]");
    seen[*v] = 1;
    p[*v] = *x;
    ++rows;
  }
  AttributedGraph out = g;
  out.set_pvalues(std::move(p));
  if (missing) *missing = n - rows;
  return out;
}

void write_pvalues(const std::filesystem::path& path, std::span<const double> pvalues) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "vertex,pvalue\n";
  char buf[64];
  for (std::size_t v = 0; v < pvalues.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%.17g", pvalues[v]);
    out << v << ',' << buf << '\n';
  }
}

AttributedGraph load_labels(const std::filesystem::path& path, const AttributedGraph& g) {
  auto in = open_input(path);
  std::vector<std::string> labels(g.num_vertices());
  for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = std::to_string(v);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto tab = body.find('\t');
    if (tab == std::string_view::npos) throw InputError(where(path, lineno) + ": expected tab");
    auto v = detail::parse_uint(body.substr(0, tab));
    if (!v || *v >= labels.size()) throw InputError(where(path, lineno) + ": bad vertex id");
    labels[*v] = std::string(detail::trim(body.substr(tab + 1)));
  }
  AttributedGraph out = g;
  out.set_labels(std::move(labels));
  return out;
}

}  // namespace anomq
