#include "anomq/ged.hpp"

#include <algorithm>
#include <numeric>

#include "anomq/error.hpp"

namespace anomq {

SmallGraph::SmallGraph(std::size_t n, std::span<const Edge> edges)
    : n_(n), adj_(n * n, 0), degree_(n, 0) {
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("SmallGraph edge out of range");
    if (u == v || adj_[u * n + v]) continue;
    adj_[u * n + v] = adj_[v * n + u] = 1;
    ++degree_[u];
    ++degree_[v];
    edges_.push_back(make_edge(u, v));
  }
}

SmallGraph SmallGraph::from(const Subgraph& s) {
  std::vector<Edge> local;
  local.reserve(s.edges.size());
  auto index = [&](Vertex v) {
    return static_cast<Vertex>(std::lower_bound(s.vertices.begin(), s.vertices.end(), v) -
                               s.vertices.begin());
  };
  for (auto [u, v] : s.edges) local.emplace_back(index(u), index(v));
  return SmallGraph(s.vertices.size(), local);
}

SmallGraph SmallGraph::from(const QueryGraph& q) { return SmallGraph(q.m, q.edges); }

namespace {

std::size_t abs_diff(std::size_t x, std::size_t y) { return x > y ? x - y : y - x; }

std::size_t distance_for(const SmallGraph& a, const SmallGraph& b, std::size_t preserved) {
  return abs_diff(a.size(), b.size()) + a.num_edges() + b.num_edges() - 2 * preserved;
}

// image[u] for u in small; counts small edges that land on large edges.
std::size_t preserved_edges(const SmallGraph& small, const SmallGraph& large,
                            const std::vector<int>& image) {
  std::size_t kept = 0;
  for (auto [u, v] : small.edges()) {
    if (image[u] >= 0 && image[v] >= 0 && large.adjacent(image[u], image[v])) ++kept;
  }
  return kept;
}

GedResult finish(const SmallGraph& a, const SmallGraph& b, bool a_is_small,
                 const std::vector<int>& image, std::size_t preserved, bool exact) {
  GedResult r;
  r.distance = distance_for(a, b, preserved);
  r.exact = exact;
  if (a_is_small) {
    r.mapping = image;
  } else {
    r.mapping.assign(a.size(), -1);
    for (std::size_t u = 0; u < image.size(); ++u) {
      if (image[u] >= 0) r.mapping[image[u]] = static_cast<int>(u);
    }
  }
  return r;
}

class BranchAndBound {
 public:
  BranchAndBound(const SmallGraph& small, const SmallGraph& large, std::size_t budget)
      : small_(small), large_(large), budget_(budget) {
    order_vertices();
    ceiling_ = std::min(small_.num_edges(), large_.num_edges());
    image_.assign(small_.size(), -1);
    used_.assign(large_.size(), 0);
    best_image_.assign(small_.size(), -1);
  }

  void run() {
    // any injection is feasible; seed with the identity so best_ is valid
    for (std::size_t i = 0; i < small_.size(); ++i) best_image_[i] = static_cast<int>(i);
    best_ = preserved_edges(small_, large_, best_image_);
    if (best_ < ceiling_) search(0, 0);
  }

  std::size_t best() const { return best_; }
  const std::vector<int>& best_image() const { return best_image_; }
  bool complete() const { return !exhausted_; }

 private:
  void order_vertices() {
    const std::size_t n = small_.size();
    std::vector<char> placed(n, 0);
    std::vector<std::size_t> links(n, 0);
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t pick = n;
      for (std::size_t u = 0; u < n; ++u) {
        if (placed[u]) continue;
        if (pick == n || links[u] > links[pick] ||
            (links[u] == links[pick] && small_.degree(u) > small_.degree(pick))) {
          pick = u;
        }
      }
      placed[pick] = 1;
      order_.push_back(pick);
      for (std::size_t w = 0; w < n; ++w) {
        if (small_.adjacent(pick, w)) ++links[w];
      }
    }
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[order_[i]] = i;
    back_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (small_.adjacent(order_[i], order_[j])) back_[i].push_back(order_[j]);
      }
    }
    // open_[d]: small edges not yet decided once positions < d are assigned
    open_.assign(n + 1, 0);
    for (std::size_t d = n; d-- > 0;) open_[d] = open_[d + 1] + back_[d].size();
  }

  void search(std::size_t depth, std::size_t kept) {
    if (exhausted_ || best_ == ceiling_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (depth == order_.size()) {
      if (kept > best_) {
        best_ = kept;
        best_image_ = image_;
      }
      return;
    }
    if (kept + open_[depth] <= best_) return;
    const std::size_t u = order_[depth];
    std::vector<std::pair<std::size_t, std::size_t>> cands;  // (gain, vertex)
    for (std::size_t w = 0; w < large_.size(); ++w) {
      if (used_[w]) continue;
      std::size_t gain = 0;
      for (std::size_t x : back_[depth]) {
        if (large_.adjacent(w, image_[x])) ++gain;
      }
      cands.emplace_back(gain, w);
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& l, const auto& r) { return l.first > r.first; });
    for (auto [gain, w] : cands) {
      if (kept + gain + open_[depth + 1] <= best_) break;
      image_[u] = static_cast<int>(w);
      used_[w] = 1;
      search(depth + 1, kept + gain);
      used_[w] = 0;
      image_[u] = -1;
      if (exhausted_ || best_ == ceiling_) return;
    }
  }

  const SmallGraph& small_;
  const SmallGraph& large_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
  std::size_t ceiling_ = 0;
  std::size_t best_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> back_;
  std::vector<std::size_t> open_;
  std::vector<int> image_;
  std::vector<char> used_;
  std::vector<int> best_image_;
};

}  // namespace

GedResult ged_exact(const SmallGraph& a, const SmallGraph& b, const GedOptions& opts) {
  if (a.size() + b.size() > opts.exact_limit) {
    throw ResourceLimit("exact GED limited to " + std::to_string(opts.exact_limit) +
                        " combined vertices, got " + std::to_string(a.size() + b.size()));
  }
  const bool a_small = a.size() <= b.size();
  const SmallGraph& small = a_small ? a : b;
  const SmallGraph& large = a_small ? b : a;
  BranchAndBound bnb(small, large, opts.node_budget);
  bnb.run();
  return finish(a, b, a_small, bnb.best_image(), bnb.best(), bnb.complete());
}

GedResult ged_bounded(const SmallGraph& a, const SmallGraph& b) {
  const bool a_small = a.size() <= b.size();
  const SmallGraph& small = a_small ? a : b;
  const SmallGraph& large = a_small ? b : a;

  auto by_degree = [](const SmallGraph& g) {
    std::vector<std::size_t> vs(g.size());
    std::iota(vs.begin(), vs.end(), std::size_t{0});
    std::stable_sort(vs.begin(), vs.end(),
                     [&](std::size_t x, std::size_t y) { return g.degree(x) > g.degree(y); });
    return vs;
  };
  const auto so = by_degree(small), lo = by_degree(large);
  std::vector<int> image(small.size(), -1);
  std::vector<int> owner(large.size(), -1);
  for (std::size_t i = 0; i < so.size(); ++i) {
    image[so[i]] = static_cast<int>(lo[i]);
    owner[lo[i]] = static_cast<int>(so[i]);
  }
  std::size_t kept = preserved_edges(small, large, image);

  // First-improvement local search over swaps (target owned) and moves
  // (target free). Each accepted step strictly increases kept.
  bool improved = true;
  while (improved && kept < std::min(small.num_edges(), large.num_edges())) {
    improved = false;
    for (std::size_t u = 0; u < small.size() && !improved; ++u) {
      for (std::size_t w = 0; w < large.size() && !improved; ++w) {
        const int cur = image[u];
        if (static_cast<int>(w) == cur) continue;
        const int other = owner[w];
        image[u] = static_cast<int>(w);
        if (other >= 0) image[other] = cur;
        const std::size_t trial = preserved_edges(small, large, image);
        if (trial > kept) {
          kept = trial;
          owner[w] = static_cast<int>(u);
          owner[cur] = other;
          improved = true;
        } else {
          image[u] = cur;
          if (other >= 0) image[other] = static_cast<int>(w);
        }
      }
    }
  }
  return finish(a, b, a_small, image, kept, false);
}

GedResult ged(const SmallGraph& a, const SmallGraph& b, const GedOptions& opts) {
  if (a.size() + b.size() <= opts.exact_limit) return ged_exact(a, b, opts);
  return ged_bounded(a, b);
}

}  // namespace anomq
