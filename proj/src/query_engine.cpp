#include "anomq/query_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace anomq {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::Exhausted: return "exhausted";
    case StopReason::FixedPoint: return "fixed_point";
    case StopReason::MaxIters: return "max_iters";
  }
  return "converged";
}

std::vector<StarPattern> decompose_stars(const QueryGraph& q) {
  auto deg = q.degrees();
  std::vector<StarPattern> stars;
  stars.reserve(q.m);
  for (std::size_t c = 0; c < q.m; ++c) stars.push_back({c, deg[c]});
  return stars;
}

PriorityOrder refine_order(const AttributedGraph& g, const PriorityOrder& order,
                           const QueryGraph& q) {
  const auto target = static_cast<long long>(q.max_degree());
  auto gap = [&](Vertex v) { return std::llabs(static_cast<long long>(g.degree(v)) - target); };
  PriorityOrder out = order;
  std::sort(out.order.begin(), out.order.end(), [&](Vertex a, Vertex b) {
    if (out.key[a] != out.key[b]) return out.key[a] > out.key[b];
    if (gap(a) != gap(b)) return gap(a) < gap(b);
    return a < b;
  });
  return out;
}

std::vector<Vertex> select_roots(const AttributedGraph& g, const PriorityOrder& order,
                                 const QueryGraph& q) {
  if (g.num_vertices() < q.m) {
    throw std::invalid_argument("graph has fewer vertices than the query");
  }
  auto refined = refine_order(g, order, q);
  return {refined.order.begin(), refined.order.begin() + static_cast<std::ptrdiff_t>(q.m)};
}

std::vector<Vertex> build_upper_bound(SearchState& state, const PriorityOrder& order,
                                      std::size_t m) {
  std::vector<Vertex> kept;
  const auto& low = state.s_low.vertices;
  for (Vertex v : state.s_up) {
    if (std::binary_search(low.begin(), low.end(), v)) kept.push_back(v);
  }
  std::vector<Vertex> next = kept;
  while (next.size() < m && state.consumed < order.order.size()) {
    const Vertex v = order.order[state.consumed++];
    if (!std::binary_search(kept.begin(), kept.end(), v)) next.push_back(v);
  }
  std::sort(next.begin(), next.end());
  return next;
}

std::optional<StarMatch> best_star_match(const AttributedGraph& g, Vertex v,
                                         const StarPattern& pat, const SubsetScorer& scorer) {
  auto nb = g.neighbors(v);
  if (nb.size() < pat.leaf_count) return std::nullopt;
  std::vector<Vertex> leaves(nb.begin(), nb.end());
  auto better = [&](Vertex a, Vertex b) {
    if (scorer.priority(a) != scorer.priority(b)) return scorer.priority(a) > scorer.priority(b);
    return a < b;
  };
  std::partial_sort(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(pat.leaf_count),
                    leaves.end(), better);
  StarMatch sm;
  sm.root = v;
  sm.pattern = pat.center;
  sm.vertices.push_back(v);
  sm.vertices.insert(sm.vertices.end(), leaves.begin(),
                     leaves.begin() + static_cast<std::ptrdiff_t>(pat.leaf_count));
  sm.score = scorer.score(sm.vertices).value;
  return sm;
}

namespace {

std::vector<Vertex> merged(const std::vector<Vertex>& sorted, const std::vector<Vertex>& extra) {
  std::vector<Vertex> out = sorted;
  out.insert(out.end(), extra.begin(), extra.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

LowerBound max_q(const AttributedGraph& g, std::span<const Vertex> s_up, const QueryGraph& q,
                 const SubsetScorer& scorer, const GedOptions& ged_opts) {
  const auto patterns = decompose_stars(q);
  const SmallGraph query = SmallGraph::from(q);

  std::vector<Vertex> roots(s_up.begin(), s_up.end());
  std::sort(roots.begin(), roots.end());
  std::vector<StarMatch> matches;
  for (Vertex v : roots) {
    for (const auto& pat : patterns) {
      if (auto sm = best_star_match(g, v, pat, scorer)) matches.push_back(std::move(*sm));
    }
  }

  LowerBound best;
  best.ged = q.m + q.edges.size();  // ged(empty, Q)
  if (matches.empty()) return best;

  std::map<std::vector<Vertex>, GedResult> memo;
  auto distance = [&](const std::vector<Vertex>& vs) -> const GedResult& {
    auto it = memo.find(vs);
    if (it == memo.end()) {
      auto sub = induced_subgraph(g, vs);
      it = memo.emplace(vs, ged(SmallGraph::from(sub), query, ged_opts)).first;
    }
    return it->second;
  };

  std::vector<char> used(matches.size(), 0);
  std::vector<Vertex> current;
  std::size_t current_ged = best.ged;
  while (true) {
    std::size_t pick = matches.size();
    std::size_t pick_ged = 0;
    double pick_f = 0.0;
    for (std::size_t i = 0; i < matches.size(); ++i) {
      if (used[i]) continue;
      const auto candidate = merged(current, matches[i].vertices);
      const std::size_t d = distance(candidate).distance;
      const double f = scorer.score(candidate).value;
      // matches are in (root, pattern) order, so the first of equals has the lower id
      if (pick == matches.size() || d < pick_ged || (d == pick_ged && f > pick_f)) {
        pick = i;
        pick_ged = d;
        pick_f = f;
      }
    }
    if (pick == matches.size() || pick_ged > current_ged) break;
    used[pick] = 1;
    current = merged(current, matches[pick].vertices);
    current_ged = pick_ged;
    if (current_ged < best.ged || best.subgraph.empty()) {
      best.subgraph = induced_subgraph(g, current);
      best.ged = current_ged;
      best.ged_exact = distance(current).exact;
    }
    if (current_ged == 0) break;  // any further vertex makes it non-isomorphic
  }
  return best;
}

QueryResult anomaly_max_q(const AttributedGraph& g, const QueryGraph& q, const ScoreSpec& spec,
                          const EngineOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = g.num_vertices();
  if (n < q.m) throw std::invalid_argument("query has more vertices than the graph");

  const SubsetScorer scorer(g, spec);
  const PriorityOrder order = refine_order(g, scorer.priority_order(), q);
  const std::size_t max_iters = opts.max_iters ? opts.max_iters : n;

  SearchState state;
  state.epsilon = opts.epsilon;
  QueryResult result;
  double best_f = 0.0;

  while (true) {
    auto next_up = build_upper_bound(state, order, q.m);
    if (state.i > 0 && next_up == state.s_up) {
      result.stop = state.consumed >= n ? StopReason::Exhausted : StopReason::FixedPoint;
      break;
    }
    state.s_up = std::move(next_up);
    auto low = max_q(g, state.s_up, q, scorer, opts.ged);
    state.s_low = std::move(low.subgraph);

    const double f_up = scorer.score(state.s_up).value;
    const ScoreValue low_score = scorer.score(state.s_low.vertices);
    state.trace.push_back({state.i, f_up, low_score.value, low.ged});
    ++state.i;

    if (!state.s_low.empty()) {
      const bool better = !result.feasible || low_score.value > best_f ||
                          (low_score.value == best_f && low.ged < result.ged);
      if (better) {
        result.feasible = true;
        result.subgraph = state.s_low;
        result.score = low_score;
        result.ged = low.ged;
        result.ged_exact = low.ged_exact;
        best_f = low_score.value;
      }
      if (std::abs(f_up - low_score.value) < opts.epsilon) {
        result.stop = StopReason::Converged;
        break;
      }
    }
    if (state.i >= max_iters) {
      result.stop = StopReason::MaxIters;
      break;
    }
  }

  result.iterations = state.i;
  result.trace = std::move(state.trace);
  result.signal = result.feasible && result.score.value > 0.0;
  if (!result.feasible) result.ged = q.m + q.edges.size();
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

nlohmann::json to_json(const QueryResult& r, const AttributedGraph* g) {
  using nlohmann::json;
  json edges = json::array();
  for (auto [u, v] : r.subgraph.edges) edges.push_back({u, v});
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"i", t.iteration}, {"f_up", t.f_up}, {"f_low", t.f_low}, {"ged", t.ged}});
  }
  json out = {
      {"schema", "anomq/v1"},
      {"vertices", r.subgraph.vertices},
      {"edges", edges},
      {"score", r.score.value},
      {"alpha_star", r.score.alpha_star ? json(*r.score.alpha_star) : json(nullptr)},
      {"ged", r.ged},
      {"ged_exact", r.ged_exact},
      {"iterations", r.iterations},
      {"feasible", r.feasible},
      {"signal", r.signal},
      {"stop", to_string(r.stop)},
      {"trace", trace},
      {"runtime_ms", r.runtime_ms},
  };
  if (g && g->has_labels()) {
    json labels = json::array();
    for (Vertex v : r.subgraph.vertices) labels.push_back(g->label(v));
    out["labels"] = labels;
  }
  return out;
}

}  // namespace anomq
