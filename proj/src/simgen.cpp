#include "anomq/simgen.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "anomq/error.hpp"

namespace anomq {

void SimConfig::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw std::invalid_argument("sparsity must lie in (0,1]");
  if (!(planted_pvalue_max > 0.0 && planted_pvalue_max < background_pvalue_min &&
        background_pvalue_min < 1.0)) {
    throw std::invalid_argument("need 0 < planted_pvalue_max < background_pvalue_min < 1");
  }
  if (!(noise_percent >= 0.0 && noise_percent <= 100.0)) {
    throw std::invalid_argument("noise percent must lie in [0,100]");
  }
}

namespace {

// Library distributions are implementation-defined; these are not, so
// outputs are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // uniform in (0, 1)
  double open_unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  bool bernoulli(double p) { return p >= 1.0 || unit() < p; }

  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do x = engine_(); while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<Edge> king_grid(std::size_t n, double sparsity, Rng& rng) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<Edge> edges;
  auto id = [&](std::size_t r, std::size_t c) { return r * side + c; };
  auto offer = [&](std::size_t a, std::size_t b) {
    // draw for every lattice edge so the stream does not depend on truncation
    const bool keep = rng.bernoulli(sparsity);
    if (keep && a < n && b < n) edges.push_back(make_edge(static_cast<Vertex>(a), static_cast<Vertex>(b)));
  };
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      if (c + 1 < side) offer(id(r, c), id(r, c + 1));
      if (r + 1 < side) offer(id(r, c), id(r + 1, c));
      if (r + 1 < side && c + 1 < side) offer(id(r, c), id(r + 1, c + 1));
      if (r + 1 < side && c > 0) offer(id(r, c), id(r + 1, c - 1));
    }
  }
  return edges;
}

std::vector<Edge> random_graph(std::size_t n, double sparsity, Rng& rng) {
  // same expected degree as a king lattice at this sparsity
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const auto target = static_cast<std::size_t>(std::min(pairs, std::round(4.0 * sparsity * static_cast<double>(n))));
  std::set<Edge> chosen;
  while (chosen.size() < target) {
    auto u = static_cast<Vertex>(rng.below(n)), v = static_cast<Vertex>(rng.below(n));
    if (u != v) chosen.insert(make_edge(u, v));
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace

std::size_t king_lattice_edges(std::size_t side) {
  if (side == 0) return 0;
  return 2 * side * (side - 1) + 2 * (side - 1) * (side - 1);
}

SimData generate(const SimConfig& cfg) {
  cfg.validate();
  const QueryGraph shape = build_query(cfg.planted_shape);
  if (cfg.n < shape.m) {
    throw std::invalid_argument("n = " + std::to_string(cfg.n) + " is smaller than the planted shape");
  }
  Rng rng(cfg.seed);
  auto edges = cfg.topology == Topology::KingGrid ? king_grid(cfg.n, cfg.sparsity, rng)
                                                  : random_graph(cfg.n, cfg.sparsity, rng);
  const auto background = AttributedGraph::from_edges(cfg.n, edges);

  // Planted vertices must be pairwise non-adjacent in the background so the
  // induced planted subgraph is exactly the shape.
  std::vector<Vertex> planted;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 10000) {
      throw std::runtime_error("could not place the planted shape on an independent vertex set");
    }
    planted.clear();
    std::set<Vertex> taken;
    while (planted.size() < shape.m) {
      auto v = static_cast<Vertex>(rng.below(cfg.n));
      if (taken.insert(v).second) planted.push_back(v);
    }
    bool independent = true;
    for (std::size_t i = 0; i < planted.size() && independent; ++i)
      for (std::size_t j = i + 1; j < planted.size() && independent; ++j)
        independent = !background.has_edge(planted[i], planted[j]);
    if (independent) break;
  }

  SimData out;
  out.truth.vertices = planted;
  out.truth.shape = cfg.planted_shape;
  for (auto [a, b] : shape.edges) {
    auto e = make_edge(planted[a], planted[b]);
    out.truth.edges.push_back(e);
    edges.push_back(e);
  }
  std::sort(out.truth.edges.begin(), out.truth.edges.end());
  out.graph = AttributedGraph::from_edges(cfg.n, edges);

  // Values sit on the 2^-53 grid, where 1 - p is exact and flipping twice
  // restores p bit for bit.
  constexpr double ulp = 0x1.0p-53;
  auto snap = [&](double x) { return std::max(ulp, std::ldexp(std::round(std::ldexp(x, 53)), -53)); };
  std::vector<double> p(cfg.n);
  for (auto& x : p) {
    x = snap(cfg.background_pvalue_min + (1.0 - cfg.background_pvalue_min) * (1.0 - rng.unit()));
    if (x <= cfg.background_pvalue_min) x += ulp;
  }
  for (Vertex v : planted) p[v] = snap(cfg.planted_pvalue_max * rng.open_unit());
  if (cfg.noise_percent > 0.0) {
    p = flip_noise(p, cfg.noise_percent, cfg.seed ^ 0x9e3779b97f4a7c15ull);
  }
  out.graph.set_pvalues(std::move(p));
  return out;
}

std::vector<std::size_t> noise_selection(std::size_t n, double percent, std::uint64_t seed) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw std::invalid_argument("K must lie in [0,100]");
  const auto count = static_cast<std::size_t>(std::llround(percent / 100.0 * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + rng.below(n - i)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<double> flip_noise(std::span<const double> pvals, double percent, std::uint64_t seed) {
  std::vector<double> out(pvals.begin(), pvals.end());
  for (std::size_t i : noise_selection(pvals.size(), percent, seed)) {
    const double flipped = 1.0 - out[i];
    out[i] = flipped > 0.0 ? flipped : DBL_MIN;
  }
  return out;
}

nlohmann::json truth_to_json(const GroundTruth& t) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [u, v] : t.edges) edges.push_back({u, v});
  return {{"schema", "anomq/v1"}, {"vertices", t.vertices}, {"edges", edges}, {"shape", to_json(t.shape)}};
}

GroundTruth truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruth t;
    t.vertices = j.at("vertices").get<std::vector<Vertex>>();
    for (const auto& e : j.at("edges")) t.edges.emplace_back(e.at(0).get<Vertex>(), e.at(1).get<Vertex>());
    if (j.contains("shape")) t.shape = query_spec_from_json(j.at("shape"));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad truth file: ") + e.what());
  }
}

void write_truth(const std::filesystem::path& path, const GroundTruth& t) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << truth_to_json(t).dump(2) << '\n';
}

GroundTruth read_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  try {
    return truth_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace anomq
