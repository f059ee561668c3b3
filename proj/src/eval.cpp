#include "anomq/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <new>
#include <sstream>
#include <tuple>

#include "anomq/error.hpp"
#include "text_util.hpp"

namespace anomq {

double precision(std::span<const Vertex> found, std::span<const Vertex> truth) {
  if (found.empty()) return 0.0;
  std::vector<Vertex> t(truth.begin(), truth.end());
  std::sort(t.begin(), t.end());
  std::vector<Vertex> f(found.begin(), found.end());
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  std::size_t hit = 0;
  for (Vertex v : f) hit += std::binary_search(t.begin(), t.end(), v) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(f.size());
}

OracleResult oracle_search(const AttributedGraph& g, const QueryGraph& q, const ScoreSpec& spec,
                           const OracleOptions& opts) {
  const std::size_t n = g.num_vertices();
  if (n > opts.max_n && !opts.force) {
    throw ResourceLimit("oracle_search limited to " + std::to_string(opts.max_n) +
                        " vertices, graph has " + std::to_string(n));
  }
  const SubsetScorer scorer(g, spec);
  const SmallGraph query = SmallGraph::from(q);
  OracleResult best;
  if (n < q.m) return best;

  std::vector<Vertex> pick(q.m);
  for (std::size_t i = 0; i < q.m; ++i) pick[i] = static_cast<Vertex>(i);
  GedOptions exact{q.m * 2, SIZE_MAX};
  while (true) {
    auto sub = induced_subgraph(g, pick);
    if (sub.edges.size() == q.edges.size()) {
      const auto local = SmallGraph::from(sub);
      if (is_connected(local.size(), local.edges()) &&
          ged_exact(local, query, exact).distance == 0) {
        ++best.candidates;
        auto sv = scorer.score(pick);
        if (!best.feasible || sv.value > best.score.value) {
          best.feasible = true;
          best.subgraph = std::move(sub);
          best.score = sv;
        }
      }
    }
    // next combination in lexicographic order
    std::size_t i = q.m;
    while (i > 0 && pick[i - 1] == n - q.m + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < q.m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

void ExperimentSpec::validate() const {
  if (simulation.has_value() == dataset.has_value()) {
    throw InputError("experiment needs exactly one of \"simulation\" or \"dataset\"");
  }
  if (trials < 1) throw InputError("trials must be >= 1");
  if (queries.empty()) throw InputError("experiment needs at least one query");
  if (statistics.empty()) throw InputError("experiment needs at least one statistic");
  for (double k : noise) {
    if (!(k >= 0.0 && k <= 100.0)) throw InputError("noise levels must lie in [0,100]");
  }
  if (simulation) {
    for (auto s : statistics) {
      if (!is_nonparametric(s)) {
        throw InputError("simulated data carries p-values only; use bj or hc");
      }
    }
  }
}

namespace {

Topology parse_topology(const std::string& s) {
  if (s == "king-grid" || s == "king") return Topology::KingGrid;
  if (s == "random") return Topology::Random;
  throw InputError("unknown topology \"" + s + "\"");
}

}  // namespace

ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  try {
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      SimConfig cfg;
      cfg.n = s.value("n", cfg.n);
      cfg.topology = parse_topology(s.value("topology", std::string("king-grid")));
      cfg.sparsity = s.value("sparsity", cfg.sparsity);
      cfg.planted_pvalue_max = s.value("planted_pvalue_max", cfg.planted_pvalue_max);
      cfg.background_pvalue_min = s.value("background_pvalue_min", cfg.background_pvalue_min);
      spec.simulation = cfg;
    }
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      spec.dataset = DatasetPaths{d.at("graph").get<std::string>(), d.at("pvalues").get<std::string>(),
                                  d.at("truth").get<std::string>()};
    }
    if (j.contains("queries")) {
      spec.queries.clear();
      for (const auto& q : j.at("queries")) spec.queries.push_back(query_spec_from_json(q));
    }
    if (j.contains("statistics")) {
      spec.statistics.clear();
      for (const auto& s : j.at("statistics")) spec.statistics.push_back(parse_statistic(s.get<std::string>()));
    }
    if (j.contains("noise")) spec.noise = j.at("noise").get<std::vector<double>>();
    spec.trials = j.value("trials", spec.trials);
    spec.seed = j.value("seed", spec.seed);
    spec.alpha_max = j.value("alpha_max", spec.alpha_max);
    spec.engine.epsilon = j.value("epsilon", spec.engine.epsilon);
    spec.engine.max_iters = j.value("max_iters", spec.engine.max_iters);
    spec.record_timing = j.value("timing", spec.record_timing);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  using Key = std::tuple<std::size_t, int, double, std::size_t>;
  std::vector<std::pair<Key, ResultRow>> keyed;

  std::optional<AttributedGraph> fixed_graph;
  GroundTruth fixed_truth;
  if (spec.dataset) {
    auto g = load_edge_list(spec.dataset->graph);
    fixed_graph = load_pvalues(spec.dataset->pvalues, g);
    fixed_truth = read_truth(spec.dataset->truth);
  }

  for (std::size_t qi = 0; qi < spec.queries.size(); ++qi) {
    const QuerySpec& qs = spec.queries[qi];
    const QueryGraph q = build_query(qs);
    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
      const std::uint64_t trial_seed = spec.seed + 1000003ull * trial + 7919ull * qi;
      AttributedGraph base;
      std::vector<Vertex> truth;
      if (spec.simulation) {
        SimConfig cfg = *spec.simulation;
        cfg.planted_shape = qs;
        cfg.noise_percent = 0.0;
        cfg.seed = trial_seed;
        auto sim = generate(cfg);
        base = std::move(sim.graph);
        truth = std::move(sim.truth.vertices);
      } else {
        base = *fixed_graph;
        truth = fixed_truth.vertices;
      }
      const std::vector<double> clean(base.pvalues().begin(), base.pvalues().end());
      for (double k : spec.noise) {
        AttributedGraph noisy = base;
        noisy.set_pvalues(flip_noise(clean, k, trial_seed * 31 + static_cast<std::uint64_t>(k * 1000)));
        for (Statistic stat : spec.statistics) {
          ScoreSpec ss;
          ss.statistic = stat;
          ss.alpha_max = spec.alpha_max;
          auto res = anomaly_max_q(noisy, q, ss, spec.engine);
          ResultRow row;
          row.query_id = "Q" + std::to_string(qi + 1);
          row.query = qs.name();
          row.statistic = stat;
          row.noise = k;
          row.trial = trial;
          row.precision = precision(res.subgraph.vertices, truth);
          row.score = res.score.value;
          row.ged = res.ged;
          row.runtime_ms = spec.record_timing ? res.runtime_ms : 0.0;
          row.iterations = res.iterations;
          row.feasible = res.feasible;
          keyed.push_back({Key{qi, static_cast<int>(stat), k, trial}, std::move(row)});
        }
      }
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  ExperimentResult out;
  for (auto& [key, row] : keyed) out.rows.push_back(std::move(row));
  out.cells = aggregate(out.rows);
  return out;
}

std::vector<AggregateCell> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<AggregateCell> cells;
  std::vector<std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    auto same = [&](const AggregateCell& c) {
      return c.query_id == r.query_id && c.statistic == r.statistic && c.noise == r.noise;
    };
    auto it = std::find_if(cells.begin(), cells.end(), same);
    if (it == cells.end()) {
      cells.push_back({r.query_id, r.query, r.statistic, r.noise});
      groups.emplace_back();
      it = cells.end() - 1;
    }
    groups[static_cast<std::size_t>(it - cells.begin())].push_back(&r);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& grp = groups[i];
    auto& c = cells[i];
    c.trials = grp.size();
    const double n = static_cast<double>(grp.size());
    for (const auto* r : grp) {
      c.precision_mean += r->precision / n;
      c.score_mean += r->score / n;
      c.ged_mean += static_cast<double>(r->ged) / n;
      c.runtime_ms_mean += r->runtime_ms / n;
    }
    if (grp.size() > 1) {
      double ss = 0.0;
      for (const auto* r : grp) ss += (r->precision - c.precision_mean) * (r->precision - c.precision_mean);
      c.precision_sd = std::sqrt(ss / (n - 1.0));
    }
  }
  return cells;
}

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_quoted(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

constexpr const char* kCsvHeader =
    "query_id,query,statistic,noise,trial,precision,score,ged,runtime_ms,iterations,feasible";

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.query_id) << ',' << csv_field(r.query) << ',' << to_string(r.statistic) << ','
        << fmt_double(r.noise) << ',' << r.trial << ',' << fmt_double(r.precision) << ','
        << fmt_double(r.score) << ',' << r.ged << ',' << fmt_double(r.runtime_ms) << ','
        << r.iterations << ',' << (r.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) {
    throw InputError("result CSV: unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto f = split_quoted(line);
    auto bad = [&] { return InputError("result CSV line " + std::to_string(lineno) + ": malformed"); };
    if (f.size() != 11) throw bad();
    auto d = [&](const std::string& s) {
      auto x = detail::parse_double(s);
      if (!x) throw bad();
      return *x;
    };
    auto u = [&](const std::string& s) {
      auto x = detail::parse_uint(s);
      if (!x) throw bad();
      return static_cast<std::size_t>(*x);
    };
    ResultRow r;
    r.query_id = f[0];
    r.query = f[1];
    r.statistic = parse_statistic(f[2]);
    r.noise = d(f[3]);
    r.trial = u(f[4]);
    r.precision = d(f[5]);
    r.score = d(f[6]);
    r.ged = u(f[7]);
    r.runtime_ms = d(f[8]);
    r.iterations = u(f[9]);
    r.feasible = u(f[10]) != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const ExperimentResult& r) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"query_id", x.query_id}, {"query", x.query}, {"statistic", to_string(x.statistic)},
                    {"noise", x.noise}, {"trial", x.trial}, {"precision", x.precision},
                    {"score", x.score}, {"ged", x.ged}, {"runtime_ms", x.runtime_ms},
                    {"iterations", x.iterations}, {"feasible", x.feasible}});
  }
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"query_id", c.query_id}, {"query", c.query}, {"statistic", to_string(c.statistic)},
                     {"noise", c.noise}, {"trials", c.trials}, {"precision_mean", c.precision_mean},
                     {"precision_sd", c.precision_sd}, {"score_mean", c.score_mean},
                     {"ged_mean", c.ged_mean}, {"runtime_ms_mean", c.runtime_ms_mean}});
  }
  return {{"schema", "anomq/v1"}, {"rows", rows}, {"cells", cells}};
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
  std::vector<ResultRow> rows;
  try {
    for (const auto& x : j.at("rows")) {
      ResultRow r;
      r.query_id = x.at("query_id").get<std::string>();
      r.query = x.at("query").get<std::string>();
      r.statistic = parse_statistic(x.at("statistic").get<std::string>());
      r.noise = x.at("noise").get<double>();
      r.trial = x.at("trial").get<std::size_t>();
      r.precision = x.at("precision").get<double>();
      r.score = x.at("score").get<double>();
      r.ged = x.at("ged").get<std::size_t>();
      r.runtime_ms = x.at("runtime_ms").get<double>();
      r.iterations = x.at("iterations").get<std::size_t>();
      r.feasible = x.at("feasible").get<bool>();
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad result JSON: ") + e.what());
  }
  return rows;
}

double loglog_slope(std::span<const BenchRow> rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.ok && r.query_ms > 0.0) pts.emplace_back(std::log(static_cast<double>(r.n)), std::log(r.query_ms));
  }
  if (pts.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

BenchResult bench_scaling(std::span<const std::size_t> sizes, const QuerySpec& query,
                          const ScoreSpec& spec, const BenchOptions& opts) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("sizes must be ascending");
  const QueryGraph q = build_query(query);
  BenchResult out;
  bool failed = false;
  for (std::size_t n : sizes) {
    BenchRow row;
    row.n = n;
    if (failed) {
      row.ok = false;
      row.error = "skipped after an earlier failure";
      out.rows.push_back(row);
      continue;
    }
    try {
      SimConfig cfg;
      cfg.n = n;
      cfg.sparsity = opts.sparsity;
      cfg.planted_shape = query;
      cfg.seed = opts.seed;
      auto sim = generate(cfg);
      row.edges = sim.graph.num_edges();
      std::vector<double> times;
      for (std::size_t r = 0; r < std::max<std::size_t>(1, opts.repeats); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        auto res = anomaly_max_q(sim.graph, q, spec, opts.engine);
        times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        row.iterations = res.iterations;
      }
      std::sort(times.begin(), times.end());
      row.query_ms = times[times.size() / 2];
    } catch (const std::bad_alloc&) {
      row.ok = false;
      row.error = "out of memory";
      failed = true;
    }
    out.rows.push_back(row);
  }
  out.slope = loglog_slope(out.rows);
  return out;
}

nlohmann::json to_json(const BenchResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows) {
    nlohmann::json row = {{"n", x.n}, {"edges", x.edges}, {"query_ms", x.query_ms},
                          {"iterations", x.iterations}, {"ok", x.ok}};
    if (!x.ok) row["error"] = x.error;
    rows.push_back(row);
  }
  return {{"schema", "anomq/v1"}, {"rows", rows}, {"slope", r.slope}};
}

}  // namespace anomq
