// anomq: anomaly-structured subgraph queries over attributed networks.
//
// Exit codes: 0 success, 1 infeasible query, 2 input error, 3 resource limit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>

#include "CLI11.hpp"
#include "anomq/error.hpp"
#include "anomq/eval.hpp"
#include "anomq/graph.hpp"
#include "anomq/query_engine.hpp"
#include "anomq/scan_stats.hpp"
#include "anomq/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kInfeasible = 1, kInputError = 2, kResourceLimit = 3;

json read_json_arg(const std::string& arg) {
  try {
    if (!arg.empty() && arg.front() == '{') return json::parse(arg);
    std::ifstream in(arg);
    if (!in) throw anomq::InputError("cannot read " + arg);
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw anomq::InputError("invalid JSON in " + arg + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw anomq::InputError("cannot write " + out);
  f << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw anomq::InputError("cannot write " + path.string());
  f << text;
}

struct QueryArgs {
  std::string graph, attrs, pvalues, labels, query, stat = "bj", out, export_pvalues;
  double alpha_max = 0.15, epsilon = 1e-6, fill = 0.0;
  std::size_t max_iters = 0, exact_limit = 16, ged_budget = 2'000'000;
  std::string baseline;  // "begin:end"
  long eval_col = -1;
};

anomq::ScoreSpec score_spec(const QueryArgs& a, std::size_t steps) {
  auto spec = anomq::ScoreSpec::for_steps(steps, anomq::parse_statistic(a.stat), a.alpha_max);
  if (!a.baseline.empty()) {
    auto colon = a.baseline.find(':');
    if (colon == std::string::npos) throw anomq::InputError("--baseline expects begin:end");
    try {
      spec.baseline_begin = std::stoul(a.baseline.substr(0, colon));
      spec.baseline_end = std::stoul(a.baseline.substr(colon + 1));
    } catch (const std::exception&) {
      throw anomq::InputError("--baseline expects begin:end");
    }
  }
  if (a.eval_col >= 0) spec.eval_column = static_cast<std::size_t>(a.eval_col);
  return spec;
}

// Loads the graph plus whatever the statistic needs.
anomq::AttributedGraph load_inputs(const QueryArgs& a, anomq::ScoreSpec& spec) {
  anomq::BuildStats bs;
  auto g = anomq::load_edge_list(a.graph, &bs);
  std::cerr << "graph: " << bs.vertices << " vertices, " << bs.edges << " edges ("
            << bs.self_loops_dropped << " self-loops, " << bs.duplicates_dropped
            << " duplicates dropped)\n";
  if (!a.labels.empty()) g = anomq::load_labels(a.labels, g);
  if (!a.attrs.empty()) {
    anomq::AttrStats as;
    g = anomq::load_attributes(a.attrs, g, a.fill, &as);
    std::cerr << "attributes: " << as.rows << " rows x " << as.steps << " steps, "
              << as.missing_rows << " missing rows filled\n";
    spec = score_spec(a, g.num_steps());
    if (anomq::is_nonparametric(spec.statistic)) {
      g.set_pvalues(anomq::calibrate_pvalues(g, spec));
    }
  } else if (!a.pvalues.empty()) {
    std::size_t missing = 0;
    g = anomq::load_pvalues(a.pvalues, g, &missing);
    if (missing) std::cerr << "p-values: " << missing << " vertices missing, set to 1\n";
    spec = score_spec(a, 0);
  } else {
    throw anomq::InputError("one of --attrs or --pvalues is required");
  }
  if (!a.export_pvalues.empty() && g.has_pvalues()) anomq::write_pvalues(a.export_pvalues, g.pvalues());
  return g;
}

int run_query(const QueryArgs& a) {
  anomq::ScoreSpec spec;
  auto g = load_inputs(a, spec);
  auto q = anomq::build_query(anomq::query_spec_from_json(read_json_arg(a.query)));
  anomq::EngineOptions opts;
  opts.epsilon = a.epsilon;
  opts.max_iters = a.max_iters;
  opts.ged.exact_limit = a.exact_limit;
  opts.ged.node_budget = a.ged_budget;
  auto result = anomq::anomaly_max_q(g, q, spec, opts);
  emit(anomq::to_json(result, &g), a.out);
  if (!result.feasible) {
    std::cerr << "infeasible: no star of the query fits any examined vertex\n";
    return kInfeasible;
  }
  if (!result.signal) std::cerr << "no anomaly signal: best score is 0\n";
  return kOk;
}

int run_oracle(const QueryArgs& a, bool force) {
  anomq::ScoreSpec spec;
  auto g = load_inputs(a, spec);
  auto q = anomq::build_query(anomq::query_spec_from_json(read_json_arg(a.query)));
  anomq::OracleOptions opts;
  opts.force = force;
  auto r = anomq::oracle_search(g, q, spec, opts);
  json edges = json::array();
  for (auto [u, v] : r.subgraph.edges) edges.push_back({u, v});
  emit({{"schema", "anomq/v1"},
        {"feasible", r.feasible},
        {"vertices", r.subgraph.vertices},
        {"edges", edges},
        {"score", r.score.value},
        {"alpha_star", r.score.alpha_star ? json(*r.score.alpha_star) : json(nullptr)},
        {"candidates", r.candidates}},
       a.out);
  return r.feasible ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomaly-structured subgraph queries over attributed networks"};
  app.require_subcommand(1);

  QueryArgs qa;
  auto add_query_opts = [&](CLI::App* sub) {
    sub->add_option("--graph", qa.graph, "Edge list (src<TAB>dst)")->required();
    auto* attrs = sub->add_option("--attrs", qa.attrs, "Attribute CSV (vertex,t_0,...)");
    auto* pv = sub->add_option("--pvalues", qa.pvalues, "P-value CSV (vertex,pvalue)");
    attrs->excludes(pv);
    sub->add_option("--labels", qa.labels, "External id table (vertex<TAB>id)");
    sub->add_option("--query", qa.query, "Query JSON file or inline JSON")->required();
    sub->add_option("--stat", qa.stat, "bj | hc | kull | ebp")->capture_default_str();
    sub->add_option("--alpha-max", qa.alpha_max, "Largest significance level scanned")->capture_default_str();
    sub->add_option("--baseline", qa.baseline, "Baseline columns begin:end (default all but last)");
    sub->add_option("--eval-col", qa.eval_col, "Scored column (default last)");
    sub->add_option("--fill", qa.fill, "Attribute value for missing rows")->capture_default_str();
    sub->add_option("--export-pvalues", qa.export_pvalues, "Write calibrated p-values as CSV");
    sub->add_option("--out", qa.out, "Output JSON (default stdout)");
  };

  auto* query = app.add_subcommand("query", "Find the most anomalous subgraph shaped like the query");
  add_query_opts(query);
  query->add_option("--epsilon", qa.epsilon, "Convergence tolerance")->capture_default_str();
  query->add_option("--max-iters", qa.max_iters, "Iteration cap (0 = vertex count)");
  query->add_option("--exact-limit", qa.exact_limit, "Combined size for exact GED")->capture_default_str();
  query->add_option("--ged-budget", qa.ged_budget, "Search nodes per exact GED")->capture_default_str();

  bool force = false;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search on small graphs");
  add_query_opts(oracle);
  oracle->add_flag("--force", force, "Allow graphs above 15 vertices");

  anomq::SimConfig sim;
  std::string topology = "king-grid", shape = R"({"shape":"ring","k":3})", out_dir = ".";
  auto* simulate = app.add_subcommand("simulate", "Generate a graph with a planted anomaly");
  simulate->add_option("--n", sim.n, "Vertex count")->capture_default_str();
  simulate->add_option("--topology", topology, "king-grid | random")->capture_default_str();
  simulate->add_option("--sparsity", sim.sparsity, "Edge retention probability")->capture_default_str();
  simulate->add_option("--shape", shape, "Planted shape (query JSON)")->capture_default_str();
  simulate->add_option("--planted-pmax", sim.planted_pvalue_max)->capture_default_str();
  simulate->add_option("--background-pmin", sim.background_pvalue_min)->capture_default_str();
  simulate->add_option("--noise", sim.noise_percent, "Percent of p-values flipped")->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--out-dir", out_dir, "Writes graph.tsv, pvalues.csv, truth.json")->capture_default_str();

  std::string spec_path, eval_out = "results";
  auto* eval = app.add_subcommand("eval", "Run a precision/robustness experiment");
  eval->add_option("--spec", spec_path, "Experiment JSON")->required();
  eval->add_option("--out", eval_out, "Output prefix (.csv and .json)")->capture_default_str();

  std::vector<std::size_t> sizes{100, 1000, 10000, 100000};
  std::string bench_query = R"({"shape":"ring","k":3})", bench_stat = "bj", bench_out;
  anomq::BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Query time versus graph size");
  bench->add_option("--sizes", sizes, "Ascending vertex counts")->delimiter(',')->capture_default_str();
  bench->add_option("--query", bench_query, "Query JSON file or inline JSON")->capture_default_str();
  bench->add_option("--stat", bench_stat, "bj | hc")->capture_default_str();
  bench->add_option("--repeats", bench_opts.repeats)->capture_default_str();
  bench->add_option("--seed", bench_opts.seed)->capture_default_str();
  bench->add_option("--out", bench_out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*query) return run_query(qa);
    if (*oracle) return run_oracle(qa, force);
    if (*simulate) {
      if (topology == "king-grid" || topology == "king") {
        sim.topology = anomq::Topology::KingGrid;
      } else if (topology == "random") {
        sim.topology = anomq::Topology::Random;
      } else {
        throw anomq::InputError("unknown topology \"" + topology + "\"");
      }
      sim.planted_shape = anomq::query_spec_from_json(read_json_arg(shape));
      auto data = anomq::generate(sim);
      fs::create_directories(out_dir);
      anomq::write_edge_list(fs::path(out_dir) / "graph.tsv", data.graph);
      anomq::write_pvalues(fs::path(out_dir) / "pvalues.csv", data.graph.pvalues());
      anomq::write_truth(fs::path(out_dir) / "truth.json", data.truth);
      std::cerr << "wrote " << data.graph.num_vertices() << " vertices, " << data.graph.num_edges()
                << " edges to " << out_dir << "\n";
      return kOk;
    }
    if (*eval) {
      auto spec = anomq::experiment_from_json(read_json_arg(spec_path));
      auto result = anomq::run_experiment(spec);
      write_text(eval_out + ".csv", anomq::rows_to_csv(result.rows));
      emit(anomq::to_json(result), eval_out + ".json");
      for (const auto& c : result.cells) {
        std::printf("%-4s %-16s %-3s K=%-5g precision %.3f +- %.3f  ged %.2f  %.2f ms\n",
                    c.query_id.c_str(), c.query.c_str(), anomq::to_string(c.statistic).c_str(), c.noise,
                    c.precision_mean, c.precision_sd, c.ged_mean, c.runtime_ms_mean);
      }
      return kOk;
    }
    if (*bench) {
      anomq::ScoreSpec ss;
      ss.statistic = anomq::parse_statistic(bench_stat);
      auto qs = anomq::query_spec_from_json(read_json_arg(bench_query));
      auto r = anomq::bench_scaling(sizes, qs, ss, bench_opts);
      emit(anomq::to_json(r), bench_out);
      for (const auto& row : r.rows) {
        if (!row.ok) return kResourceLimit;
      }
      return kOk;
    }
  } catch (const anomq::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResourceLimit;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource limit: out of memory\n";
    return kResourceLimit;
  } catch (const anomq::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
