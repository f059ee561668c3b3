#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anomq/graph.hpp"
#include "anomq/query_engine.hpp"
#include "anomq/query_graph.hpp"
#include "anomq/scan_stats.hpp"
#include "anomq/simgen.hpp"
#include "json.hpp"

namespace anomq {

// |found ∩ truth| / |found|; 0 for an empty found set.
double precision(std::span<const Vertex> found, std::span<const Vertex> truth);

struct OracleOptions {
  std::size_t max_n = 15;
  bool force = false;
};

struct OracleResult {
  bool feasible = false;
  Subgraph subgraph;
  ScoreValue score;
  std::size_t candidates = 0;  // isomorphic induced subgraphs examined
};

// Exhaustive: best-scoring induced subgraph isomorphic to q (lexicographically
// smallest vertex set on ties). Throws ResourceLimit above max_n unless forced.
OracleResult oracle_search(const AttributedGraph& g, const QueryGraph& q, const ScoreSpec& spec,
                           const OracleOptions& opts = {});

struct DatasetPaths {
  std::filesystem::path graph;
  std::filesystem::path pvalues;
  std::filesystem::path truth;
};

struct ExperimentSpec {
  std::optional<SimConfig> simulation;  // exactly one of simulation / dataset
  std::optional<DatasetPaths> dataset;
  std::vector<QuerySpec> queries = default_queries();
  std::vector<Statistic> statistics{Statistic::BJ};
  std::vector<double> noise{5.0, 10.0, 20.0};
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  double alpha_max = 0.15;
  EngineOptions engine;
  bool record_timing = true;  // false zeroes runtime_ms for byte-stable output

  void validate() const;
};

ExperimentSpec experiment_from_json(const nlohmann::json& j);

struct ResultRow {
  std::string query_id;  // "Q1", "Q2", ...
  std::string query;     // shape name
  Statistic statistic = Statistic::BJ;
  double noise = 0.0;
  std::size_t trial = 0;
  double precision = 0.0;
  double score = 0.0;
  std::size_t ged = 0;
  double runtime_ms = 0.0;
  std::size_t iterations = 0;
  bool feasible = false;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct AggregateCell {
  std::string query_id;
  std::string query;
  Statistic statistic = Statistic::BJ;
  double noise = 0.0;
  std::size_t trials = 0;
  double precision_mean = 0.0;
  double precision_sd = 0.0;
  double score_mean = 0.0;
  double ged_mean = 0.0;
  double runtime_ms_mean = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateCell> cells;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);
std::vector<AggregateCell> aggregate(const std::vector<ResultRow>& rows);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);
nlohmann::json to_json(const ExperimentResult& r);
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);

struct BenchOptions {
  double sparsity = 0.4;
  std::uint64_t seed = 1;
  std::size_t repeats = 3;  // the median is reported
  EngineOptions engine;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t edges = 0;
  double query_ms = 0.0;
  std::size_t iterations = 0;
  bool ok = true;
  std::string error;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double slope = 0.0;  // least-squares slope of log(query_ms) on log(n)
};

// Generation time is excluded; only anomaly_max_q is timed.
BenchResult bench_scaling(std::span<const std::size_t> sizes, const QuerySpec& query,
                          const ScoreSpec& spec, const BenchOptions& opts = {});
double loglog_slope(std::span<const BenchRow> rows);
nlohmann::json to_json(const BenchResult& r);

}  // namespace anomq
