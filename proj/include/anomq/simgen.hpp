#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "anomq/graph.hpp"
#include "anomq/query_graph.hpp"
#include "json.hpp"

namespace anomq {

enum class Topology { KingGrid, Random };

struct SimConfig {
  std::size_t n = 400;
  Topology topology = Topology::KingGrid;
  double sparsity = 0.4;  // edge retention probability
  QuerySpec planted_shape = QuerySpec::ring(3);
  double planted_pvalue_max = 0.15;
  double background_pvalue_min = 0.2;
  double noise_percent = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  std::vector<Vertex> vertices;  // planted vertex for query vertex i at index i
  std::vector<Edge> edges;
  QuerySpec shape;
};

struct SimData {
  AttributedGraph graph;  // with p-values
  GroundTruth truth;
};

// Deterministic given cfg (including seed). Noise, if any, is applied last.
SimData generate(const SimConfig& cfg);

// Edge count of the full s x s king lattice (8-neighborhood).
std::size_t king_lattice_edges(std::size_t side);

// round(K/100 * n) distinct indices, uniformly chosen.
std::vector<std::size_t> noise_selection(std::size_t n, double percent, std::uint64_t seed);

// p -> 1 - p on the selected vertices, clamped into (0, 1].
std::vector<double> flip_noise(std::span<const double> pvals, double percent, std::uint64_t seed);

nlohmann::json truth_to_json(const GroundTruth& t);
GroundTruth truth_from_json(const nlohmann::json& j);

void write_truth(const std::filesystem::path& path, const GroundTruth& t);
GroundTruth read_truth(const std::filesystem::path& path);

}  // namespace anomq
