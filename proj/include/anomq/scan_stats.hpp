#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anomq/graph.hpp"

namespace anomq {

enum class Statistic { BJ, HC, KULL, EBP };

std::string to_string(Statistic s);
Statistic parse_statistic(const std::string& name);  // "bj" | "hc" | "kull" | "ebp"

inline bool is_nonparametric(Statistic s) { return s == Statistic::BJ || s == Statistic::HC; }

/// Which statistic to evaluate and which columns of W it reads.
///
/// The baseline window is the half-open column range
/// [baseline_begin, baseline_end); eval_column is the observation being
/// scored and must lie outside the window.
struct ScoreSpec {
  Statistic statistic = Statistic::BJ;
  double alpha_max = 0.15;
  std::size_t baseline_begin = 0;
  std::size_t baseline_end = 0;
  std::size_t eval_column = 0;

  // Baseline = every column but the last, which is scored.
  static ScoreSpec for_steps(std::size_t steps, Statistic stat = Statistic::BJ,
                             double alpha_max = 0.15);

  void validate_alpha() const;
  void validate_window(std::size_t steps) const;
};

struct ScoreValue {
  double value = 0.0;
  std::optional<double> alpha_star;  // BJ / HC only
  std::size_t n_alpha = 0;
  std::size_t n_total = 0;
};

/// Vertices sorted most-anomalous first. key[v] is the priority of vertex v
/// (not of position v); keys are non-increasing along order, ties by id.
struct PriorityOrder {
  std::vector<Vertex> order;
  std::vector<double> key;
};

struct PrefixMax {
  std::size_t k = 0;
  ScoreValue score;
};

// p_v = (1 + #{t in baseline : w_v^t >= w_v^eval}) / (|baseline| + 1)
std::vector<double> calibrate_pvalues(const AttributedGraph& g, const ScoreSpec& spec);

double ebp_score(double c, double b);
double kulldorff_score(double c, double b, double c_total, double b_total);
double bj_score(double alpha, std::size_t n_alpha, std::size_t n);
double hc_score(double alpha, std::size_t n_alpha, std::size_t n);

// Nonparametric statistic maximized over the grid
// {distinct p <= alpha_max} U {alpha_max}. BJ and HC only.
ScoreValue npss_score(std::span<const double> pvals, const ScoreSpec& spec);

// Ascending p-value, ties by ascending id; key = -p.
PriorityOrder priority_sort(std::span<const double> pvals);
// Per-statistic priority: p-values for BJ/HC, eval/baseline ratio for EBP/KULL.
PriorityOrder priority_sort(const AttributedGraph& g, const ScoreSpec& spec);

// Best prefix of order with length <= k_max; smallest k wins ties.
PrefixMax ltss_prefix_max(const PriorityOrder& order, std::span<const double> pvals,
                          const ScoreSpec& spec, std::size_t k_max);

/// Scores arbitrary vertex subsets of one graph under one ScoreSpec.
///
/// BJ/HC read the graph's p-values. EBP/KULL read W: C_v is the eval column
/// and B_v the mean of the baseline window; a subset scores the sums.
class SubsetScorer {
 public:
  SubsetScorer(const AttributedGraph& g, ScoreSpec spec);

  const ScoreSpec& spec() const { return spec_; }
  std::size_t num_vertices() const { return priority_.size(); }
  // Larger is more anomalous.
  double priority(Vertex v) const { return priority_[v]; }

  ScoreValue score(std::span<const Vertex> vs) const;
  PriorityOrder priority_order() const;
  PrefixMax prefix_max(const PriorityOrder& order, std::size_t k_max) const;

 private:
  ScoreValue score_counts(double c, double b, std::size_t n) const;

  ScoreSpec spec_;
  std::vector<double> pvalues_;
  std::vector<double> counts_;
  std::vector<double> baselines_;
  double count_total_ = 0.0;
  double baseline_total_ = 0.0;
  std::vector<double> priority_;
};

}  // namespace anomq
