#include "anomq/scan_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "anomq/error.hpp"

namespace anomq {

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::BJ: return "bj";
    case Statistic::HC: return "hc";
    case Statistic::KULL: return "kull";
    case Statistic::EBP: return "ebp";
  }
  return "bj";
}

Statistic parse_statistic(const std::string& name) {
  if (name == "bj" || name == "BJ") return Statistic::BJ;
  if (name == "hc" || name == "HC") return Statistic::HC;
  if (name == "kull" || name == "KULL") return Statistic::KULL;
  if (name == "ebp" || name == "EBP") return Statistic::EBP;
  throw InputError("unknown statistic \"" + name + "\" (expected bj|hc|kull|ebp)");
}

ScoreSpec ScoreSpec::for_steps(std::size_t steps, Statistic stat, double alpha_max) {
  ScoreSpec s;
  s.statistic = stat;
  s.alpha_max = alpha_max;
  s.baseline_begin = 0;
  s.baseline_end = steps > 0 ? steps - 1 : 0;
  s.eval_column = steps > 0 ? steps - 1 : 0;
  return s;
}

void ScoreSpec::validate_alpha() const {
  if (!(alpha_max > 0.0 && alpha_max <= 1.0)) {
    throw std::invalid_argument("alpha_max must lie in (0,1]");
  }
}

void ScoreSpec::validate_window(std::size_t steps) const {
  if (baseline_begin >= baseline_end) throw std::invalid_argument("empty baseline window");
  if (baseline_end > steps || eval_column >= steps) {
    throw std::invalid_argument("baseline window or eval column beyond " +
                                std::to_string(steps) + " attribute columns");
  }
  if (eval_column >= baseline_begin && eval_column < baseline_end) {
    throw std::invalid_argument("eval column lies inside the baseline window");
  }
}

std::vector<double> calibrate_pvalues(const AttributedGraph& g, const ScoreSpec& spec) {
  if (!g.has_attrs()) throw std::invalid_argument("calibration needs attributes");
  spec.validate_window(g.num_steps());
  const double denom = static_cast<double>(spec.baseline_end - spec.baseline_begin) + 1.0;
  std::vector<double> p(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    auto row = g.attr_row(v);
    const double x = row[spec.eval_column];
    std::size_t exceed = 0;
    for (std::size_t t = spec.baseline_begin; t < spec.baseline_end; ++t) {
      if (row[t] >= x) ++exceed;
    }
    p[v] = (1.0 + static_cast<double>(exceed)) / denom;
  }
  return p;
}

double ebp_score(double c, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("ebp_score needs B > 0");
  if (c <= b) return 0.0;
  return c * std::log(c / b) + b - c;
}

namespace {

double xlogy_ratio(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

}  // namespace

double kulldorff_score(double c, double b, double c_total, double b_total) {
  if (!(b > 0.0) || !(b < b_total)) {
    throw std::invalid_argument("kulldorff_score needs 0 < B < B_total");
  }
  const double c_out = c_total - c, b_out = b_total - b;
  if (!(c / b > c_out / b_out)) return 0.0;
  double v = xlogy_ratio(c, b) + xlogy_ratio(c_out, b_out) - xlogy_ratio(c_total, b_total);
  return std::max(v, 0.0);
}

namespace {

void check_alpha(double alpha, std::size_t n_alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (n == 0 || n_alpha > n) throw std::invalid_argument("need 0 <= n_alpha <= n, n >= 1");
}

}  // namespace

double bj_score(double alpha, std::size_t n_alpha, std::size_t n) {
  check_alpha(alpha, n_alpha, n);
  const double q = static_cast<double>(n_alpha) / static_cast<double>(n);
  if (q <= alpha) return 0.0;
  const double kl = xlogy_ratio(q, alpha) + xlogy_ratio(1.0 - q, 1.0 - alpha);
  return static_cast<double>(n) * kl;
}

double hc_score(double alpha, std::size_t n_alpha, std::size_t n) {
  check_alpha(alpha, n_alpha, n);
  const double nn = static_cast<double>(n);
  const double num = static_cast<double>(n_alpha) - nn * alpha;
  if (num <= 0.0) return 0.0;
  return num / std::sqrt(nn * alpha * (1.0 - alpha));
}

namespace {

double nonparametric(Statistic s, double alpha, std::size_t n_alpha, std::size_t n) {
  // alpha = 1 admits everything, so N_alpha / N can never exceed it.
  if (alpha >= 1.0) return 0.0;
  return s == Statistic::BJ ? bj_score(alpha, n_alpha, n) : hc_score(alpha, n_alpha, n);
}

// low: ascending p-values that are <= alpha_max. n: subset size.
ScoreValue scan_alpha_grid(std::span<const double> low, std::size_t n, const ScoreSpec& spec) {
  ScoreValue best;
  best.n_total = n;
  best.alpha_star = spec.alpha_max;
  best.n_alpha = low.size();
  best.value = nonparametric(spec.statistic, spec.alpha_max, low.size(), n);
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (i + 1 < low.size() && low[i + 1] == low[i]) continue;
    const double v = nonparametric(spec.statistic, low[i], i + 1, n);
    if (v > best.value) {
      best.value = v;
      best.alpha_star = low[i];
      best.n_alpha = i + 1;
    }
  }
  return best;
}

void require_nonparametric(const ScoreSpec& spec) {
  if (!is_nonparametric(spec.statistic)) {
    throw std::invalid_argument("p-value scoring needs BJ or HC; " + to_string(spec.statistic) +
                                " scores attribute counts");
  }
}

}  // namespace

ScoreValue npss_score(std::span<const double> pvals, const ScoreSpec& spec) {
  if (pvals.empty()) throw std::invalid_argument("npss_score of an empty set");
  require_nonparametric(spec);
  spec.validate_alpha();
  std::vector<double> low;
  for (double p : pvals) {
    if (p <= spec.alpha_max) low.push_back(p);
  }
  std::sort(low.begin(), low.end());
  return scan_alpha_grid(low, pvals.size(), spec);
}

PriorityOrder priority_sort(std::span<const double> pvals) {
  PriorityOrder po;
  po.key.resize(pvals.size());
  for (std::size_t v = 0; v < pvals.size(); ++v) po.key[v] = -pvals[v];
  po.order.resize(pvals.size());
  std::iota(po.order.begin(), po.order.end(), Vertex{0});
  std::stable_sort(po.order.begin(), po.order.end(),
                   [&](Vertex a, Vertex b) { return po.key[a] > po.key[b]; });
  return po;
}

PriorityOrder priority_sort(const AttributedGraph& g, const ScoreSpec& spec) {
  if (is_nonparametric(spec.statistic)) {
    if (!g.has_pvalues()) throw std::invalid_argument("priority_sort needs calibrated p-values");
    return priority_sort(g.pvalues());
  }
  return SubsetScorer(g, spec).priority_order();
}

PrefixMax ltss_prefix_max(const PriorityOrder& order, std::span<const double> pvals,
                          const ScoreSpec& spec, std::size_t k_max) {
  require_nonparametric(spec);
  spec.validate_alpha();
  if (k_max < 1 || k_max > order.order.size()) {
    throw std::invalid_argument("k_max must lie in [1, n]");
  }
  std::vector<double> low;
  PrefixMax best;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double p = pvals[order.order[k - 1]];
    if (p <= spec.alpha_max) low.insert(std::upper_bound(low.begin(), low.end(), p), p);
    auto sv = scan_alpha_grid(low, k, spec);
    if (k == 1 || sv.value > best.score.value) best = {k, sv};
  }
  return best;
}

SubsetScorer::SubsetScorer(const AttributedGraph& g, ScoreSpec spec) : spec_(spec) {
  spec_.validate_alpha();
  const std::size_t n = g.num_vertices();
  priority_.resize(n);
  if (is_nonparametric(spec_.statistic)) {
    if (!g.has_pvalues()) throw std::invalid_argument(to_string(spec_.statistic) + " needs p-values");
    pvalues_.assign(g.pvalues().begin(), g.pvalues().end());
    for (Vertex v = 0; v < n; ++v) priority_[v] = -pvalues_[v];
    return;
  }
  if (!g.has_attrs()) throw std::invalid_argument(to_string(spec_.statistic) + " needs attributes");
  spec_.validate_window(g.num_steps());
  counts_.resize(n);
  baselines_.resize(n);
  const double width = static_cast<double>(spec_.baseline_end - spec_.baseline_begin);
  for (Vertex v = 0; v < n; ++v) {
    auto row = g.attr_row(v);
    double sum = 0.0;
    for (std::size_t t = spec_.baseline_begin; t < spec_.baseline_end; ++t) {
      if (row[t] < 0.0) throw InputError("EBP/KULL need non-negative attributes");
      sum += row[t];
    }
    if (row[spec_.eval_column] < 0.0) throw InputError("EBP/KULL need non-negative attributes");
    counts_[v] = row[spec_.eval_column];
    baselines_[v] = sum / width;
    count_total_ += counts_[v];
    baseline_total_ += baselines_[v];
    if (baselines_[v] > 0.0) {
      priority_[v] = counts_[v] / baselines_[v];
    } else {
      priority_[v] = counts_[v] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
  }
}

ScoreValue SubsetScorer::score_counts(double c, double b, std::size_t n) const {
  ScoreValue sv;
  sv.n_total = n;
  if (spec_.statistic == Statistic::EBP) {
    sv.value = b > 0.0 ? ebp_score(c, b) : 0.0;
  } else {
    sv.value = (b > 0.0 && b < baseline_total_) ? kulldorff_score(c, b, count_total_, baseline_total_)
                                                : 0.0;
  }
  return sv;
}

ScoreValue SubsetScorer::score(std::span<const Vertex> vs) const {
  if (vs.empty()) return {};
  if (is_nonparametric(spec_.statistic)) {
    std::vector<double> p;
    p.reserve(vs.size());
    for (Vertex v : vs) p.push_back(pvalues_[v]);
    return npss_score(p, spec_);
  }
  double c = 0.0, b = 0.0;
  for (Vertex v : vs) {
    c += counts_[v];
    b += baselines_[v];
  }
  return score_counts(c, b, vs.size());
}

PriorityOrder SubsetScorer::priority_order() const {
  PriorityOrder po;
  po.key = priority_;
  po.order.resize(priority_.size());
  std::iota(po.order.begin(), po.order.end(), Vertex{0});
  std::stable_sort(po.order.begin(), po.order.end(),
                   [&](Vertex a, Vertex b) { return po.key[a] > po.key[b]; });
  return po;
}

PrefixMax SubsetScorer::prefix_max(const PriorityOrder& order, std::size_t k_max) const {
  if (is_nonparametric(spec_.statistic)) return ltss_prefix_max(order, pvalues_, spec_, k_max);
  if (k_max < 1 || k_max > order.order.size()) {
    throw std::invalid_argument("k_max must lie in [1, n]");
  }
  PrefixMax best;
  double c = 0.0, b = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    c += counts_[order.order[k - 1]];
    b += baselines_[order.order[k - 1]];
    auto sv = score_counts(c, b, k);
    if (k == 1 || sv.value > best.score.value) best = {k, sv};
  }
  return best;
}

}  // namespace anomq
