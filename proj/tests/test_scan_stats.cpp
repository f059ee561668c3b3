#include <cmath>
#include <random>

#include "anomq/scan_stats.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace anomq;
using doctest::Approx;

namespace {

AttributedGraph series_graph(std::vector<std::vector<double>> rows) {
  const std::size_t n = rows.size(), t = rows[0].size();
  auto g = AttributedGraph::from_edges(n, {});
  std::vector<double> flat;
  for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  g.set_attrs(t, std::move(flat));
  return g;
}

ScoreSpec bj(double alpha_max = 0.15) {
  ScoreSpec s;
  s.alpha_max = alpha_max;
  return s;
}

}  // namespace

TEST_CASE("calibrate_pvalues examples") {
  std::vector<double> high(10), low(10), flat(5, 3.0);
  for (int t = 0; t < 9; ++t) high[t] = t, low[t] = 10 + t;
  high[9] = 100;
  low[9] = 1;
  auto g = series_graph({high, low});
  auto p9 = calibrate_pvalues(g, ScoreSpec::for_steps(10));
  CHECK(p9[0] == Approx(0.1));
  CHECK(p9[1] == 1.0);
  ScoreSpec s4;
  s4.baseline_begin = 0;
  s4.baseline_end = 4;
  s4.eval_column = 4;
  auto gf = series_graph({flat});
  CHECK(calibrate_pvalues(gf, s4)[0] == 1.0);
}

TEST_CASE("calibrate_pvalues errors") {
  auto g = AttributedGraph::from_edges(2, {});
  CHECK_THROWS(calibrate_pvalues(g, ScoreSpec::for_steps(3)));
  auto h = series_graph({{1, 2, 3}});
  ScoreSpec empty;
  empty.baseline_begin = 1;
  empty.baseline_end = 1;
  empty.eval_column = 2;
  CHECK_THROWS(calibrate_pvalues(h, empty));
  ScoreSpec overlap;
  overlap.baseline_begin = 0;
  overlap.baseline_end = 3;
  overlap.eval_column = 2;
  CHECK_THROWS(calibrate_pvalues(h, overlap));
}

TEST_CASE("calibrated p-values are super-uniform") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  const std::size_t trials = 10000, steps = 20;
  std::vector<double> flat;
  for (std::size_t i = 0; i < trials * steps; ++i) flat.push_back(z(rng));
  auto g = AttributedGraph::from_edges(trials, {});
  g.set_attrs(steps, std::move(flat));
  auto p = calibrate_pvalues(g, ScoreSpec::for_steps(steps));
  for (double a : {0.05, 0.1, 0.15, 0.5}) {
    double hits = 0;
    for (double x : p) hits += x <= a;
    const double sigma = std::sqrt(a * (1 - a) / trials);
    CHECK(hits / trials <= a + 3 * sigma);
  }
}

TEST_CASE("ebp_score") {
  CHECK(ebp_score(5, 5) == 0.0);
  CHECK(ebp_score(std::exp(1.0), 1.0) == Approx(1.0).epsilon(1e-12));
  CHECK(ebp_score(10, 5) == Approx(1.93147).epsilon(1e-5));
  CHECK(ebp_score(0, 5) == 0.0);
  CHECK_THROWS(ebp_score(1, 0));
}

TEST_CASE("kulldorff_score") {
  CHECK(kulldorff_score(2, 2, 10, 10) == 0.0);
  CHECK(kulldorff_score(4, 1, 4, 10) == Approx(9.21034).epsilon(1e-5));
  CHECK(kulldorff_score(0, 1, 5, 10) == 0.0);
  CHECK_THROWS(kulldorff_score(1, 0, 5, 10));
  CHECK_THROWS(kulldorff_score(1, 10, 5, 10));
}

TEST_CASE("kulldorff equals a likelihood ratio of Poisson rates") {
  // Direct LLR: maximized log-likelihood with separate inside/outside rates
  // minus the pooled-rate one.
  auto ll = [](double c, double b) { return c > 0 ? c * std::log(c / b) - c : 0.0; };
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double bt = 20, b = u(rng), ct = 15, c = std::min(ct, u(rng) * 1.5);
    const double llr = ll(c, b) + ll(ct - c, bt - b) - ll(ct, bt);
    const double expect = c / b > (ct - c) / (bt - b) ? llr : 0.0;
    CHECK(kulldorff_score(c, b, ct, bt) == Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("bj_score") {
  CHECK(bj_score(0.1, 1, 10) == 0.0);
  CHECK(bj_score(0.1, 10, 10) == Approx(23.02585).epsilon(1e-6));
  CHECK(bj_score(0.1, 5, 10) == Approx(5.10826).epsilon(1e-5));
  CHECK(bj_score(0.1, 0, 10) == 0.0);
  CHECK_THROWS(bj_score(0.0, 1, 10));
  CHECK_THROWS(bj_score(1.0, 1, 10));
}

TEST_CASE("hc_score") {
  CHECK(hc_score(0.05, 5, 100) == 0.0);
  CHECK(hc_score(0.05, 10, 100) == Approx(2.29416).epsilon(1e-5));
  CHECK(hc_score(0.05, 2, 100) == 0.0);
  CHECK_THROWS(hc_score(-0.1, 1, 10));
}

TEST_CASE("statistics are one-sided and monotone") {
  for (std::size_t n = 1; n <= 40; ++n)
    for (double a : {0.01, 0.05, 0.15, 0.5}) {
      double prev_bj = 0, prev_hc = 0;
      for (std::size_t na = 0; na <= n; ++na) {
        const double b = bj_score(a, na, n), h = hc_score(a, na, n);
        CHECK(b >= 0.0);
        CHECK(h >= 0.0);
        if (na <= n * a) {
          CHECK(b == 0.0);
          CHECK(h == 0.0);
        } else {
          CHECK(b >= prev_bj);
          CHECK(h >= prev_hc);
        }
        prev_bj = b;
        prev_hc = h;
      }
    }
}

TEST_CASE("npss_score examples") {
  const std::vector<double> one{0.01};
  auto v = npss_score(one, bj());
  CHECK(v.value == Approx(4.60517).epsilon(1e-5));
  REQUIRE(v.alpha_star);
  CHECK(*v.alpha_star == 0.01);
  CHECK(v.n_alpha == 1);
  CHECK(v.n_total == 1);

  const std::vector<double> none{0.5, 0.9};
  CHECK(npss_score(none, bj()).value == 0.0);

  const std::vector<double> three{0.01, 0.02, 0.5};
  CHECK(npss_score(three, bj()).value ==
        Approx(anomq::testing::ref_npss(three, Statistic::BJ, 0.15)).epsilon(1e-12));
  CHECK_THROWS(npss_score(std::vector<double>{}, bj()));
}

TEST_CASE("npss_score matches the alpha grid oracle") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng() % 20;
    auto p = anomq::testing::uniform_pvalues(n, rng);
    for (auto& x : p)
      if (rng() % 3 == 0) x *= 0.2;
    for (Statistic s : {Statistic::BJ, Statistic::HC}) {
      ScoreSpec spec = bj(0.05 + 0.3 * (rng() % 100) / 100.0);
      spec.statistic = s;
      auto v = npss_score(p, spec);
      CHECK(v.value == Approx(anomq::testing::ref_npss(p, s, spec.alpha_max)).epsilon(1e-12));
      CHECK(v.n_alpha <= v.n_total);
      if (v.alpha_star) CHECK(*v.alpha_star <= spec.alpha_max);
    }
  }
}

TEST_CASE("alpha_max validation") {
  ScoreSpec s;
  s.alpha_max = 0.0;
  CHECK_THROWS(s.validate_alpha());
  s.alpha_max = 1.5;
  CHECK_THROWS(s.validate_alpha());
  s.alpha_max = 1.0;
  CHECK_NOTHROW(s.validate_alpha());
  // alpha = 1 carries no one-sided signal
  CHECK(npss_score(std::vector<double>{1.0, 1.0}, s).value == 0.0);
}

TEST_CASE("priority_sort examples") {
  auto o = priority_sort(std::vector<double>{0.5, 0.01, 0.2});
  CHECK(o.order == std::vector<Vertex>{1, 2, 0});
  CHECK(o.key[1] == -0.01);
  CHECK(priority_sort(std::vector<double>{0.1, 0.1}).order == std::vector<Vertex>{0, 1});
  CHECK(priority_sort(std::vector<double>{0.1, 0.2, 0.3}).order == std::vector<Vertex>{0, 1, 2});
}

TEST_CASE("priority order keys are non-increasing with id tie-break") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> p(1 + rng() % 30);
    for (auto& x : p) x = (1 + rng() % 5) / 5.0;
    auto o = priority_sort(p);
    for (std::size_t j = 1; j < o.order.size(); ++j) {
      const Vertex a = o.order[j - 1], b = o.order[j];
      CHECK(o.key[a] >= o.key[b]);
      if (o.key[a] == o.key[b]) CHECK(a < b);
    }
  }
}

TEST_CASE("ltss_prefix_max examples") {
  const std::vector<double> p{0.01, 0.2, 0.5};
  auto o = priority_sort(p);
  auto r = ltss_prefix_max(o, p, bj(), 3);
  CHECK(r.k == 1);
  CHECK(r.score.value == Approx(4.60517).epsilon(1e-5));
  CHECK(r.score.value ==
        Approx(anomq::testing::exhaustive_subset_max(p, Statistic::BJ, 0.15)).epsilon(1e-12));

  const std::vector<double> eq(5, 0.5);
  CHECK(ltss_prefix_max(priority_sort(eq), eq, bj(), 5).k == 1);
  const std::vector<double> q{0.01, 0.02, 0.03};
  CHECK(ltss_prefix_max(priority_sort(q), q, bj(), 1).k == 1);
}

TEST_CASE("ltss equals exhaustive subset maximization") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 1 + rng() % 10;
    auto p = anomq::testing::uniform_pvalues(n, rng);
    for (Statistic s : {Statistic::BJ, Statistic::HC}) {
      ScoreSpec spec = bj();
      spec.statistic = s;
      auto r = ltss_prefix_max(priority_sort(p), p, spec, n);
      CHECK(std::abs(r.score.value - anomq::testing::exhaustive_subset_max(p, s, 0.15)) < 1e-9);
    }
  }
}

TEST_CASE("SubsetScorer for counts") {
  // Vertex 0 spikes from a baseline of 1 to 6; vertex 1 stays flat.
  auto g = series_graph({{1, 1, 6}, {2, 2, 2}, {1, 1, 0}});
  ScoreSpec s = ScoreSpec::for_steps(3, Statistic::EBP);
  SubsetScorer sc(g, s);
  CHECK(sc.score(std::vector<Vertex>{0}).value == Approx(ebp_score(6, 1)));
  CHECK(sc.score(std::vector<Vertex>{0, 1}).value == Approx(ebp_score(8, 3)));
  CHECK(sc.priority_order().order.front() == 0);
  CHECK(sc.score(std::vector<Vertex>{}).value == 0.0);

  SubsetScorer k(g, ScoreSpec::for_steps(3, Statistic::KULL));
  CHECK(k.score(std::vector<Vertex>{0}).value == Approx(kulldorff_score(6, 1, 8, 4)));
  // whole graph: B = B_tot, no outside region
  CHECK(k.score(std::vector<Vertex>{0, 1, 2}).value == 0.0);

  auto neg = series_graph({{1, -1, 2}});
  CHECK_THROWS(SubsetScorer(neg, ScoreSpec::for_steps(3, Statistic::EBP)));
}

TEST_CASE("SubsetScorer for p-values agrees with npss_score") {
  std::mt19937_64 rng(4);
  auto g = AttributedGraph::from_edges(8, {});
  auto p = anomq::testing::uniform_pvalues(8, rng);
  g.set_pvalues(p);
  SubsetScorer sc(g, bj());
  const std::vector<Vertex> vs{1, 4, 6};
  const std::vector<double> sub{p[1], p[4], p[6]};
  CHECK(sc.score(vs).value == npss_score(sub, bj()).value);
  auto o = sc.priority_order();
  CHECK(o.order == priority_sort(p).order);
}
