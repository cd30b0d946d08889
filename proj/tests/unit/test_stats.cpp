#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "critgraph/random.hpp"
#include "critgraph/stats.hpp"

using namespace critgraph;

TEST(L2, Examples) {
  const std::vector<double> x{3, 1};
  EXPECT_EQ(l2_distance(x, x), 0.0);
  EXPECT_DOUBLE_EQ(l2_distance(x, std::vector<double>{0, 0}), std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(l2_distance(std::vector<double>{1}, std::vector<double>{0, 1}), 0.0);
}

TEST(L2, MetricProperties) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::uniform_int_distribution<int> len(0, 6);
  auto draw = [&] {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (double& x : v) x = u(rng);
    return v;
  };
  for (int t = 0; t < 2000; ++t) {
    const auto x = draw(), y = draw(), z = draw();
    EXPECT_EQ(l2_distance(x, y), l2_distance(y, x));
    EXPECT_EQ(l2_distance(x, x), 0.0);
    EXPECT_LE(l2_distance(x, z), l2_distance(x, y) + l2_distance(y, z) + 1e-12);
  }
}

TEST(Ks, Examples) {
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_EQ(two_sample_ks(x, x).statistic, 0.0);
  EXPECT_EQ(two_sample_ks(std::vector<double>{0}, std::vector<double>{1}).statistic, 1.0);
  EXPECT_THROW(two_sample_ks(std::vector<double>{}, x), std::invalid_argument);
}

TEST(Ks, HandComputedWithTies) {
  // F_x jumps 1/3 at 1, 2, 2 -> at 2: 1; F_y: 1/2 at 2, 1 at 3. sup at 2: |1 - 1/2|.
  const std::vector<double> x{1, 2, 2}, y{2, 3};
  EXPECT_DOUBLE_EQ(two_sample_ks(x, y).statistic, 0.5);
}

TEST(Ks, KolmogorovTail) {
  EXPECT_NEAR(kolmogorov_tail(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_tail(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(kolmogorov_tail(0.5), 0.9639, 1e-4);
  EXPECT_EQ(kolmogorov_tail(0.0), 1.0);
  // Both series meet at the switch point.
  EXPECT_NEAR(kolmogorov_tail(1.18 - 1e-12), kolmogorov_tail(1.18 + 1e-12), 1e-10);
}

TEST(Ks, MonotoneInvariance) {
  Rng rng(2);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(500), y(700);
  for (double& v : x) v = e(rng);
  for (double& v : y) v = 1.2 * e(rng);
  const TestResult a = two_sample_ks(x, y);
  const double scale = std::pow(1e5, -2.0 / 3.0);
  for (double& v : x) v *= scale;
  for (double& v : y) v *= scale;
  const TestResult b = two_sample_ks(x, y);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_GE(a.statistic, 0.0);
  EXPECT_LE(a.statistic, 1.0);
}

TEST(Ks, NullRejectionsWithinBudget) {
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_stream(1234, {seed});
    std::normal_distribution<double> g;
    std::vector<double> stream(10000);
    for (double& v : stream) v = g(rng);
    const std::span<const double> all(stream);
    if (two_sample_ks(all.first(5000), all.last(5000)).p_value < 0.001) ++rejections;
  }
  // Binomial(100, 0.001): P{>= 3} < 2e-4.
  EXPECT_LE(rejections, 2);
}

TEST(ChiSquare, Examples) {
  const std::vector<std::int64_t> prop{60, 40};
  EXPECT_DOUBLE_EQ(chi_square_gof(prop, std::vector<double>{0.6, 0.4}).statistic, 0.0);
  const TestResult r = chi_square_gof(std::vector<std::int64_t>{60, 40}, std::vector<double>{0.5, 0.5});
  EXPECT_DOUBLE_EQ(r.statistic, 4.0);
  EXPECT_EQ(r.dof, 1);
  EXPECT_NEAR(r.p_value, 0.0455, 1e-4);
  EXPECT_THROW(chi_square_gof(std::vector<std::int64_t>{10}, std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(chi_square_gof(std::vector<std::int64_t>{10, 5}, std::vector<double>{0.5, 0.6}),
               std::invalid_argument);
}

TEST(ChiSquare, RelabelInvariance) {
  const std::vector<std::int64_t> o{30, 50, 20, 100};
  const std::vector<double> p{0.2, 0.2, 0.1, 0.5};
  const std::vector<std::int64_t> o2{100, 20, 30, 50};
  const std::vector<double> p2{0.5, 0.1, 0.2, 0.2};
  const TestResult a = chi_square_gof(o, p), b = chi_square_gof(o2, p2);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-12);
  EXPECT_EQ(a.dof, b.dof);
}

TEST(ChiSquare, PoolsSmallBins) {
  // Expected counts 90, 5, 3, 2: the two smallest are pooled into one bin of 5.
  const TestResult r = chi_square_gof(std::vector<std::int64_t>{90, 5, 3, 2},
                                      std::vector<double>{0.9, 0.05, 0.03, 0.02});
  EXPECT_EQ(r.dof, 2);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
}

TEST(ChiSquare, Survival) {
  EXPECT_NEAR(chi_square_survival(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(chi_square_survival(2.0 * std::log(10.0), 2), 0.1, 1e-12);
}

TEST(MeanCurveTest, Constant) {
  std::vector<PathCurve> c(3, PathCurve{{0, 1, 2}, {5, 5, 5}});
  const MeanCurve m = mean_curve(c);
  for (double sd : m.sd) EXPECT_EQ(sd, 0.0);
}

TEST(MeanCurveTest, TwoPaths) {
  const std::vector<PathCurve> c{{{0, 1}, {0, 1}}, {{0, 1}, {0, 3}}};
  const MeanCurve m = mean_curve(c);
  EXPECT_EQ(m.mean, (std::vector<double>{0, 2}));
  EXPECT_DOUBLE_EQ(m.sd[1], std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(m.stderr_[1], 1.0);
}

TEST(MeanCurveTest, Errors) {
  const std::vector<PathCurve> one{{{0, 1}, {0, 1}}};
  EXPECT_THROW(mean_curve(one), std::invalid_argument);
  const std::vector<PathCurve> mismatch{{{0, 1}, {0, 1}}, {{0, 2}, {0, 1}}};
  EXPECT_THROW(mean_curve(mismatch), std::invalid_argument);
}

TEST(Fits, ExactCurves) {
  std::vector<double> s, y, q;
  for (int i = 0; i <= 100; ++i) {
    s.push_back(i / 100.0);
    y.push_back(0.3 * s.back() - 2.0 * s.back() * s.back());
    q.push_back(1.7 * s.back());
  }
  const DriftFit f = fit_parabolic_drift(s, y);
  EXPECT_NEAR(f.linear, 0.3, 1e-12);
  EXPECT_NEAR(f.beta, 4.0, 1e-12);
  EXPECT_NEAR(fit_slope_through_origin(s, q), 1.7, 1e-12);
}

TEST(Summaries, Basics) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(sample_mean(v), 2.5);
  EXPECT_DOUBLE_EQ(sample_sd(v), std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
}
