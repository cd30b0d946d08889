#include <gtest/gtest.h>

#include <cmath>

#include "critgraph/limit.hpp"
#include "critgraph/stats.hpp"

using namespace critgraph;

namespace {

std::vector<double> scan_reflect(const std::vector<double>& w) {
  std::vector<double> out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double lowest = w[0];
    for (std::size_t j = 0; j <= k; ++j) lowest = std::min(lowest, w[j]);
    out.push_back(w[k] - lowest);
  }
  return out;
}

}  // namespace

TEST(Params, Validation) {
  LimitParams p;
  EXPECT_NO_THROW(p.validate());
  p.dt = 0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = LimitParams{};
  p.sigma = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = LimitParams{};
  p.s0 = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_EQ(LimitParams{}.grid_steps(), 80000);
}

TEST(Params, FromMoments) {
  const MomentSummary m{0.5, 1.0, 2.0, 1.0, 4.0, true};
  const LimitParams p = LimitParams::from_moments(m, 0.5, 8.0, 1e-4);
  EXPECT_DOUBLE_EQ(p.sigma, 1.0);
  EXPECT_DOUBLE_EQ(p.beta, 4.0);
  EXPECT_DOUBLE_EQ(p.a, 0.5);
}

TEST(Reflect, Examples) {
  EXPECT_EQ(reflect_path(std::vector<double>{0, -1, -2}), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(reflect_path(std::vector<double>{0, 1, -1, 2}), (std::vector<double>{0, 1, 0, 3}));
  EXPECT_EQ(reflect_path(std::vector<double>{0, 2, 1, 3}), (std::vector<double>{0, 2, 1, 3}));
  EXPECT_THROW(reflect_path(std::vector<double>{1, 0}), std::invalid_argument);
}

TEST(Excursions, Examples) {
  EXPECT_TRUE(extract_excursions(std::vector<double>{0, 0, 0, 0}, 1.0).lengths.empty());
  const ExcursionList e = extract_excursions(std::vector<double>{0, 1, 2, 0, 3, 0}, 1.0);
  EXPECT_EQ(e.lengths, (std::vector<double>{3, 2}));
  EXPECT_FALSE(e.truncated_tail);
  const ExcursionList t = extract_excursions(std::vector<double>{0, 1, 1}, 1.0);
  EXPECT_TRUE(t.lengths.empty());
  EXPECT_TRUE(t.truncated_tail);
  EXPECT_EQ(extract_excursions(std::vector<double>{0, 1, 1}, 1.0, true).lengths, (std::vector<double>{2}));
}

TEST(Simulate, ReflectionMatchesIndependentScan) {
  LimitParams p;
  p.s0 = 1.0;
  p.dt = 1e-3;
  Rng rng(9);
  const LimitPath path = simulate_limit_path(p, rng);
  ASSERT_EQ(path.values.size(), 1001u);
  EXPECT_EQ(path.values[0], 0.0);
  EXPECT_EQ(path.reflected, scan_reflect(path.values));
  for (double b : path.reflected) EXPECT_GE(b, 0.0);
  const ExcursionList e = extract_excursions(path);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < e.lengths.size(); ++i) EXPECT_GE(e.lengths[i], e.lengths[i + 1]);
  for (double l : e.lengths) {
    EXPECT_GT(l, 0.0);
    sum += l;
  }
  EXPECT_LE(sum, p.s0 + 1e-9);
}

TEST(Simulate, DeterministicDrift) {
  LimitParams p;
  p.a = 1.0;
  p.beta = 1.0;
  p.sigma = 1e-12;
  p.s0 = 2.0;
  p.dt = 1e-3;
  Rng rng(1);
  const LimitPath path = simulate_limit_path(p, rng);
  std::size_t best = 0;
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    if (path.values[k] > path.values[best]) best = k;
  }
  EXPECT_NEAR(best * p.dt, 1.0, 2e-3);
  EXPECT_NEAR(path.values[best], 0.5, 1e-6);
}

TEST(Simulate, MeanAndVarianceAtOne) {
  LimitParams p;
  p.s0 = 1.0;
  p.dt = 1e-2;
  p.beta = 2.0;
  p.sigma = 1.5;
  const int paths = 10000;
  std::vector<double> at_one;
  for (int i = 0; i < paths; ++i) {
    Rng rng = make_stream(31, {static_cast<std::uint64_t>(i)});
    at_one.push_back(simulate_limit_path(p, rng).values.back());
  }
  const double mean = sample_mean(at_one);
  const double sd = sample_sd(at_one);
  EXPECT_LE(std::fabs(mean - (-1.0)), 4 * p.sigma / std::sqrt(static_cast<double>(paths)));
  // Sample variance over 10^4 normals has relative sd sqrt(2/9999) ~ 1.4%.
  EXPECT_NEAR(sd * sd / (p.sigma * p.sigma), 1.0, 0.05);
}

TEST(Gamma, PaddingAndDeterminism) {
  LimitParams p;
  p.s0 = 1.0;
  p.dt = 1e-2;
  p.beta = 50.0;
  const GammaSample a = sample_gamma(p, 20, 200, 5, 1);
  const GammaSample b = sample_gamma(p, 20, 200, 5, 3);
  EXPECT_EQ(a.top, b.top);
  bool padded = false;
  for (const auto& row : a.top) padded = padded || row.back() == 0.0;
  EXPECT_TRUE(padded);
  EXPECT_THROW(sample_gamma(p, 0, 1, 5), std::invalid_argument);
  EXPECT_THROW(sample_gamma(p, 1, 0, 5), std::invalid_argument);
}

TEST(Gamma, TopKTruncationRare) {
  LimitParams p;
  p.dt = 1e-3;
  const GammaSample g = sample_gamma(p, 500, 10, 77, 1);
  EXPECT_LT(g.top_k_truncation_rate, 0.02);
  EXPECT_GE(g.truncation_rate, g.top_k_truncation_rate);
}
