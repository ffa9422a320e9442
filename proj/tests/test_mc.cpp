#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "betamoments/limits.hpp"
#include "betamoments/mc.hpp"

using namespace betamoments;

namespace {

constexpr double pi = std::numbers::pi;

ChainConfig config(std::uint64_t seed, int samples) {
  ChainConfig c;
  c.seed = seed;
  c.samples = samples;
  return c;
}

}  // namespace

TEST(Psi, SimpleConfigurations) {
  const std::vector<double> one{pi}, two{pi, pi};
  EXPECT_NEAR(abs_psi(one), 2.0, 1e-15);
  EXPECT_NEAR(psi_log_derivative(two), 0.0, 1e-15);
  const std::vector<double> t{0.4, 2.0, 5.1};
  double h = 1e-6, lp = log_abs_psi(t);
  // d/du log|Psi| at 0 is the real part of Psi'/Psi; shifting all angles by -u rotates the polynomial
  std::vector<double> tp(t), tm(t);
  for (auto& v : tp) v -= h;
  for (auto& v : tm) v += h;
  EXPECT_NEAR((log_abs_psi(tp) - log_abs_psi(tm)) / (2 * h), psi_log_derivative(t), 1e-6);
  EXPECT_TRUE(std::isfinite(lp));
}

TEST(TraceMoment, TrivialAndOnePoint) {
  auto spec = EnsembleSpec::hua_pickrell(1, 2.0, 1.0);
  auto z = estimate_trace_moment(spec, 0.0, config(1, 10));
  EXPECT_EQ(z.value, 1.0);
  EXPECT_EQ(z.std_error, 0.0);
  auto e = estimate_trace_moment(EnsembleSpec::hua_pickrell(1, 2.0, 2.0), 1.0, config(2, 50000));
  EXPECT_NEAR(e.value, 1.0 / 3.0, 3 * e.std_error);
  EXPECT_THROW(estimate_trace_moment(spec, 1.5, config(1, 10)), DomainError);
  EXPECT_THROW(estimate_trace_moment(EnsembleSpec::hua_pickrell(1, 2.0, cplx(1.0, 0.5)), 1.0, config(1, 10)),
               DomainError);
}

TEST(TraceMoment, DeterministicGivenSeed) {
  auto spec = EnsembleSpec::hua_pickrell(3, 2.0, 2.0);
  auto a = estimate_trace_moment(spec, 1.0, config(7, 500));
  auto b = estimate_trace_moment(spec, 1.0, config(7, 500));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(TraceMoment, OddMomentVanishes) {
  auto batch = sample_mcmc(EnsembleSpec::hua_pickrell(4, 2.0, 2.0), config(3, 20000));
  std::vector<double> v;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto p = batch.point(i);
    const double s = (p[0] + p[1] + p[2] + p[3]) / 4;
    v.push_back(s * s * s);
  }
  auto m = batch_means(v);
  EXPECT_NEAR(m.mean, 0.0, 3 * m.std_error);
}

TEST(JointMoment, CircularAndHuaPickrellSidesAgree) {
  const int n = 8;
  auto c = estimate_joint_moment_cjbe(n, 2.0, 0.0, 1.0, 1.0, config(4, 40000));
  auto h = estimate_trace_moment(EnsembleSpec::hua_pickrell(n, 2.0, 1.0), 1.0, config(5, 40000));
  // F(s,h)/F(s,0) = 2^{-2h} E[|sum x|^{2h}] = 2^{-2h} N^{2h} * trace moment
  const double hp_side = 0.25 * n * n * h.value, hp_err = 0.25 * n * n * h.std_error;
  EXPECT_NEAR(c.value, hp_side, 3 * std::hypot(c.std_error, hp_err)) << c.value << " " << hp_side;
  EXPECT_GT(c.effective_fraction, 0.1);
  EXPECT_THROW(estimate_joint_moment_cjbe(n, 2.0, 0.0, 1.0, 1.6, config(4, 10)), DomainError);
}

TEST(JointMoment, FallsBackWhenWeightsDegenerate) {
  auto c = estimate_joint_moment_cjbe(12, 2.0, 0.0, 4.0, 1.0, config(6, 4000));
  EXPECT_LT(c.effective_fraction, 0.1);
  EXPECT_FALSE(c.warning.empty());
  EXPECT_GT(c.value, 0.0);
}

TEST(GLaguerre, SmallCases) {
  auto z = estimate_g_laguerre(3, 2.0, 2.0, 0.0, 10, 1);
  EXPECT_EQ(z.value, 1.0);
  EXPECT_EQ(z.std_error, 0.0);
  auto e = estimate_g_laguerre(1, 2.0, 2.0, 1.0, 200000, 2);
  EXPECT_NEAR(e.value, 0.5, 3 * e.std_error);
  EXPECT_THROW(estimate_g_laguerre(1, 2.0, 2.0, 3.0, 10, 1), DomainError);
}

TEST(GLaguerre, ApproachesCalibratedLimit) {
  // N^{-r} G_N = 2^{-r} N^{-r} E-hat[(sum x)^r], exact at every N by the finite formula
  for (int n : {5, 10, 20}) {
    auto e = estimate_g_laguerre(n, 2.0, 3.0, 1.0, 40000, 10 + n);
    const double finite = 0.5 * laguerre_finite_moment(2.0, 3.0, n, 1) / n;
    EXPECT_NEAR(e.value, finite, 3 * e.std_error) << n;
  }
  auto e = estimate_g_laguerre(20, 2.0, 3.0, 1.0, 40000, 99);
  const double limit = 0.5 * y_moment_limit(2.0, 3.0, 1);
  EXPECT_LT(std::abs(e.value - limit) / limit, 0.1);
}

TEST(Exchangeability, IdentityIsZeroAndSmallSampleRejected) {
  auto arrays = sample_arrays(EnsembleSpec::inverse_laguerre(1, 2.0, 2.0), 4, 200, 3);
  const std::vector<int> id{0, 1, 2}, swap{1, 0, 2};
  EXPECT_EQ(exchangeability_statistic(arrays, id), 0.0);
  EXPECT_GT(exchangeability_statistic(arrays, swap), 0.0);
  Rng rng = make_stream(1, 0);
  EXPECT_THROW(exchangeability_test(std::span(arrays).first(50), 2, rng), DomainError);
}

TEST(Exchangeability, InverseLaguerreDiagonalIsExchangeable) {
  auto arrays = sample_arrays(EnsembleSpec::inverse_laguerre(1, 4.0, 2.0), 6, 4000, 21);
  Rng rng = make_stream(22, 0);
  auto rep = exchangeability_test(arrays, 3, rng, 2);
  EXPECT_EQ(rep.checks.size(), 6u);
  for (const auto& c : rep.checks) EXPECT_GT(c.p_value, 0.01) << c.label << " D=" << c.statistic;
}

TEST(Exchangeability, DetectsNonExchangeableRows) {
  // Rows of independent draws with growing scale are not exchangeable.
  std::vector<InterlacingArray> fake(2000);
  Rng rng = make_stream(23, 0);
  std::normal_distribution<double> nd;
  for (auto& a : fake) {
    const double d1 = nd(rng), d2 = 3.0 * nd(rng);
    a.rows = {{d1}, {d1 + d2, d1 + d2 - 1.0}};
  }
  Rng r2 = make_stream(24, 0);
  EXPECT_FALSE(exchangeability_test(fake, 2, r2).passes());
}

TEST(Martingale, ConstantMeanForInverseLaguerre) {
  auto arrays = sample_arrays(EnsembleSpec::inverse_laguerre(1, 4.0, 2.0), 20, 4000, 31);
  const std::vector<int> ns{1, 2, 5, 10, 20};
  auto rep = martingale_check(arrays, ns, 1.0);
  EXPECT_TRUE(rep.constant_mean);
  EXPECT_TRUE(rep.matches_expected);
  EXPECT_TRUE(rep.variance_nonincreasing);
  ASSERT_EQ(rep.increment_mean_square.size(), 4u);
  // later increments are smaller: paths settle down
  EXPECT_LT(rep.increment_mean_square[3], rep.increment_mean_square[0]);
}

TEST(Martingale, HuaPickrellMeanIsZero) {
  auto arrays = sample_arrays(EnsembleSpec::hua_pickrell(1, 2.0, 1.0), 10, 2000, 32);
  const std::vector<int> ns{1, 2, 10};
  auto rep = martingale_check(arrays, ns, 0.0);
  EXPECT_TRUE(rep.matches_expected);
  EXPECT_TRUE(rep.constant_mean);
}
