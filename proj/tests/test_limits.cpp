#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "betamoments/limits.hpp"

using namespace betamoments;
using rational = boost::multiprecision::cpp_rational;

namespace {

double gamma_product(double beta, int s) {
  double acc = 0.0;
  for (int j = 1; j <= s; ++j) acc += std::lgamma(2.0 * j / beta) - std::lgamma(2.0 * (s + j) / beta);
  return std::exp(acc);
}

}  // namespace

TEST(XMoment, TrivialAndClosedFormValues) {
  EXPECT_DOUBLE_EQ(x_moment_limit(2.7, 1.3, 0), 1.0);
  EXPECT_NEAR(x_moment_limit(2.0, 1.0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(x_moment_limit(4.0, 2.0, 1), 1.0 / 9.0, 1e-15);
  EXPECT_THROW(x_moment_limit(2.0, 0.5, 1), DomainError);
  EXPECT_THROW(x_moment_limit(2.0, 1.4, 2), DomainError);
}

TEST(XMoment, SecondMomentIdentityOnGrid) {
  for (double beta : {0.5, 1.0, 2.0, 4.0})
    for (double tau : {1.0, 1.5, 2.0, 3.0})
      EXPECT_NEAR(x_moment_limit(beta, tau, 1), x_second_moment_closed(beta, tau), 1e-12) << beta << " " << tau;
}

TEST(XMoment, SecondMomentIdentityIsExactInRationals) {
  for (const rational& beta : {rational(1, 2), rational(1), rational(2), rational(4)})
    for (const rational& tau : {rational(1), rational(3, 2), rational(2), rational(3)})
      EXPECT_EQ(x_moment_limit(beta, tau, 1), x_second_moment_closed(beta, tau));
  EXPECT_EQ(x_moment_limit(rational(2), rational(1), 1), rational(1, 3));
}

TEST(XMoment, HigherMomentsMatchReferenceSums) {
  // Independent high-precision evaluation of the same partition sum.
  EXPECT_NEAR(x_moment_limit(3.0, 7.0 / 3.0, 2), 0.0233217808584377499333511063712, 1e-14);
  // The alternating sum loses digits in double at small beta; the rational path does not.
  const double ref = 0.0000113566847846766710864073932093;
  EXPECT_NEAR(x_moment_limit(0.5, 3.0, 3) / ref, 1.0, 1e-8);
  EXPECT_NEAR(x_moment_limit(rational(1, 2), rational(3), 3).convert_to<double>() / ref, 1.0, 1e-15);
  const rational exact = x_moment_limit(rational(3), rational(7, 3), 2);
  EXPECT_NEAR(exact.convert_to<double>(), x_moment_limit(3.0, 7.0 / 3.0, 2), 1e-15);
}

TEST(XMoment, ClosedSecondMoment) {
  EXPECT_NEAR(x_second_moment_closed(2.0, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(x_second_moment_closed(2.0, 2.0), 1.0 / 15.0, 1e-15);
  EXPECT_THROW(x_second_moment_closed(2.0, 0.5), DomainError);
}

TEST(F0Limit, TrivialAndGammaProduct) {
  EXPECT_DOUBLE_EQ(f0_limit(2.0, cplx(0.4, 0.1), 0.0), 1.0);
  EXPECT_NEAR(f0_limit(2.0, 0.0, 1.0), 1.0, 1e-9);
  EXPECT_NEAR(f0_limit(2.0, 0.0, 2.0), 1.0 / 12.0, 1e-10);
  for (double beta : {1.0, 2.0, 4.0})
    for (int s : {1, 2, 3})
      EXPECT_NEAR(f0_limit(beta, 0.0, s) / gamma_product(beta, s), 1.0, 1e-9) << beta << " " << s;
}

TEST(F0Limit, ExponentCancelsAtZero) {
  for (double beta : {1.0, 2.0, 4.0}) {
    double acc = 0.0;
    for (const auto& t : f0_upsilon_terms(beta, cplx(0.3, 0.2), 0.0)) acc += t.sign * upsilon(beta, t.z).real();
    EXPECT_NEAR(acc, 0.0, 1e-12);
  }
}

TEST(F0Limit, ReferenceValuesAndConjugateSymmetry) {
  EXPECT_NEAR(f0_limit(2.0, 0.3, 1.0), 0.63054565408297, 1e-10);
  EXPECT_NEAR(f0_limit(2.0, cplx(0.2, 0.4), 1.5), 0.19226488996022, 1e-10);
  EXPECT_NEAR(f0_limit(2.0, cplx(0.2, 0.4), 1.5), f0_limit(2.0, cplx(0.2, -0.4), 1.5), 1e-12);
  EXPECT_NEAR(f0_limit(1.0, cplx(0.5, 0.3), 1.0), f0_limit(1.0, cplx(0.5, -0.3), 1.0), 1e-12);
}

TEST(F0Limit, MatchesFiniteNAsymptotics) {
  struct Case { double beta; double delta; double s; };
  for (auto c : {Case{2, 0, 1}, Case{2, 0, 2}, Case{1, 0.5, 1}, Case{4, 0, 1}}) {
    std::vector<double> v;
    for (int n : {100, 200, 400})
      v.push_back(log_cjbe_finite_f0(n, c.beta, c.delta, c.s) - log_n_coefficient(c.beta, c.delta, c.s) * std::log(n));
    EXPECT_NEAR(richardson(v), log_f0_limit(c.beta, c.delta, c.s), 1e-2);
  }
}

TEST(CjbeFiniteF0, SmallCases) {
  EXPECT_DOUBLE_EQ(cjbe_finite_f0(7, 2.0, 0.3, 0.0), 1.0);
  for (double beta : {1.0, 2.0, 4.0}) EXPECT_NEAR(cjbe_finite_f0(1, beta, 0.0, 1.0), 2.0, 1e-13);
}

TEST(Richardson, RemovesLeadingTerms) {
  auto f = [](double n) { return 3.0 + 2.0 / n - 5.0 / (n * n); };
  std::vector<double> v{f(10), f(20), f(40)};
  EXPECT_NEAR(richardson(v), 3.0, 1e-12);
}

TEST(Forrester, TrivialAndSmallValues) {
  EXPECT_DOUBLE_EQ(forrester_joint_moment(3.0, 0, 0.0), 1.0);
  EXPECT_NEAR(forrester_joint_moment(2.0, 1, 1.0), 1.0 / 12.0, 1e-14);
  EXPECT_NEAR(forrester_joint_moment(2.0, 1, 0.0), 1.0, 1e-14);
  EXPECT_THROW(forrester_joint_moment(2.0, 1, 0.5), PoleError);
  EXPECT_THROW(forrester_joint_moment(2.0, 1, 1.6), DomainError);
}

TEST(Forrester, NonIntegerHAgainstReferenceSeries) {
  EXPECT_NEAR(forrester_joint_moment(2.0, 1, 0.3), 0.331765747884681228459729641999, 1e-12);
  EXPECT_NEAR(forrester_joint_moment(2.0, 2, 1.3), 0.000583071964582563755790685710146, 1e-15);
  EXPECT_NEAR(forrester_joint_moment(1.0, 1, 0.7), 0.0147084529748237656137528738438, 1e-14);
  EXPECT_NEAR(forrester_joint_moment(4.0, 3, 2.2), 0.00025291549040408890781680089037, 1e-15);
}

TEST(Forrester, ConsistentWithMainTheorem) {
  for (double beta : {1.0, 2.0, 4.0})
    for (int s : {1, 2, 3}) {
      const double f0 = f0_limit(beta, 0.0, s);
      for (int h = 0; h <= s; ++h) {
        const double rhs = f0 * std::pow(2.0, -2.0 * h) * x_moment_limit(beta, double(s), h);
        EXPECT_NEAR(forrester_joint_moment(beta, s, h) / rhs, 1.0, 1e-8) << beta << " " << s << " " << h;
      }
    }
}

TEST(FLimit, Composition) {
  JointMomentParams p{2.0, 0.0, 1.0, 0.0};
  EXPECT_NEAR(f_limit(p), f0_limit(2.0, 0.0, 1.0), 1e-14);
  p.h = 1;
  EXPECT_NEAR(f_limit(p), 1.0 / 12.0, 1e-9);
  JointMomentParams q{2.0, 1.0, 1.0, 1.0};
  EXPECT_NEAR(f_limit(q), f0_limit(2.0, 1.0, 1.0) * 0.25 / 15.0, 1e-12);
  EXPECT_TRUE(q.in_theorem_window());
  EXPECT_FALSE((JointMomentParams{2.0, 0.0, 1.0, 1.6}).in_theorem_window());
}

TEST(MomentsConnection, Arithmetic) {
  const double a = 1.7, b = 5.2;
  std::vector<double> two{a, b};
  EXPECT_DOUBLE_EQ(moments_connection(1, two), (b - 2 * a) / 2);
  EXPECT_DOUBLE_EQ(moments_connection(0, {}), 1.0);
  EXPECT_THROW(moments_connection(2, two), std::invalid_argument);
}

TEST(Laguerre, AsPrintedValues) {
  EXPECT_DOUBLE_EQ(y_moment_limit(2.5, 3.0, 0, NormalizationMode::as_printed), 1.0);
  EXPECT_NEAR(y_moment_limit(2.0, 2.0, 1, NormalizationMode::as_printed), 0.25, 1e-15);
  EXPECT_NEAR(laguerre_finite_moment(2.0, 3.0, 1, 1, NormalizationMode::as_printed), 1.0 / 6.0, 1e-15);
  EXPECT_THROW(y_moment_limit(2.0, 1.0, 2), DomainError);
}

TEST(Laguerre, CalibratedMatchesOneDimensionalIntegrals) {
  // N = 1: E[x^r] = 2^r Gamma(nu + 1 - r) / Gamma(nu + 1) for every beta.
  for (double beta : {1.0, 2.0, 3.0, 4.0})
    for (double nu : {2.0, 3.3}) {
      EXPECT_NEAR(laguerre_finite_moment(beta, nu, 1, 1), 2.0 / nu, 1e-14);
      EXPECT_NEAR(laguerre_finite_moment(beta, nu, 1, 2), 4.0 / (nu * (nu - 1.0)), 1e-14);
      EXPECT_NEAR(y_moment_limit(beta, nu, 1), 2.0 / nu, 1e-14);
    }
}

TEST(Laguerre, CalibratedMatchesTwoPointIntegrals) {
  // Two-dimensional integrals of the inverse-Laguerre density (30-digit quadrature).
  EXPECT_NEAR(laguerre_finite_moment(1.0, 3.3, 2, 2), 1.8306636155606407323, 1e-12);
  EXPECT_NEAR(laguerre_finite_moment(3.0, 2.5, 2, 2), 3.7333333333333333333, 1e-12);
  EXPECT_NEAR(laguerre_finite_moment(2.0, 3.0, 2, 1), 4.0 / 3.0, 1e-14);
}

TEST(Laguerre, LimitIsScaledFiniteN) {
  for (double beta : {1.0, 2.5})
    for (int r : {1, 2, 3}) {
      const int n = 1000000;
      const double scaled = laguerre_finite_moment(beta, 4.5, n, r) / std::pow(double(n), r);
      EXPECT_NEAR(scaled / y_moment_limit(beta, 4.5, r), 1.0, 1e-4);
    }
}

TEST(Laguerre, ExactRationalEvaluation) {
  const rational v = y_moment_limit(rational(2), rational(3), 2);
  EXPECT_NEAR(v.convert_to<double>(), y_moment_limit(2.0, 3.0, 2), 1e-15);
}

TEST(Jacobi, BetaTwoMatchesBetaIntegral) {
  for (double nu : {1.5, 2.0, 4.0})
    for (double mu : {0.0, 1.0, 2.5})
      EXPECT_NEAR(jacobi_inverse_moment(2.0, nu, mu, 1, 1), (nu + mu + 1.0) / nu, 1e-12);
  EXPECT_NEAR(jacobi_inverse_moment(2.0, 2.0, 1.0, 1, 1), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(jacobi_inverse_moment(2.0, 2.0, 1.0, 3, 0), 1.0);
}

TEST(Jacobi, AsPrintedScalesLikeBetaSquaredAtOtherBeta) {
  // At N = 1 the literal sum carries a 4 / beta^2 factor relative to the integral.
  for (double beta : {1.0, 4.0})
    for (double nu : {1.5, 3.0})
      for (double mu : {0.0, 2.0})
        EXPECT_NEAR(jacobi_inverse_moment(beta, nu, mu, 1, 1), 4.0 / (beta * beta) * (nu + mu + 1.0) / nu, 1e-12);
}
