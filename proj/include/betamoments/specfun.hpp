#pragma once

// log Gamma and log Barnes G on the complex plane, the Upsilon_beta function
// built from them, and the Morris integral normalisation.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "betamoments/errors.hpp"
#include "betamoments/quadrature.hpp"

namespace betamoments {

using cplx = std::complex<double>;

namespace detail {

inline bool is_nonpositive_integer(const cplx& z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// B_{2k} / (2k (2k-1)), k = 1..10
inline constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,          -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,    1.0 / 156.0,           -3617.0 / 122400.0,
    43867.0 / 244188.0,  -174611.0 / 125400.0};

// B_{2k+2} / (4k(k+1)), k = 1..8
inline constexpr std::array<double, 8> kBarnes = {
    (-1.0 / 30.0) / 8.0,      (1.0 / 42.0) / 24.0,       (-1.0 / 30.0) / 48.0,
    (5.0 / 66.0) / 80.0,      (-691.0 / 2730.0) / 120.0, (7.0 / 6.0) / 168.0,
    (-3617.0 / 510.0) / 224.0, (43867.0 / 798.0) / 288.0};

inline constexpr double kZetaPrimeMinus1 = -0.165421143700450929213919660243;

inline cplx expm1(const cplx& z) {
  const double a = z.real(), b = z.imag();
  if (b == 0.0) return {std::expm1(a), 0.0};
  const double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

}  // namespace detail

/// log Gamma(z). Branch: log Gamma(z+n) - sum_k log(z+k) with principal logs,
/// i.e. the standard analytic continuation (agrees with mpmath.loggamma).
inline cplx log_gamma(cplx z) {
  if (detail::is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at nonpositive integer");
  cplx shift = 0.0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const cplx inv = 1.0 / z, inv2 = inv * inv;
  cplx series = 0.0, pw = inv;
  for (double c : detail::kStirling) {
    series += c * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

inline double log_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw PoleError("log_gamma: pole at nonpositive integer");
  return std::lgamma(x);  // log|Gamma(x)|
}

/// log G(z), Barnes G-function, same branch convention as log_gamma: the real
/// part is log|G(z)|, the imaginary part agrees with arg G(z) modulo 2 pi.
inline cplx log_barnes_g(cplx z) {
  if (detail::is_nonpositive_integer(z)) throw PoleError("log_barnes_g: zero of G at nonpositive integer");
  cplx shift = 0.0;
  while (z.real() < 20.0) {
    shift += log_gamma(z);
    z += 1.0;
  }
  const cplx u = z - 1.0;
  const cplx lu = std::log(u), inv2 = 1.0 / (u * u);
  cplx series = 0.0, pw = inv2;
  for (double c : detail::kBarnes) {
    series += c * pw;
    pw *= inv2;
  }
  const cplx head = (0.5 * u * u - 1.0 / 12.0) * lu - 0.75 * u * u +
                    0.5 * u * std::log(2.0 * std::numbers::pi) + detail::kZetaPrimeMinus1;
  return head + series - shift;
}

enum class UpsilonMethod { gauss_kronrod, double_exponential };

namespace detail {

// 1/(2x) - 1/x^2 + 1/(x (e^x - 1)), with its Taylor series near 0.
inline double upsilon_weight(double x) {
  if (x < 0.5) {
    const double x2 = x * x;
    return 1.0 / 12.0 +
           x2 * (-1.0 / 720.0 +
                 x2 * (1.0 / 30240.0 +
                       x2 * (-1.0 / 1209600.0 +
                             x2 * (1.0 / 47900160.0 +
                                   x2 * (-691.0 / 1307674368000.0 + x2 * (7.0 / 6.0) / 87178291200.0)))));
  }
  return 0.5 / x - 1.0 / (x * x) + 1.0 / (x * std::expm1(x));
}

// (e^{-xz} - 1) / (e^{x beta/2} - 1), stable at both ends.
inline cplx upsilon_ratio(double beta, const cplx& z, double x) {
  const double hb = 0.5 * beta;
  if (x < 1.0) return detail::expm1(-x * z) / std::expm1(x * hb);
  return (std::exp(-x * (z + hb)) - std::exp(-x * hb)) / (-std::expm1(-x * hb));
}

inline cplx upsilon_integrand(double beta, const cplx& z, double x) {
  if (x == 0.0) return -z / (6.0 * beta);
  return upsilon_weight(x) * upsilon_ratio(beta, z, x);
}

}  // namespace detail

/// The integral part of Upsilon_beta(z).
inline BasicQuadResult<cplx> upsilon_integral(double beta, cplx z,
                                              UpsilonMethod method = UpsilonMethod::gauss_kronrod,
                                              const QuadratureSpec& spec = {}) {
  detail::require(beta > 0.0, "upsilon: beta must be positive");
  detail::require(z.real() > -0.5 * beta, "upsilon: need Re(z) > -beta/2 for the integral to converge");
  auto f = [&](double x) { return detail::upsilon_integrand(beta, z, x); };
  if (method == UpsilonMethod::gauss_kronrod)
    return integrate(f, 0.0, 1.0, spec) + integrate(f, 1.0, std::numeric_limits<double>::infinity(), spec);
  // Double-exponential rules are real-valued; integrate the two parts separately.
  auto part = [&](auto pick) {
    return tanh_sinh([&](double, double da, double) { return pick(f(da)); }, 0.0, 1.0, spec) +
           exp_sinh([&](double x) { return pick(f(x)); }, 1.0, spec);
  };
  const auto re = part([](const cplx& v) { return v.real(); });
  if (z.imag() == 0.0) return {cplx(re.value, 0.0), re.error_bound, re.evaluations};
  const auto im = part([](const cplx& v) { return v.imag(); });
  return {cplx(re.value, im.value), re.error_bound + im.error_bound, re.evaluations + im.evaluations};
}

/// Upsilon_beta(z) for Re z > -beta/2.
inline cplx upsilon(double beta, cplx z, UpsilonMethod method = UpsilonMethod::gauss_kronrod,
                    const QuadratureSpec& spec = {}) {
  const cplx w = 1.0 + 2.0 * z / beta;
  if (detail::is_nonpositive_integer(w)) throw PoleError("upsilon: 1 + 2z/beta is a pole");
  const cplx integral = upsilon_integral(beta, z, method, spec).value;
  return 0.5 * beta * log_barnes_g(w) - (z - 0.5) * log_gamma(w) + integral + z * z / beta + 0.5 * z;
}

inline double upsilon(double beta, double z, UpsilonMethod method = UpsilonMethod::gauss_kronrod,
                      const QuadratureSpec& spec = {}) {
  return upsilon(beta, cplx(z, 0.0), method, spec).real();
}

/// log M_N(a, b, lambda) = sum_{j<N} [lgG(lj+a+b+1) + lgG(l(j+1)+1) - lgG(lj+a+1) - lgG(lj+b+1) - lgG(l+1)].
inline cplx log_morris(int n, cplx a, cplx b, double lambda) {
  detail::require(n >= 1, "log_morris: N must be positive");
  detail::require(lambda > 0.0, "log_morris: lambda must be positive");
  detail::require((a + b).real() > -1.0, "log_morris: need Re(a+b) > -1");
  cplx acc = 0.0;
  const cplx g1 = log_gamma(cplx(lambda + 1.0));
  for (int j = 0; j < n; ++j) {
    const double lj = lambda * j;
    // grouped so that swapping a and b is bit-exact
    acc += log_gamma(lj + (a + b) + 1.0) + log_gamma(cplx(lambda * (j + 1) + 1.0)) -
           (log_gamma(lj + a + 1.0) + log_gamma(lj + b + 1.0)) - g1;
  }
  return acc;
}

}  // namespace betamoments
