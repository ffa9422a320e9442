#pragma once

// Thin wrappers over Boost.Math quadrature that add a uniform tolerance spec,
// evaluation counts, and a hard failure when the requested accuracy is not met.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <type_traits>

#include "betamoments/errors.hpp"

namespace betamoments {

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 1 << 20;

  void validate() const {
    detail::require(abs_tol > 0.0 && rel_tol > 0.0, "quadrature tolerances must be positive");
    detail::require(max_subdivisions > 0, "max_subdivisions must be positive");
  }
  unsigned max_depth() const {
    return static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(max_subdivisions))));
  }
  double target(double scale) const { return std::max(abs_tol, rel_tol * scale); }
};

template <class V>
struct BasicQuadResult {
  V value{};
  double error_bound = 0.0;
  std::size_t evaluations = 0;
};

using QuadResult = BasicQuadResult<double>;

template <class V>
BasicQuadResult<V> operator+(const BasicQuadResult<V>& a, const BasicQuadResult<V>& b) {
  return {a.value + b.value, a.error_bound + b.error_bound, a.evaluations + b.evaluations};
}

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

inline void check_converged(double err, double l1, const QuadratureSpec& spec, const char* what,
                            double slack = 1.0) {
  if (!std::isfinite(err) || err > slack * spec.target(l1)) throw QuadratureError(what, err);
}

// Double-exponential rules report the difference between the last two levels,
// which overstates the error of the final level (convergence is roughly quadratic).
inline constexpr double kLevelDifferenceSlack = 100.0;

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) on [a, b]; either end may be infinite.
/// Works for real and complex integrands.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureSpec& spec = {})
    -> BasicQuadResult<std::decay_t<decltype(f(0.0))>> {
  using V = std::decay_t<decltype(f(0.0))>;
  spec.validate();
  std::size_t evals = 0;
  auto counted = [&](double x) -> V {
    ++evals;
    return f(x);
  };
  double err = 0.0, l1 = 0.0;
  const V value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      counted, a, b, spec.max_depth(), spec.rel_tol, &err, &l1);
  detail::check_converged(err, l1, spec, "gauss-kronrod quadrature did not converge");
  return {value, err, evals};
}

/// Tanh-sinh on a finite [a, b]. The integrand is called as f(x, x - a, b - x),
/// with both distances free of cancellation near the endpoints.
template <class F>
QuadResult tanh_sinh(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  detail::require(std::isfinite(a) && std::isfinite(b) && a < b, "tanh_sinh: need finite a < b");
  const double len = b - a;
  std::size_t evals = 0;
  auto wrapped = [&](double x, double xc) -> double {
    ++evals;
    // Boost passes xc = a - x on the left half and b - x on the right half.
    const double da = xc < 0.0 ? -xc : len - xc;
    const double db = xc < 0.0 ? len + xc : xc;
    return f(x, da, db);
  };
  // abscissa tables are built once per thread
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double err = 0.0, l1 = 0.0;
  const double value = rule.integrate(wrapped, a, b, spec.rel_tol, &err, &l1);
  detail::check_converged(err, l1, spec, "tanh-sinh quadrature did not converge", detail::kLevelDifferenceSlack);
  return {value, err, evals};
}

/// Exp-sinh on [a, inf).
template <class F>
QuadResult exp_sinh(F&& f, double a, const QuadratureSpec& spec = {}) {
  spec.validate();
  std::size_t evals = 0;
  auto counted = [&](double x) -> double {
    ++evals;
    return f(x);
  };
  static thread_local boost::math::quadrature::exp_sinh<double> rule(15);
  double err = 0.0, l1 = 0.0;
  const double value = rule.integrate(counted, a, std::numeric_limits<double>::infinity(), spec.rel_tol, &err, &l1);
  detail::check_converged(err, l1, spec, "exp-sinh quadrature did not converge", detail::kLevelDifferenceSlack);
  return {value, err, evals};
}

}  // namespace betamoments
