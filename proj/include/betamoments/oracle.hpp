#pragma once

// Deterministic quadrature ground truth for small N. Nothing here consumes
// Monte Carlo output.
//
// Two-point integrals are reduced to one-dimensional ones wherever the
// integrand factorises: inside the interlacing polytope the linear factors
// (x1 - x2) and (y1 - y2) split across the middle point, e.g.
// x1 - x2 = (x1 - y2) + (y2 - x2), which turns each 2-d integral into a sum of
// products of 1-d integrals. Endpoint singularities are handled by
// double-exponential rules that receive exact endpoint distances.

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "betamoments/ensembles.hpp"
#include "betamoments/errors.hpp"
#include "betamoments/quadrature.hpp"
#include "betamoments/specfun.hpp"

namespace betamoments {

namespace detail {

inline constexpr double half_pi = 0.5 * std::numbers::pi;

inline double rel_error(const QuadResult& r) {
  return r.value != 0.0 ? r.error_bound / std::abs(r.value) : r.error_bound;
}

// a / b with first-order error propagation.
inline QuadResult ratio(const QuadResult& a, const QuadResult& b) {
  QuadResult r;
  r.value = a.value / b.value;
  r.error_bound = std::abs(r.value) * (rel_error(b)) + a.error_bound / std::abs(b.value);
  r.evaluations = a.evaluations + b.evaluations;
  return r;
}

// Tracks the worst relative error and total evaluations of inner integrals.
struct InnerLedger {
  double worst_rel = 0.0;
  std::size_t evaluations = 0;

  double record(const QuadResult& r) {
    if (r.value != 0.0) worst_rel = std::max(worst_rel, r.error_bound / std::abs(r.value));
    evaluations += r.evaluations;
    return r.value;
  }
  QuadResult finish(const QuadResult& outer) const {
    return {outer.value, outer.error_bound + worst_rel * std::abs(outer.value), outer.evaluations + evaluations};
  }
};

}  // namespace detail

struct CauchyMoment {
  QuadResult quadrature;
  double closed_form = 0.0;
};

/// int_R x^{2m} (1 + x^2)^{-(beta(N-1)/2 + 1 + tau)} dx, by quadrature in x = tan(u)
/// and by the Gamma-function evaluation.
inline CauchyMoment cauchy_moment_1d(int m, double beta, int n, double tau, const QuadratureSpec& spec = {}) {
  detail::require(m >= 0 && n >= 1 && beta > 0.0, "cauchy_moment_1d: need m >= 0, N >= 1, beta > 0");
  const double c = 0.5 * beta * (n - 1) + 1.0 + tau;
  if (!(c - m - 0.5 > 0.0)) throw DomainError("cauchy_moment_1d: integral diverges");
  CauchyMoment out;
  out.closed_form = std::exp(log_gamma(m + 0.5) + log_gamma(c - m - 0.5) - log_gamma(c));
  // sin^{2m} u cos^{2c - 2m - 2} u on (0, pi/2), doubled; cos u = sin(pi/2 - u) exactly
  const double pc = 2.0 * c - 2.0 * m - 2.0;
  auto f = [&](double u, double, double db) { return std::pow(std::sin(u), 2 * m) * std::pow(std::sin(db), pc); };
  out.quadrature = tanh_sinh(f, 0.0, detail::half_pi, spec);
  out.quadrature.value *= 2.0;
  out.quadrature.error_bound *= 2.0;
  return out;
}

/// E_{k,beta}^{(tau)}[(x_1 + ... + x_k)^power] for k in {1, 2}, real tau, by quadrature
/// in x_i = tan(u_i) where the weight becomes
///   sin^p(u1 + u2) |sin(u1 - u2)|^beta cos^{2 tau - p}(u1) cos^{2 tau - p}(u2),
/// normalised by the same quadrature at power 0.
inline QuadResult hp_row_moment(int k, double beta, double tau, int power, const QuadratureSpec& spec = {}) {
  detail::require(k == 1 || k == 2, "hp_row_moment: k must be 1 or 2");
  detail::require(beta > 0.0 && power >= 0, "hp_row_moment: need beta > 0, power >= 0");
  if (!(power < 1.0 + 2.0 * tau)) throw DomainError("hp_row_moment: need power < 1 + 2 tau");

  auto one = [&](int p) -> QuadResult {
    const double e = 2.0 * tau - p;
    // cos u from the nearer endpoint distance
    auto f = [&](double u, double da, double db) {
      return std::pow(std::sin(u), p) * std::pow(std::sin(std::min(da, db)), e);
    };
    return tanh_sinh(f, -detail::half_pi, detail::half_pi, spec);
  };
  if (k == 1) return detail::ratio(one(power), one(0));

  auto two = [&](int p) -> QuadResult {
    const double e = 2.0 * tau - p;
    detail::InnerLedger ledger;
    // u2 < u1 half of the square, doubled by symmetry
    auto outer = [&](double u1, double da1, double db1) {
      if (!(u1 > -detail::half_pi)) return 0.0;
      const double c1 = std::pow(std::sin(std::min(da1, db1)), e);
      auto inner = [&](double u2, double a2, double b2) {
        const double cos2 = std::sin(std::min(a2, db1 + b2));
        const double gap = std::sin(std::min(b2, db1 + a2));
        return std::pow(std::sin(u1 + u2), p) * std::pow(gap, beta) * std::pow(cos2, e);
      };
      return c1 * ledger.record(tanh_sinh(inner, -detail::half_pi, u1, spec));
    };
    QuadResult r = ledger.finish(tanh_sinh(outer, -detail::half_pi, detail::half_pi, spec));
    r.value *= 2.0;
    r.error_bound *= 2.0;
    return r;
  };
  return detail::ratio(two(power), two(0));
}

/// The same moment for any k and even integer beta, computed exactly: the integrand
/// (sum x)^power prod (x_i - x_j)^beta is expanded into monomials, each of which
/// integrates to a product of 1-d Cauchy moments.
inline double hp_row_moment_expanded(int k, int beta, double tau, int power) {
  detail::require(k >= 1 && power >= 0, "hp_row_moment_expanded: need k >= 1, power >= 0");
  detail::require(beta >= 2 && beta % 2 == 0, "hp_row_moment_expanded: beta must be an even integer");
  using Poly = std::map<std::vector<int>, double>;
  auto multiply = [k](const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ea, ca] : a)
      for (const auto& [eb, cb] : b) {
        std::vector<int> e(k);
        for (int i = 0; i < k; ++i) e[i] = ea[i] + eb[i];
        r[e] += ca * cb;
      }
    return r;
  };
  auto power_of = [&](const Poly& base, int n) {
    Poly r{{std::vector<int>(k, 0), 1.0}};
    for (int i = 0; i < n; ++i) r = multiply(r, base);
    return r;
  };
  Poly vdm{{std::vector<int>(k, 0), 1.0}};
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      std::vector<int> ei(k, 0), ej(k, 0);
      ei[i] = 1, ej[j] = 1;
      vdm = multiply(vdm, power_of(Poly{{ei, 1.0}, {ej, -1.0}}, beta));
    }
  Poly sum;
  for (int i = 0; i < k; ++i) {
    std::vector<int> e(k, 0);
    e[i] = 1;
    sum[e] = 1.0;
  }
  const double c = 0.5 * beta * (k - 1) + 1.0 + tau;
  std::map<int, double> moment_cache;
  auto moment = [&](int n) {
    if (n % 2) return 0.0;
    auto it = moment_cache.find(n);
    if (it != moment_cache.end()) return it->second;
    if (!(c - 0.5 * (n + 1) > 0.0)) throw DomainError("hp_row_moment_expanded: moment diverges");
    const double v = std::exp(log_gamma(0.5 * (n + 1)) + log_gamma(c - 0.5 * (n + 1)) - log_gamma(c));
    return moment_cache[n] = v;
  };
  auto integrate_poly = [&](const Poly& p) {
    double acc = 0.0;
    for (const auto& [e, coef] : p) {
      double term = coef;
      for (int n : e) term *= moment(n);
      acc += term;
    }
    return acc;
  };
  return integrate_poly(multiply(vdm, power_of(sum, power))) / integrate_poly(vdm);
}

/// Inverse-Laguerre E[(x_1 + ... + x_N)^r] for N in {1, 2}, as a ratio of quadratures
/// of the unnormalised density (so no normalisation constant enters).
inline QuadResult inv_laguerre_moment(int n, double beta, double nu, int r, const QuadratureSpec& spec = {}) {
  detail::require(n == 1 || n == 2, "inv_laguerre_moment: N must be 1 or 2");
  detail::require(beta > 0.0 && nu > -1.0 && r >= 0, "inv_laguerre_moment: need beta > 0, nu > -1, r >= 0");
  if (!(nu > r - 1.0)) throw DomainError("inv_laguerre_moment: need nu > r - 1");
  const EnsembleSpec e = EnsembleSpec::inverse_laguerre(n, beta, nu);
  // density scaled by its value at the mode of the one-point weight, to keep magnitudes moderate
  const double mode = 2.0 / (nu + (n - 1) * beta + 2.0);
  const std::vector<double> at_mode(n, mode);
  const double shift = n == 1 ? log_density(e, at_mode) : 0.0;

  auto integral = [&](int p) -> QuadResult {
    if (n == 1) {
      auto f = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double pt[1] = {x};
        return std::pow(x, p) * std::exp(log_density(e, pt) - shift);
      };
      return exp_sinh(f, 0.0, spec);
    }
    detail::InnerLedger ledger;
    auto outer = [&](double a) {
      if (a <= 0.0) return 0.0;
      auto inner = [&](double b, double, double) {
        if (b <= 0.0) return 0.0;
        const double pt[2] = {a, b};
        return std::pow(a + b, p) * std::exp(log_density(e, pt));
      };
      return ledger.record(tanh_sinh(inner, 0.0, a, spec));
    };
    return ledger.finish(exp_sinh(outer, 0.0, spec));
  };
  return detail::ratio(integral(r), integral(0));
}

/// Total mass of Lambda^{(beta)}_{N+1,N}(y, .) for N in {1, 2}; the exact value is 1.
inline QuadResult da_normalization(double beta, std::span<const double> y, const QuadratureSpec& spec = {}) {
  detail::require(beta > 0.0, "da_normalization: beta must be positive");
  detail::require(y.size() == 2 || y.size() == 3, "da_normalization: y must have 2 or 3 points");
  detail::require_strictly_decreasing(y);
  const double e = 0.5 * beta - 1.0;
  const std::size_t n = y.size() - 1;
  double log_const = log_gamma(0.5 * beta * (n + 1)) - (n + 1) * log_gamma(0.5 * beta);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size(); ++j) log_const += (1.0 - beta) * std::log(y[i] - y[j]);
  const double k = std::exp(log_const);

  if (n == 1) {
    auto f = [&](double, double da, double db) { return std::pow(da * db, e); };
    QuadResult r = tanh_sinh(f, y[1], y[0], spec);
    r.value *= k;
    r.error_bound *= k;
    return r;
  }
  // x1 in (y2, y1), x2 in (y3, y2); x1 - x2 = (x1 - y2) + (y2 - x2)
  const double g12 = y[0] - y[1], g23 = y[1] - y[2];
  auto upper = [&](int m) {
    return tanh_sinh([&](double, double da, double db) { return std::pow(da, m + e) * std::pow(db, e) * std::pow(da + g23, e); },
                     y[1], y[0], spec);
  };
  auto lower = [&](int m) {
    return tanh_sinh([&](double, double da, double db) { return std::pow(db, m + e) * std::pow(da, e) * std::pow(db + g12, e); },
                     y[2], y[1], spec);
  };
  const QuadResult a0 = upper(0), a1 = upper(1), b0 = lower(0), b1 = lower(1);
  QuadResult r;
  r.value = k * (a1.value * b0.value + a0.value * b1.value);
  r.error_bound = k * (a1.error_bound * b0.value + a1.value * b0.error_bound + a0.error_bound * b1.value +
                       a0.value * b1.error_bound);
  r.evaluations = a0.evaluations + a1.evaluations + b0.evaluations + b1.evaluations;
  return r;
}

struct ConsistencyPoint {
  double x = 0.0;
  double pushed = 0.0;  // int mu_2(dy) Lambda(y, x)
  double direct = 0.0;  // one-point density
  double error_bound = 0.0;
};

struct ConsistencyReport {
  std::vector<ConsistencyPoint> points;
  double max_deviation = 0.0;
};

/// Compares the image of the two-point law under the Dixon-Anderson kernel with the
/// one-point law on a grid. `param` is tau (Hua-Pickrell) or nu (inverse Laguerre).
/// With w the one-point weight of the two-point law,
///   pushed(x) = 2 K / Z_2 * [U_1 L_0 + U_0 L_1],
///   U_m = int_0^inf t^{m + beta/2 - 1} w(x + t) dt,  L_m = int_0^{x - a} t^{m + beta/2 - 1} w(x - t) dt,
/// since (y1 - y2)^beta (y1 - y2)^{1 - beta} = (y1 - x) + (x - y2).
inline ConsistencyReport consistency_marginal(EnsembleKind kind, double beta, double param, std::span<const double> grid,
                                              const QuadratureSpec& spec = {}, int threads = 0) {
  detail::require(kind == EnsembleKind::hua_pickrell || kind == EnsembleKind::inverse_laguerre,
                  "consistency_marginal: kind must be Hua-Pickrell or inverse Laguerre");
  detail::require(beta > 0.0, "consistency_marginal: beta must be positive");
  const bool hp = kind == EnsembleKind::hua_pickrell;
  const EnsembleSpec two = hp ? EnsembleSpec::hua_pickrell(2, beta, param) : EnsembleSpec::inverse_laguerre(2, beta, param);
  const EnsembleSpec one = hp ? EnsembleSpec::hua_pickrell(1, beta, param) : EnsembleSpec::inverse_laguerre(1, beta, param);
  two.validate();
  const double e = 0.5 * beta - 1.0;
  // log of the one-point weight of the two-point law
  auto log_w = [&](double y) {
    if (hp) return -(param + 0.5 * beta + 1.0) * std::log1p(y * y);
    return -(param + beta + 2.0) * std::log(y) - 2.0 / y;
  };
  // log normalisation of the two-point density: log_density_normalized - log_density at any point
  const std::vector<double> probe{hp ? 0.5 : 1.5, hp ? -0.5 : 0.5};
  const double log_z2_inv = log_density_normalized(two, probe) - log_density(two, probe);
  const double log_k = log_gamma(beta) - 2.0 * log_gamma(0.5 * beta);

  ConsistencyReport rep;
  rep.points.resize(grid.size());
  detail::parallel_for(static_cast<int>(grid.size()), threads, [&](int idx) {
    const double x = grid[static_cast<std::size_t>(idx)];
    if (!hp && !(x > 0.0)) throw DomainError("consistency_marginal: inverse-Laguerre grid must be positive");
    auto up = [&](int m) {
      return exp_sinh([&](double t) { return t > 0.0 ? std::pow(t, m + e) * std::exp(log_w(x + t)) : 0.0; }, 0.0, spec);
    };
    auto low = [&](int m) {
      if (hp)
        return exp_sinh([&](double t) { return t > 0.0 ? std::pow(t, m + e) * std::exp(log_w(x - t)) : 0.0; }, 0.0, spec);
      // t in (0, x); y = x - t = db is exact
      return tanh_sinh([&](double, double da, double db) { return db > 0.0 ? std::pow(da, m + e) * std::exp(log_w(db)) : 0.0; },
                       0.0, x, spec);
    };
    const QuadResult u0 = up(0), u1 = up(1), l0 = low(0), l1 = low(1);
    const double scale = 2.0 * std::exp(log_k + log_z2_inv);
    ConsistencyPoint& pt = rep.points[static_cast<std::size_t>(idx)];
    pt.x = x;
    pt.pushed = scale * (u1.value * l0.value + u0.value * l1.value);
    pt.error_bound = scale * (u1.error_bound * l0.value + u1.value * l0.error_bound + u0.error_bound * l1.value +
                              u0.value * l1.error_bound);
    const double px[1] = {x};
    pt.direct = std::exp(log_density_normalized(one, px));
  });
  for (const auto& p : rep.points) rep.max_deviation = std::max(rep.max_deviation, std::abs(p.pushed - p.direct));
  return rep;
}

}  // namespace betamoments
