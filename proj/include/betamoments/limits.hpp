#pragma once

// Closed-form limits and finite-N moment formulas: moments of X_beta(tau),
// the h = 0 constant F_{beta,delta}(s,0), Forrester's partition sum, the
// moments connection, and the Laguerre / Jacobi inverse-moment sums.
//
// Partition sums are templates on the scalar type so that they can be run in
// exact rational arithmetic (boost::multiprecision::cpp_rational) as well as
// in double.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "betamoments/errors.hpp"
#include "betamoments/partitions.hpp"
#include "betamoments/specfun.hpp"

namespace betamoments {

/// Parameters (beta, delta, s, h) of the joint moments.
struct JointMomentParams {
  double beta = 2.0;
  cplx delta = 0.0;
  double s = 1.0;
  double h = 0.0;

  cplx tau() const { return delta + s; }

  /// The window on which the limit theorem is stated.
  bool in_theorem_window() const {
    return beta > 0.0 && delta.real() > -1.0 / 3.0 && s > -1.0 / 3.0 && s + delta.real() > 0.0 &&
           h >= 0.0 && h < s + delta.real() + 0.5;
  }
};

/// Which normalisation to use for the Laguerre partition sums.
enum class NormalizationMode { as_printed, oracle_calibrated };

inline const char* to_string(NormalizationMode m) {
  return m == NormalizationMode::as_printed ? "as-printed" : "oracle-calibrated";
}

/// prod over boxes of (a*coarm + c - coleg) / ((a*(arm+1) + leg) * (a*arm + leg + 1)).
/// With `with_numerator == false` the numerator is dropped.
template <class T>
T box_product(const Partition& kappa, const T& a, const T& c, bool with_numerator = true) {
  T r(1);
  for_each_box(kappa, [&](int, int, const BoxStats& b) {
    T den = (a * T(b.arm + 1) + T(b.leg)) * (a * T(b.arm) + T(b.leg + 1));
    T num = with_numerator ? T(a * T(b.coarm) + c - T(b.coleg)) : T(1);
    r *= num;
    r /= den;
  });
  return r;
}

namespace detail {

template <class T>
bool is_zero(const T& v) {
  return v == T(0);
}

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace detail

/// E[X_beta(tau)^{2h}] from the partition sum over |kappa| <= 2h.
template <class T>
T x_moment_limit(const T& beta, const T& tau, int h) {
  detail::require(beta > T(0), "x_moment_limit: beta must be positive");
  detail::require(h >= 0, "x_moment_limit: h must be a nonnegative integer");
  detail::require(T(2) * tau > T(2 * h - 1), "x_moment_limit: need tau > h - 1/2");
  const T alpha = beta / T(2);
  const T x = T(4) * tau / beta;
  T sum(0);
  for (const auto& kappa : enumerate_partitions(2 * h)) {
    const int w = kappa.weight();
    const T gp = gen_pochhammer(x, kappa, alpha);
    if (detail::is_zero(gp)) throw PoleError("x_moment_limit: generalised Pochhammer vanishes");
    T term = pochhammer(T(-2 * h), w);
    for (int i = 0; i < w; ++i) term *= T(2);
    term /= gp;
    term *= box_product(kappa, alpha, tau);
    sum += term;
  }
  return h % 2 == 0 ? sum : T(-sum);
}

inline double x_moment_limit(double beta, double tau, int h) { return x_moment_limit<double>(beta, tau, h); }

/// beta / ((2 tau - 1)(4 tau + beta)).
template <class T>
T x_second_moment_closed(const T& beta, const T& tau) {
  detail::require(beta > T(0), "x_second_moment_closed: beta must be positive");
  detail::require(T(2) * tau > T(1), "x_second_moment_closed: need tau > 1/2");
  return beta / ((T(2) * tau - T(1)) * (T(4) * tau + beta));
}

inline double x_second_moment_closed(double beta, double tau) {
  return x_second_moment_closed<double>(beta, tau);
}

/// The six Upsilon arguments of log F(s,0), with the sign of each term.
struct UpsilonTerm {
  cplx z;
  int sign;
};

/// Upsilon arguments reproducing the finite-N asymptotics and the Gamma product at delta = 0.
inline std::vector<UpsilonTerm> f0_upsilon_terms(double beta, cplx delta, double s) {
  const cplx db = std::conj(delta);
  const double c = 1.0 - 0.5 * beta;
  return {{c + delta, +1},         {c + delta + s, -1},      {c + db, +1},
          {c + delta + db, -1},    {c + db + s, -1},         {c + delta + db + 2.0 * s, +1}};
}

/// log F_{beta,delta}(s,0).
inline double log_f0_limit(double beta, cplx delta, double s, UpsilonMethod method = UpsilonMethod::gauss_kronrod) {
  detail::require(beta > 0.0, "f0_limit: beta must be positive");
  if (s == 0.0) return 0.0;
  cplx acc = 0.0;
  for (const auto& t : f0_upsilon_terms(beta, delta, s)) acc += double(t.sign) * upsilon(beta, t.z, method);
  return acc.real();
}

inline double f0_limit(double beta, cplx delta, double s, UpsilonMethod method = UpsilonMethod::gauss_kronrod) {
  return std::exp(log_f0_limit(beta, delta, s, method));
}

/// The literal form of the constant (arguments shifted by s/2 and s,
/// plus 2s(delta+conj delta)/beta). Kept for the diagnostic report only.
inline double log_f0_limit_as_printed(double beta, cplx delta, double s) {
  const cplx db = std::conj(delta);
  const double c = 1.0 - 0.5 * beta;
  const cplx e = 2.0 * s * (delta + db) / beta + upsilon(beta, c + delta) - upsilon(beta, c + delta + 0.5 * s) +
                 upsilon(beta, c + db) - upsilon(beta, c + delta + db) - upsilon(beta, c + db + 0.5 * s) +
                 upsilon(beta, c + delta + db + s);
  return e.real();
}

/// Exponent of N in F_{N,beta,delta}(s,0): (2 s^2 + 2 s (delta + conj delta)) / beta.
inline double log_n_coefficient(double beta, cplx delta, double s) {
  return (2.0 * s * s + 4.0 * s * delta.real()) / beta;
}

/// Exact finite-N F_{N,beta,delta}(s,0) from the Morris integral, in log form.
inline double log_cjbe_finite_f0(int n, double beta, cplx delta, double s) {
  const cplx db = std::conj(delta);
  const cplx v = log_morris(n, db + s, delta + s, 0.5 * beta) - log_morris(n, db, delta, 0.5 * beta);
  return v.real();
}

inline double cjbe_finite_f0(int n, double beta, cplx delta, double s) {
  return std::exp(log_cjbe_finite_f0(n, beta, delta, s));
}

/// Richardson extrapolation of values at N, 2N, 4N, ... assuming an error
/// expansion c1/N + c2/N^2 + ...
inline double richardson(std::span<const double> values) {
  detail::require(!values.empty(), "richardson: no values");
  std::vector<double> t(values.begin(), values.end());
  for (std::size_t level = 1; level < values.size(); ++level) {
    const double f = std::ldexp(1.0, static_cast<int>(level));
    for (std::size_t i = 0; i + level < values.size(); ++i) t[i] = (f * t[i + 1] - t[i]) / (f - 1.0);
  }
  return t.front();
}

/// Truncation report for the non-integer-h partition series.
struct SeriesResult {
  double value = 0.0;
  int max_weight = 0;
  double last_shell = 0.0;
};

/// F_{beta,0}(s,h) by Forrester's partition sum. s is a nonnegative integer;
/// -1/2 < h < s + 1/2 and h not a half-odd integer.
inline SeriesResult forrester_joint_moment_series(double beta, int s, double h) {
  detail::require(beta > 0.0, "forrester_joint_moment: beta must be positive");
  detail::require(s >= 0, "forrester_joint_moment: s must be a nonnegative integer");
  detail::require(h > -0.5 && h < s + 0.5, "forrester_joint_moment: need -1/2 < h < s + 1/2");
  const double frac = h - std::floor(h);
  if (std::abs(frac - 0.5) < 1e-12) throw PoleError("forrester_joint_moment: cos(pi h) vanishes");

  double log_pref = 0.0;
  for (int j = 1; j <= s; ++j) log_pref += std::lgamma(2.0 * j / beta) - std::lgamma(2.0 * (s + j) / beta);
  const double alpha = 0.5 * beta, x = 4.0 * s / beta;

  const bool integer_h = frac == 0.0;
  auto term = [&](const Partition& kappa) {
    // (-2h)_w 2^w / [x]_kappa, interleaved factor by factor to stay in range.
    double t = 1.0;
    int i = 0;
    for (int j = 0; j < kappa.num_parts(); ++j) {
      for (int c = 0; c < kappa.row_length(j); ++c, ++i) {
        const double g = x - j / alpha + c;
        if (g == 0.0) throw PoleError("forrester_joint_moment: generalised Pochhammer vanishes");
        t *= 2.0 * (-2.0 * h + i) / g;
      }
    }
    return t * box_product(kappa, alpha, double(s));
  };

  SeriesResult out;
  double sum = 0.0;
  if (integer_h) {
    const int hh = static_cast<int>(h);
    for (const auto& kappa : enumerate_partitions(2 * hh, s)) sum += term(kappa);
    out.max_weight = 2 * hh;
    const double sign = hh % 2 == 0 ? 1.0 : -1.0;  // 1/cos(pi h) at integer h
    out.value = std::exp(log_pref) * std::pow(2.0, -2.0 * h) * sign * sum;
    return out;
  }
  // Non-integer h: sum weight shells until two consecutive shells are negligible.
  constexpr int kMaxWeight = 160;
  int quiet = 0;
  for (int w = 0; w <= kMaxWeight; ++w) {
    double shell = 0.0;
    for (const auto& kappa : partitions_of_weight(w, s)) shell += term(kappa);
    sum += shell;
    out.max_weight = w;
    out.last_shell = shell;
    if (w > 2 * h + 2 && std::abs(shell) <= 1e-17 * std::abs(sum)) {
      if (++quiet == 2) break;
    } else {
      quiet = 0;
    }
  }
  if (quiet < 2) throw QuadratureError("forrester_joint_moment: partition series did not converge", std::abs(out.last_shell));
  out.value = std::exp(log_pref) * std::pow(2.0, -2.0 * h) / std::cos(std::numbers::pi * h) * sum;
  return out;
}

inline double forrester_joint_moment(double beta, int s, double h) {
  return forrester_joint_moment_series(beta, s, h).value;
}

/// F_{beta,delta}(s,h) = F(s,0) 2^{-2h} E[X_beta(s+delta)^{2h}] for integer h and real delta.
inline double f_limit(const JointMomentParams& p) {
  detail::require(p.delta.imag() == 0.0, "f_limit: delta must be real");
  detail::require(p.h >= 0.0 && p.h == std::floor(p.h), "f_limit: h must be a nonnegative integer");
  const int h = static_cast<int>(p.h);
  const double tau = p.s + p.delta.real();
  detail::require(tau > h - 0.5, "f_limit: need s + delta > h - 1/2");
  return f0_limit(p.beta, p.delta, p.s) * std::pow(2.0, -2.0 * h) * x_moment_limit(p.beta, tau, h);
}

/// (1/(2h)!) sum_{k=1}^{2h} (-1)^{2h-k} C(2h,k) finite_moments[k-1].
inline double moments_connection(int h, std::span<const double> finite_moments) {
  detail::require(h >= 0, "moments_connection: h must be nonnegative");
  if (h == 0) return 1.0;
  const int m = 2 * h;
  if (static_cast<int>(finite_moments.size()) != m)
    throw std::invalid_argument("moments_connection: need exactly 2h finite moments");
  double acc = 0.0, binom = 1.0;  // binom = C(m, k)
  for (int k = 1; k <= m; ++k) {
    binom = binom * (m - k + 1) / k;
    acc += ((m - k) % 2 == 0 ? 1.0 : -1.0) * binom * finite_moments[static_cast<std::size_t>(k - 1)];
  }
  return acc / detail::factorial(m);
}

namespace detail {

// prod_j Gamma(nu + c j + 1 - kappa_j) / Gamma(nu + c j + 1), j over 0-based rows.
template <class T>
T laguerre_gamma_ratio(const Partition& kappa, const T& nu, const T& c) {
  T r(1);
  for (int j = 0; j < kappa.num_parts(); ++j) {
    const int k = kappa.row_length(j);
    r /= pochhammer(T(nu + c * T(j) + T(1) - T(k)), k);
  }
  return r;
}

// The Laguerre partition sum. n == 0 means the N -> infinity limit (numerator dropped).
template <class T>
T laguerre_sum(const T& beta, const T& nu, int n, int r, NormalizationMode mode) {
  detail::require(beta > T(0), "laguerre: beta must be positive");
  detail::require(r >= 0, "laguerre: r must be a nonnegative integer");
  detail::require(nu > T(r - 1), "laguerre: need nu > r - 1");
  const T half = beta / T(2);
  const T jack = mode == NormalizationMode::as_printed ? half : T(T(2) / beta);
  T sum(0);
  for (const auto& kappa : partitions_of_weight(r))
    sum += box_product(kappa, jack, T(n), n > 0) * laguerre_gamma_ratio(kappa, nu, half);
  T pref(1);
  for (int k = 2; k <= r; ++k) pref *= T(k);
  const T per_power = mode == NormalizationMode::as_printed ? T(T(1) / beta) : T(T(4) / beta);
  for (int k = 0; k < r; ++k) pref *= per_power;
  return pref * sum;
}

}  // namespace detail

/// E[Y_beta(nu)^r].
template <class T>
T y_moment_limit(const T& beta, const T& nu, int r, NormalizationMode mode = NormalizationMode::oracle_calibrated) {
  return detail::laguerre_sum(beta, nu, 0, r, mode);
}

inline double y_moment_limit(double beta, double nu, int r,
                             NormalizationMode mode = NormalizationMode::oracle_calibrated) {
  return y_moment_limit<double>(beta, nu, r, mode);
}

/// Inverse-Laguerre E[(x_1 + ... + x_N)^r].
template <class T>
T laguerre_finite_moment(const T& beta, const T& nu, int n, int r,
                         NormalizationMode mode = NormalizationMode::oracle_calibrated) {
  detail::require(n >= 1, "laguerre_finite_moment: N must be positive");
  return detail::laguerre_sum(beta, nu, n, r, mode);
}

inline double laguerre_finite_moment(double beta, double nu, int n, int r,
                                     NormalizationMode mode = NormalizationMode::oracle_calibrated) {
  return laguerre_finite_moment<double>(beta, nu, n, r, mode);
}

/// Jacobi-ensemble E[(sum 1/x_i)^r] with weight x^nu (1-x)^mu, in the beta/2 box convention.
template <class T>
T jacobi_inverse_moment(const T& beta, const T& nu, const T& mu, int n, int r) {
  detail::require(beta > T(0), "jacobi_inverse_moment: beta must be positive");
  detail::require(n >= 1 && r >= 0, "jacobi_inverse_moment: need N >= 1 and r >= 0");
  detail::require(nu > T(r - 1), "jacobi_inverse_moment: need nu > r - 1");
  detail::require(mu > T(-1), "jacobi_inverse_moment: need mu > -1");
  const T half = beta / T(2);
  T sum(0);
  for (const auto& kappa : partitions_of_weight(r)) {
    T term = box_product(kappa, half, T(n)) * detail::laguerre_gamma_ratio(kappa, nu, half);
    for (int j = 0; j < kappa.num_parts(); ++j) {
      const int k = kappa.row_length(j);
      term *= pochhammer(T(nu + mu + half * T(n + j - 1) + T(2) - T(k)), k);
    }
    sum += term;
  }
  T pref(1);
  for (int k = 2; k <= r; ++k) pref *= T(k);
  for (int k = 0; k < r; ++k) pref *= T(2) / beta;
  return pref * sum;
}

inline double jacobi_inverse_moment(double beta, double nu, double mu, int n, int r) {
  return jacobi_inverse_moment<double>(beta, nu, mu, n, r);
}

}  // namespace betamoments
