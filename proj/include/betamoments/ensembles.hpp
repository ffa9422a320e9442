#pragma once

// The four point ensembles (Hua-Pickrell, circular Jacobi, Laguerre and
// inverse Laguerre), the Dixon-Anderson corner kernel, and the samplers used
// by the Monte Carlo layer.
//
// Conventions:
//   * densities are symmetric and are evaluated on unordered points;
//     normalisation constants integrate over all of R^N (or [0, 2pi)^N, R_+^N);
//   * samplers return points sorted in decreasing order;
//   * interlacing rows are stored top-down as x^(1), ..., x^(N), each row
//     in decreasing order.

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "betamoments/errors.hpp"
#include "betamoments/specfun.hpp"

namespace betamoments {

enum class EnsembleKind { hua_pickrell, circular_jacobi, laguerre, inverse_laguerre };

inline const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::hua_pickrell: return "hua-pickrell";
    case EnsembleKind::circular_jacobi: return "circular-jacobi";
    case EnsembleKind::laguerre: return "laguerre";
    case EnsembleKind::inverse_laguerre: return "inverse-laguerre";
  }
  return "?";
}

inline std::optional<EnsembleKind> ensemble_kind_from_string(const std::string& s) {
  for (auto k : {EnsembleKind::hua_pickrell, EnsembleKind::circular_jacobi, EnsembleKind::laguerre,
                 EnsembleKind::inverse_laguerre})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

/// Tagged parameter record. Only the fields belonging to `kind` are meaningful:
/// tau for Hua-Pickrell, (delta, s) for circular Jacobi, nu for the Laguerre kinds.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::hua_pickrell;
  double beta = 2.0;
  int n = 1;
  cplx tau = 0.0;
  cplx delta = 0.0;
  double s = 0.0;
  double nu = 0.0;

  static EnsembleSpec hua_pickrell(int n, double beta, cplx tau) {
    EnsembleSpec e;
    e.kind = EnsembleKind::hua_pickrell;
    e.n = n, e.beta = beta, e.tau = tau;
    return e;
  }
  static EnsembleSpec circular_jacobi(int n, double beta, cplx delta, double s = 0.0) {
    EnsembleSpec e;
    e.kind = EnsembleKind::circular_jacobi;
    e.n = n, e.beta = beta, e.delta = delta, e.s = s;
    return e;
  }
  static EnsembleSpec laguerre(int n, double beta, double nu) {
    EnsembleSpec e;
    e.kind = EnsembleKind::laguerre;
    e.n = n, e.beta = beta, e.nu = nu;
    return e;
  }
  static EnsembleSpec inverse_laguerre(int n, double beta, double nu) {
    EnsembleSpec e;
    e.kind = EnsembleKind::inverse_laguerre;
    e.n = n, e.beta = beta, e.nu = nu;
    return e;
  }

  bool is_circular() const { return kind == EnsembleKind::circular_jacobi; }
  bool is_laguerre_kind() const { return kind == EnsembleKind::laguerre || kind == EnsembleKind::inverse_laguerre; }

  void validate() const {
    detail::require(beta > 0.0 && std::isfinite(beta), "beta must be positive");
    detail::require(n >= 1, "N must be positive");
    switch (kind) {
      case EnsembleKind::hua_pickrell:
        detail::require(tau.real() > -0.5, "Hua-Pickrell needs Re(tau) > -1/2");
        break;
      case EnsembleKind::circular_jacobi:
        detail::require(delta.real() > -0.5, "circular Jacobi needs Re(delta) > -1/2");
        detail::require(std::isfinite(s), "s must be finite");
        break;
      case EnsembleKind::laguerre:
      case EnsembleKind::inverse_laguerre:
        detail::require(nu > -1.0, "Laguerre kinds need nu > -1");
        break;
    }
  }

  /// -1/2 < h < Re(delta) + s + 1/2: the range where the circular joint moments are finite.
  bool joint_moment_window(double h) const { return h > -0.5 && h < delta.real() + s + 0.5; }

  bool operator==(const EnsembleSpec&) const = default;
};

// ---------------------------------------------------------------------------
// densities

namespace detail {

inline double log_2sin_half(double theta) { return std::log(std::abs(2.0 * std::sin(0.5 * theta))); }

inline double vandermonde_log(std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) acc += std::log(std::abs(x[i] - x[j]));
  return acc;
}

inline double circular_vandermonde_log(std::span<const double> t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) acc += log_2sin_half(t[i] - t[j]);
  return acc;
}

inline double hp_exponent(const EnsembleSpec& e) { return e.tau.real() + 0.5 * e.beta * (e.n - 1) + 1.0; }

inline double inverse_laguerre_exponent(const EnsembleSpec& e) { return e.nu + (e.n - 1) * e.beta + 2.0; }

}  // namespace detail

/// Unnormalised log-density at an unordered point.
///   Hua-Pickrell:    prod (1+x^2)^{-Re tau - beta(N-1)/2 - 1} e^{2 Im tau arctan x} |Delta(x)|^beta on R^N
///   circular Jacobi: prod |1-e^{i t}|^{2 Re delta} e^{Im delta (t - pi)} |Delta(e^{it})|^beta on [0, 2pi]^N
///   Laguerre:        prod x^nu e^{-x} |Delta(x)|^beta on R_+^N
///   inverse Laguerre: the image of Laguerre under x -> 2/x,
///                    prod x^{-nu-(N-1)beta-2} e^{-2/x} |Delta(x)|^beta
inline double log_density(const EnsembleSpec& e, std::span<const double> x) {
  e.validate();
  if (x.size() != static_cast<std::size_t>(e.n)) throw SupportError("log_density: point has wrong dimension");
  for (double v : x)
    if (!std::isfinite(v)) throw SupportError("log_density: non-finite coordinate");
  double acc = 0.0;
  switch (e.kind) {
    case EnsembleKind::hua_pickrell: {
      const double p = detail::hp_exponent(e);
      for (double v : x) acc += -p * std::log1p(v * v) + 2.0 * e.tau.imag() * std::atan(v);
      return acc + e.beta * detail::vandermonde_log(x);
    }
    case EnsembleKind::circular_jacobi: {
      for (double t : x) {
        if (t < 0.0 || t > 2.0 * std::numbers::pi) throw SupportError("log_density: angle outside [0, 2pi]");
        acc += 2.0 * e.delta.real() * detail::log_2sin_half(t) + e.delta.imag() * (t - std::numbers::pi);
      }
      return acc + e.beta * detail::circular_vandermonde_log(x);
    }
    case EnsembleKind::laguerre: {
      for (double v : x) {
        if (v <= 0.0) throw SupportError("log_density: Laguerre point must be positive");
        acc += e.nu * std::log(v) - v;
      }
      return acc + e.beta * detail::vandermonde_log(x);
    }
    case EnsembleKind::inverse_laguerre: {
      const double p = detail::inverse_laguerre_exponent(e);
      for (double v : x) {
        if (v <= 0.0) throw SupportError("log_density: inverse-Laguerre point must be positive");
        acc += -p * std::log(v) - 2.0 / v;
      }
      return acc + e.beta * detail::vandermonde_log(x);
    }
  }
  return acc;
}

/// log C_{N,beta}^{(tau)}: the integral of the Hua-Pickrell weight over R^N, real tau.
inline double hp_log_norm_const(int n, double beta, double tau) {
  detail::require(n >= 1 && beta > 0.0, "hp_log_norm_const: need N >= 1, beta > 0");
  detail::require(tau > -0.5, "hp_log_norm_const: need tau > -1/2");
  double acc = -(0.5 * beta * n * (n - 1) + 2.0 * n * tau) * std::numbers::ln2 + n * std::log(std::numbers::pi);
  for (int j = 0; j < n; ++j) {
    const double bj = 0.5 * beta * j;
    acc += log_gamma(bj + 2.0 * tau + 1.0) + log_gamma(0.5 * beta * (j + 1) + 1.0) -
           2.0 * log_gamma(bj + tau + 1.0) - log_gamma(0.5 * beta + 1.0);
  }
  return acc;
}

/// log l_{N,beta}^{(nu)}: the integral of the Laguerre weight over R_+^N.
inline double laguerre_log_norm_const(int n, double beta, double nu) {
  detail::require(n >= 1 && beta > 0.0 && nu > -1.0, "laguerre_log_norm_const: need N >= 1, beta > 0, nu > -1");
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    acc += log_gamma(nu + 1.0 + 0.5 * beta * j) + log_gamma(1.0 + 0.5 * beta * (j + 1)) - log_gamma(1.0 + 0.5 * beta);
  return acc;
}

/// log of the circular Jacobi normalisation (2pi)^N M_N(conj(delta), delta, beta/2).
inline double cjbe_log_norm_const(int n, double beta, cplx delta) {
  return n * std::log(2.0 * std::numbers::pi) + log_morris(n, std::conj(delta), delta, 0.5 * beta).real();
}

/// Normalised log-density. Hua-Pickrell requires real tau.
inline double log_density_normalized(const EnsembleSpec& e, std::span<const double> x) {
  const double u = log_density(e, x);
  switch (e.kind) {
    case EnsembleKind::hua_pickrell:
      detail::require(e.tau.imag() == 0.0, "normalised Hua-Pickrell density needs real tau");
      return u - hp_log_norm_const(e.n, e.beta, e.tau.real());
    case EnsembleKind::circular_jacobi:
      return u - cjbe_log_norm_const(e.n, e.beta, e.delta);
    case EnsembleKind::laguerre:
      return u - laguerre_log_norm_const(e.n, e.beta, e.nu);
    case EnsembleKind::inverse_laguerre:
      return u + (e.n * e.nu + 0.5 * e.beta * e.n * (e.n - 1) + e.n) * std::numbers::ln2 -
             laguerre_log_norm_const(e.n, e.beta, e.nu);
  }
  return u;
}

// ---------------------------------------------------------------------------
// Dixon-Anderson kernel

namespace detail {

inline void require_strictly_decreasing(std::span<const double> y) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i])) throw DomainError("Dixon-Anderson: non-finite coordinate");
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i - 1] > y[i])) throw DegenerateError("Dixon-Anderson: y must be strictly decreasing");
}

}  // namespace detail

/// log Lambda_{N+1,N}^{(beta)}(y, x). y has N+1 strictly decreasing entries, x has N.
/// Returns -inf when x does not interlace y. Boundary contact is only admitted
/// for beta >= 2, where the kernel stays bounded.
inline double da_kernel_log_density(double beta, std::span<const double> y, std::span<const double> x) {
  detail::require(beta > 0.0, "Dixon-Anderson: beta must be positive");
  detail::require(x.size() + 1 == y.size() && !x.empty(), "Dixon-Anderson: need |y| = |x| + 1 >= 2");
  detail::require_strictly_decreasing(y);
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::size_t n = x.size();
  bool boundary = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y[i] >= x[i] && x[i] >= y[i + 1])) return ninf;
    if (x[i] == y[i] || x[i] == y[i + 1]) boundary = true;
    if (i > 0 && !(x[i - 1] > x[i])) return ninf;
  }
  const double e = 0.5 * beta - 1.0;
  if (boundary) {
    if (e < 0.0) throw SupportError("Dixon-Anderson: boundary contact needs beta >= 2");
    if (e > 0.0) return ninf;
  }
  double acc = log_gamma(0.5 * beta * (n + 1)) - (n + 1) * log_gamma(0.5 * beta);
  acc += (1.0 - beta) * detail::vandermonde_log(y) + detail::vandermonde_log(x);
  if (e != 0.0)
    for (double xi : x)
      for (double yj : y) acc += e * std::log(std::abs(xi - yj));
  return acc;
}

// ---------------------------------------------------------------------------
// random streams

using Rng = std::mt19937_64;

/// Independent stream `stream` under master seed `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
  return Rng(seq);
}

/// A draw from Lambda^{(beta)}(y, .): with w ~ Dirichlet(beta/2, ..., beta/2) the N roots
/// of sum_j w_j / (y_j - t) lie one in each gap of y and have exactly this law.
inline std::vector<double> sample_da(double beta, std::span<const double> y, Rng& rng) {
  detail::require(beta > 0.0, "sample_da: beta must be positive");
  detail::require(y.size() >= 2, "sample_da: need at least two points in y");
  detail::require_strictly_decreasing(y);
  const std::size_t m = y.size();
  std::vector<double> w(m);
  boost::random::gamma_distribution<double> gam(0.5 * beta);
  double total = 0.0;
  for (auto& v : w) total += (v = gam(rng));
  for (auto& v : w) v /= total;

  std::vector<double> x(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double hi = y[i], lo = y[i + 1];
    // Secular function, increasing from -inf at lo to +inf at hi; only its sign is used.
    auto g = [&](double t) {
      if (t <= lo) return -1.0;
      if (t >= hi) return 1.0;
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += w[j] / (y[j] - t);
      return acc;
    };
    std::uintmax_t iters = 2200;
    auto r = boost::math::tools::bisect(g, lo, hi, boost::math::tools::eps_tolerance<double>(), iters);
    double t = 0.5 * (r.first + r.second);
    // keep strictly inside so that the row can seed the next step
    if (t <= lo) t = std::nextafter(lo, hi);
    if (t >= hi) t = std::nextafter(hi, lo);
    x[i] = t;
  }
  return x;
}

// ---------------------------------------------------------------------------
// tridiagonal Laguerre model

/// Eigenvalues (decreasing) of the bidiagonal chi model, halved so that the joint
/// law is prod x^nu e^{-x} |Delta|^beta.
inline std::vector<double> sample_laguerre_tridiag(int n, double beta, double nu, Rng& rng) {
  detail::require(n >= 1 && beta > 0.0 && nu > -1.0, "sample_laguerre_tridiag: need N >= 1, beta > 0, nu > -1");
  // chi^2_k / 2 ~ Gamma(k/2, 1)
  auto half_chi2 = [&](double dof) { return boost::random::gamma_distribution<double>(0.5 * dof)(rng); };
  std::vector<double> a2(n), b2(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) a2[i] = half_chi2(2.0 * nu + 2.0 + beta * (n - 1 - i));
  for (int i = 0; i + 1 < n; ++i) b2[i] = half_chi2(beta * (n - 1 - i));
  if (n == 1) return {a2[0]};
  // B B^T / 2 for lower bidiagonal B
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i) diag[i] = a2[i] + (i > 0 ? b2[i - 1] : 0.0);
  for (int i = 0; i + 1 < n; ++i) sub[i] = std::sqrt(a2[i] * b2[i]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (double& v : out) v = std::max(v, std::numeric_limits<double>::min());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Inverse-Laguerre draw: 2 / (Laguerre eigenvalues), decreasing.
inline std::vector<double> sample_inverse_laguerre(int n, double beta, double nu, Rng& rng) {
  auto lam = sample_laguerre_tridiag(n, beta, nu, rng);
  std::vector<double> x(lam.rbegin(), lam.rend());
  for (double& v : x) v = 2.0 / v;
  return x;
}

// ---------------------------------------------------------------------------
// random-walk Metropolis

struct ChainConfig {
  int burn_in = 2000;         // sweeps
  int samples = 10000;        // kept draws per chain
  int thin = 1;               // sweeps between kept draws
  double proposal_scale = 0.5;
  int chains = 4;
  std::uint64_t seed = 20240607;
  int threads = 0;            // 0: hardware concurrency

  void validate() const {
    detail::require(burn_in >= 0 && samples >= 1 && thin >= 1 && chains >= 1, "invalid chain configuration");
    detail::require(proposal_scale > 0.0, "proposal scale must be positive");
  }
};

struct ChainDiagnostics {
  double acceptance_rate = 0.0;           // pooled over chains, after burn-in
  std::vector<double> chain_acceptance;
  std::vector<double> tuned_scale;
  double split_rhat = 1.0;                // of the monitored statistic, see sample_mcmc
  bool converged = true;
  std::string warning;
};

/// Draws stored chain-major: draw d of chain c is point(c * per_chain + d).
struct SampleBatch {
  int dim = 0;
  int chains = 0;
  std::size_t per_chain = 0;
  std::vector<double> values;
  ChainDiagnostics diagnostics;

  std::size_t size() const { return static_cast<std::size_t>(chains) * per_chain; }
  std::span<const double> point(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Split-chain potential scale reduction of equally long traces.
inline double split_rhat(const std::vector<std::vector<double>>& traces) {
  std::vector<std::span<const double>> halves;
  for (const auto& t : traces) {
    const std::size_t h = t.size() / 2;
    if (h < 2) return std::numeric_limits<double>::quiet_NaN();
    halves.emplace_back(t.data(), h);
    halves.emplace_back(t.data() + h, h);
  }
  const double len = static_cast<double>(halves.front().size());
  std::vector<double> means, vars;
  for (auto h : halves) {
    const double m = std::accumulate(h.begin(), h.end(), 0.0) / len;
    double v = 0.0;
    for (double x : h) v += (x - m) * (x - m);
    means.push_back(m);
    vars.push_back(v / (len - 1.0));
  }
  const double k = static_cast<double>(halves.size());
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / k;
  double b = 0.0;
  for (double m : means) b += (m - grand) * (m - grand);
  b *= len / (k - 1.0);
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / k;
  if (w <= 0.0) return 1.0;
  return std::sqrt(((len - 1.0) / len * w + b / len) / w);
}

namespace detail {

// MCMC state coordinates: angles for the circular kinds (Hua-Pickrell via x = cot(t/2)),
// log-coordinates for the Laguerre kinds.
struct StateModel {
  EnsembleSpec spec;

  double single(double u) const {
    switch (spec.kind) {
      case EnsembleKind::hua_pickrell:
        return 2.0 * spec.tau.real() * log_2sin_half(u) + spec.tau.imag() * (std::numbers::pi - u);
      case EnsembleKind::circular_jacobi:
        return 2.0 * spec.delta.real() * log_2sin_half(u) + spec.delta.imag() * (u - std::numbers::pi);
      case EnsembleKind::laguerre:
        return (spec.nu + 1.0) * u - std::exp(u);
      case EnsembleKind::inverse_laguerre:
        return (1.0 - inverse_laguerre_exponent(spec)) * u - 2.0 * std::exp(-u);
    }
    return 0.0;
  }
  double pair(double u, double v) const {
    if (spec.is_laguerre_kind()) {
      const double hi = std::max(u, v), lo = std::min(u, v);
      return hi + std::log(-std::expm1(lo - hi));
    }
    return log_2sin_half(u - v);
  }
  bool periodic() const { return !spec.is_laguerre_kind(); }

  double output(double u) const {
    switch (spec.kind) {
      case EnsembleKind::hua_pickrell: return 1.0 / std::tan(0.5 * u);
      case EnsembleKind::circular_jacobi: return u;
      default: return std::exp(u);
    }
  }
  // bounded statistic used for split-R-hat
  double monitor(double u) const { return periodic() ? std::cos(u) : u; }

  std::vector<double> initial(Rng& rng) const {
    const int n = spec.n;
    std::vector<double> u(n);
    boost::random::uniform_real_distribution<double> jitter(-0.25, 0.25);
    for (int i = 0; i < n; ++i) {
      if (periodic()) {
        u[i] = 2.0 * std::numbers::pi * (i + 0.5 + jitter(rng)) / n;
      } else {
        const double lag = spec.nu + 1.0 + spec.beta * (i + 0.5 + jitter(rng));
        u[i] = spec.kind == EnsembleKind::laguerre ? std::log(lag) : std::log(2.0 / lag);
      }
    }
    return u;
  }
};

struct ChainOutput {
  std::vector<double> values;
  std::vector<double> monitor;
  double acceptance = 0.0;
  double scale = 0.0;
};

inline ChainOutput run_chain(const StateModel& model, const ChainConfig& cfg, int chain) {
  Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(chain));
  const int n = model.spec.n;
  const double beta = model.spec.beta;
  std::vector<double> u = model.initial(rng);
  boost::random::normal_distribution<double> normal;
  boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
  double scale = cfg.proposal_scale;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  auto local = [&](int i, double ui) {
    double acc = model.single(ui);
    for (int j = 0; j < n; ++j)
      if (j != i) acc += beta * model.pair(ui, u[j]);
    return acc;
  };
  long accepted = 0, proposed = 0;
  auto sweep = [&] {
    for (int i = 0; i < n; ++i) {
      double prop = u[i] + scale * normal(rng);
      if (model.periodic()) prop -= two_pi * std::floor(prop / two_pi);
      const double diff = local(i, prop) - local(i, u[i]);
      ++proposed;
      if (std::isfinite(diff) && (diff >= 0.0 || std::log(unif(rng)) < diff)) {
        u[i] = prop;
        ++accepted;
      }
    }
  };

  // Burn-in with scale adaptation towards the 30-45% acceptance band.
  constexpr int kWindow = 50;
  for (int s = 0; s < cfg.burn_in; ++s) {
    sweep();
    if ((s + 1) % kWindow == 0) {
      const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
      if (rate < 0.30) scale *= std::max(0.5, rate / 0.375);
      else if (rate > 0.45) scale *= std::min(2.0, rate / 0.375);
      if (model.periodic()) scale = std::min(scale, std::numbers::pi);
      accepted = proposed = 0;
    }
  }
  accepted = proposed = 0;

  ChainOutput out;
  out.values.reserve(static_cast<std::size_t>(cfg.samples) * n);
  out.monitor.reserve(cfg.samples);
  std::vector<double> pt(n);
  for (int d = 0; d < cfg.samples; ++d) {
    for (int t = 0; t < cfg.thin; ++t) sweep();
    double mon = 0.0;
    for (int i = 0; i < n; ++i) {
      pt[i] = model.output(u[i]);
      mon += model.monitor(u[i]);
    }
    std::sort(pt.begin(), pt.end(), std::greater<>());
    out.values.insert(out.values.end(), pt.begin(), pt.end());
    out.monitor.push_back(mon);
  }
  out.acceptance = static_cast<double>(accepted) / static_cast<double>(std::max(proposed, 1L));
  out.scale = scale;
  return out;
}

inline int resolve_threads(int requested, int work) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(t, 1, std::max(work, 1));
}

/// Runs f(i) for i in [0, count) on up to `threads` workers. Results must be written
/// to per-index slots, so the outcome does not depend on the thread count.
template <class F>
void parallel_for(int count, int threads, F&& f) {
  threads = resolve_threads(threads, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += threads) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Per-coordinate Gaussian random-walk Metropolis on the symmetric (unordered)
/// density, one independent stream per chain. Hua-Pickrell is run in the angle
/// variable t with x = cot(t/2), which turns the heavy-tailed weight into a
/// bounded one on the circle; the Laguerre kinds are run in log x.
/// split-R-hat monitors sum cos(t_i) (circular) or sum log x_i (Laguerre).
inline SampleBatch sample_mcmc(const EnsembleSpec& spec, const ChainConfig& cfg) {
  spec.validate();
  cfg.validate();
  const detail::StateModel model{spec};
  std::vector<detail::ChainOutput> outs(cfg.chains);
  detail::parallel_for(cfg.chains, cfg.threads, [&](int c) { outs[c] = detail::run_chain(model, cfg, c); });

  SampleBatch batch;
  batch.dim = spec.n;
  batch.chains = cfg.chains;
  batch.per_chain = static_cast<std::size_t>(cfg.samples);
  batch.values.reserve(batch.size() * spec.n);
  std::vector<std::vector<double>> traces;
  double acc = 0.0;
  for (auto& o : outs) {
    batch.values.insert(batch.values.end(), o.values.begin(), o.values.end());
    batch.diagnostics.chain_acceptance.push_back(o.acceptance);
    batch.diagnostics.tuned_scale.push_back(o.scale);
    acc += o.acceptance;
    traces.push_back(std::move(o.monitor));
  }
  auto& d = batch.diagnostics;
  d.acceptance_rate = acc / cfg.chains;
  d.split_rhat = split_rhat(traces);
  if (std::isfinite(d.split_rhat) && d.split_rhat > 1.05) {
    d.converged = false;
    d.warning = "split R-hat " + std::to_string(d.split_rhat) + " exceeds 1.05";
  } else if (d.acceptance_rate < 0.15 || d.acceptance_rate > 0.7) {
    d.converged = false;
    d.warning = "acceptance rate " + std::to_string(d.acceptance_rate) + " outside [0.15, 0.7]";
  }
  return batch;
}

// ---------------------------------------------------------------------------
// interlacing arrays

/// rows[k] is x^(k+1), with k+1 entries in decreasing order.
struct InterlacingArray {
  std::vector<std::vector<double>> rows;

  int depth() const { return static_cast<int>(rows.size()); }
  /// x^(k), 1-based.
  const std::vector<double>& row(int k) const { return rows.at(k - 1); }

  double row_sum(int k) const {
    const auto& r = row(k);
    return std::accumulate(r.begin(), r.end(), 0.0);
  }
  /// T_k = (sum of x^(k)) / k.
  double row_average(int k) const { return row_sum(k) / k; }

  /// d_1 = x^(1), d_{k+1} = sum x^(k+1) - sum x^(k).
  std::vector<double> diagonal() const {
    std::vector<double> d;
    double prev = 0.0;
    for (int k = 1; k <= depth(); ++k) {
      const double s = row_sum(k);
      d.push_back(s - prev);
      prev = s;
    }
    return d;
  }

  /// y_1 >= x_1 >= y_2 >= ... for every adjacent pair of rows.
  bool is_interlacing() const {
    for (int k = 1; k < depth(); ++k) {
      const auto& x = row(k);
      const auto& y = row(k + 1);
      if (x.size() != static_cast<std::size_t>(k) || y.size() != static_cast<std::size_t>(k + 1)) return false;
      for (int i = 0; i < k; ++i)
        if (!(y[i] >= x[i] && x[i] >= y[i + 1])) return false;
    }
    return true;
  }
};

/// Fills the lower rows below a given top row by repeated Dixon-Anderson steps.
inline InterlacingArray array_from_top_row(double beta, std::vector<double> top, Rng& rng) {
  InterlacingArray a;
  a.rows.resize(top.size());
  a.rows.back() = std::move(top);
  for (std::size_t k = a.rows.size() - 1; k > 0; --k) a.rows[k - 1] = sample_da(beta, a.rows[k], rng);
  return a;
}

/// Top rows for a batch of arrays of a consistent family: exact tridiagonal draws for
/// inverse Laguerre, thinned Metropolis draws for Hua-Pickrell.
inline std::vector<std::vector<double>> sample_top_rows(const EnsembleSpec& spec, int count, std::uint64_t seed,
                                                        int threads = 0) {
  spec.validate();
  detail::require(count >= 1, "sample_top_rows: count must be positive");
  std::vector<std::vector<double>> tops(count);
  if (spec.kind == EnsembleKind::inverse_laguerre) {
    Rng rng = make_stream(seed, 0x1a9);
    for (auto& t : tops) t = sample_inverse_laguerre(spec.n, spec.beta, spec.nu, rng);
  } else if (spec.kind == EnsembleKind::hua_pickrell) {
    ChainConfig cfg;
    cfg.seed = seed;
    cfg.chains = std::min(count, 8);
    cfg.samples = (count + cfg.chains - 1) / cfg.chains;
    cfg.thin = std::max(10, spec.n);
    cfg.threads = threads;
    auto batch = sample_mcmc(spec, cfg);
    for (int i = 0; i < count; ++i) {
      auto p = batch.point(static_cast<std::size_t>(i));
      tops[i].assign(p.begin(), p.end());
    }
  } else {
    throw DomainError("sample_top_rows: arrays need a consistent family (Hua-Pickrell or inverse Laguerre)");
  }
  return tops;
}

/// A batch of interlacing arrays of the given depth (spec.n is overridden by `depth`).
inline std::vector<InterlacingArray> sample_arrays(EnsembleSpec spec, int depth, int count, std::uint64_t seed,
                                                   int threads = 0) {
  detail::require(depth >= 1, "sample_arrays: depth must be positive");
  spec.n = depth;
  auto tops = sample_top_rows(spec, count, seed, threads);
  std::vector<InterlacingArray> arrays(count);
  // one stream per array keeps the result independent of the thread count
  detail::parallel_for(count, threads, [&](int i) {
    Rng rng = make_stream(seed, 0x100000000ull + static_cast<std::uint64_t>(i));
    arrays[i] = array_from_top_row(spec.beta, std::move(tops[i]), rng);
  });
  return arrays;
}

inline InterlacingArray sample_array(const EnsembleSpec& spec, int depth, std::uint64_t seed) {
  return std::move(sample_arrays(spec, depth, 1, seed, 1).front());
}

}  // namespace betamoments
