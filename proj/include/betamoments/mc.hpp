#pragma once

// Monte Carlo estimators with standard errors for the finite-N quantities
// whose limits are given in limits.hpp, plus the exchangeability and
// backward-martingale checks on interlacing arrays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betamoments/ensembles.hpp"
#include "betamoments/errors.hpp"
#include "betamoments/limits.hpp"
#include "betamoments/stats.hpp"

namespace betamoments {

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  EnsembleSpec spec;
  double effective_fraction = 1.0;  // importance-sampling ESS / n, 1 when unweighted
  bool exploratory = false;         // outside the window where the limit theorem is proved
  std::string warning;
};

// ---------------------------------------------------------------------------
// characteristic polynomial at the origin

/// |Psi(0)| = prod 2 |sin(t_j / 2)|, in log form.
inline double log_abs_psi(std::span<const double> theta) {
  double acc = 0.0;
  for (double t : theta) acc += std::log(std::abs(2.0 * std::sin(0.5 * t)));
  return acc;
}

inline double abs_psi(std::span<const double> theta) { return std::exp(log_abs_psi(theta)); }

/// Psi'(0) / Psi(0) = -(1/2) sum cot(t_j / 2).
inline double psi_log_derivative(std::span<const double> theta) {
  double acc = 0.0;
  for (double t : theta) acc += std::cos(0.5 * t) / std::sin(0.5 * t);
  return -0.5 * acc;
}

namespace detail {

// |v|^{2h} in log space; 0^0 = 1.
inline double abs_pow(double v, double two_h) {
  if (two_h == 0.0) return 1.0;
  if (v == 0.0) return 0.0;
  return std::exp(two_h * std::log(std::abs(v)));
}

// Batches never straddle chains when per_chain is a multiple of the batch count.
inline std::size_t batch_count(const SampleBatch& b) {
  return static_cast<std::size_t>(b.chains) * std::min<std::size_t>(32, std::max<std::size_t>(b.per_chain / 50, 1));
}

inline void require_real_tau(const EnsembleSpec& spec) {
  detail::require(spec.kind == EnsembleKind::hua_pickrell, "expected a Hua-Pickrell spec");
  detail::require(spec.tau.imag() == 0.0, "Monte Carlo trace moments need real tau");
}

}  // namespace detail

/// N^{-2h} E_{N,beta}^{(tau)}[|x_1 + ... + x_N|^{2h}] from Metropolis draws.
inline MomentEstimate estimate_trace_moment(const EnsembleSpec& spec, double h, const ChainConfig& cfg) {
  detail::require_real_tau(spec);
  spec.validate();
  if (!(h >= 0.0 && h < spec.tau.real() + 0.5)) throw DomainError("estimate_trace_moment: need 0 <= h < Re(tau) + 1/2");
  MomentEstimate est;
  est.spec = spec;
  est.seed = cfg.seed;
  if (h == 0.0) {
    est.value = 1.0;
    est.n_samples = static_cast<std::size_t>(cfg.samples) * cfg.chains;
    return est;
  }
  const SampleBatch batch = sample_mcmc(spec, cfg);
  std::vector<double> vals(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto p = batch.point(i);
    vals[i] = detail::abs_pow(std::accumulate(p.begin(), p.end(), 0.0) / spec.n, 2.0 * h);
  }
  const MeanEstimate m = batch_means(vals, detail::batch_count(batch));
  est.value = m.mean;
  est.std_error = m.std_error;
  est.n_samples = m.n;
  est.warning = batch.diagnostics.warning;
  return est;
}

/// F_{N,beta,delta}(s,h) / F_{N,beta,delta}(s,0) for real delta, as the self-normalised
/// average of |Psi'(0)/Psi(0)|^{2h} under CJbetaE_{N,delta} reweighted by |Psi(0)|^{2s}.
/// If the importance weights degenerate (effective sample size below 10%), the chain is
/// rerun directly on the tilted density CJbetaE_{N,delta+s}. Multiply by
/// cjbe_finite_f0(N, beta, delta, s) for F(s,h) itself.
inline MomentEstimate estimate_joint_moment_cjbe(int n, double beta, double delta, double s, double h,
                                                 const ChainConfig& cfg) {
  const EnsembleSpec spec = EnsembleSpec::circular_jacobi(n, beta, delta, s);
  spec.validate();
  if (!spec.joint_moment_window(h)) throw DomainError("estimate_joint_moment_cjbe: need -1/2 < h < delta + s + 1/2");
  MomentEstimate est;
  est.spec = spec;
  est.seed = cfg.seed;
  JointMomentParams jp{beta, delta, s, h};
  est.exploratory = !jp.in_theorem_window();

  const SampleBatch batch = sample_mcmc(spec, cfg);
  const std::size_t m = batch.size();
  std::vector<double> logw(m), g(m);
  for (std::size_t i = 0; i < m; ++i) {
    logw[i] = 2.0 * s * log_abs_psi(batch.point(i));
    g[i] = detail::abs_pow(psi_log_derivative(batch.point(i)), 2.0 * h);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(m);
  double sw = 0.0, sw2 = 0.0, swg = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = std::exp(logw[i] - top);
    sw += w[i];
    sw2 += w[i] * w[i];
    swg += w[i] * g[i];
  }
  est.effective_fraction = sw * sw / sw2 / static_cast<double>(m);
  est.warning = batch.diagnostics.warning;

  if (est.effective_fraction < 0.1) {
    // fall back to direct sampling of the tilted law
    est.warning = "importance weights degenerate (ESS " + std::to_string(est.effective_fraction) +
                  "); sampled CJbetaE at delta + s directly";
    const SampleBatch tilted = sample_mcmc(EnsembleSpec::circular_jacobi(n, beta, delta + s), cfg);
    std::vector<double> gv(tilted.size());
    for (std::size_t i = 0; i < tilted.size(); ++i)
      gv[i] = detail::abs_pow(psi_log_derivative(tilted.point(i)), 2.0 * h);
    const MeanEstimate me = batch_means(gv, detail::batch_count(tilted));
    est.value = me.mean;
    est.std_error = me.std_error;
    est.n_samples = me.n;
    return est;
  }
  // ratio estimator; standard error by the delta method on batch means
  const double r = swg / sw;
  const double wbar = sw / static_cast<double>(m);
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = w[i] * (g[i] - r) / wbar;
  est.value = r;
  est.std_error = batch_means(z, detail::batch_count(batch)).std_error;
  est.n_samples = m;
  return est;
}

/// N^{-r} G_{N,beta}(nu, r) with G = E[(sum 1/lambda_i)^r] under the Laguerre law,
/// from independent tridiagonal draws.
inline MomentEstimate estimate_g_laguerre(int n, double beta, double nu, double r, std::size_t samples,
                                          std::uint64_t seed) {
  const EnsembleSpec spec = EnsembleSpec::laguerre(n, beta, nu);
  spec.validate();
  if (!(r >= 0.0 && r < nu + 1.0)) throw DomainError("estimate_g_laguerre: need 0 <= r < nu + 1");
  detail::require(samples >= 2, "estimate_g_laguerre: need at least two samples");
  MomentEstimate est;
  est.spec = spec;
  est.seed = seed;
  est.n_samples = samples;
  if (r == 0.0) {
    est.value = 1.0;
    return est;
  }
  Rng rng = make_stream(seed, 0);
  std::vector<double> v(samples);
  for (auto& x : v) {
    double acc = 0.0;
    for (double l : sample_laguerre_tridiag(n, beta, nu, rng)) acc += 1.0 / l;
    x = detail::abs_pow(acc / n, r);
  }
  const MeanEstimate m = batch_means(v, samples);
  est.value = m.mean;
  est.std_error = m.std_error;
  return est;
}

// ---------------------------------------------------------------------------
// interlacing-array suites

struct KsCheck {
  std::string label;
  double paired_statistic = 0.0;  // on the same arrays; exactly 0 for the identity
  double statistic = 0.0;         // split-sample statistic used for the p-value
  double p_value = 1.0;
};

struct ExchangeabilityReport {
  int k = 0;
  std::size_t arrays = 0;
  std::vector<KsCheck> checks;

  bool passes(double level = 0.01) const {
    return std::all_of(checks.begin(), checks.end(), [&](const KsCheck& c) { return c.p_value > level; });
  }
};

namespace detail {

inline std::vector<std::vector<double>> diagonals(std::span<const InterlacingArray> arrays, int k) {
  std::vector<std::vector<double>> d;
  d.reserve(arrays.size());
  for (const auto& a : arrays) {
    detail::require(a.depth() >= k, "exchangeability: arrays too shallow");
    auto full = a.diagonal();
    full.resize(static_cast<std::size_t>(k));
    d.push_back(std::move(full));
  }
  return d;
}

// Projection phi(d_sigma) with phi = first coordinate (marginal) or sum_i (i+1) d_i (joint).
inline double project(const std::vector<double>& d, std::span<const int> sigma, bool joint) {
  if (!joint) return d[static_cast<std::size_t>(sigma[0])];
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) acc += static_cast<double>(i + 1) * d[static_cast<std::size_t>(sigma[i])];
  return acc;
}

inline KsCheck permutation_check(const std::vector<std::vector<double>>& d, std::span<const int> sigma, bool joint,
                                 std::string label) {
  const std::vector<int> id = [&] {
    std::vector<int> v(sigma.size());
    std::iota(v.begin(), v.end(), 0);
    return v;
  }();
  std::vector<double> a, b, sa, sb;
  for (std::size_t i = 0; i < d.size(); ++i) {
    a.push_back(project(d[i], sigma, joint));
    b.push_back(project(d[i], id, joint));
    // independent halves for the p-value: permuted law on even arrays, original on odd
    (i % 2 == 0 ? sa : sb).push_back(i % 2 == 0 ? a.back() : b.back());
  }
  KsCheck c;
  c.label = std::move(label);
  c.paired_statistic = ks_two_sample(a, b).statistic;
  const KsResult split = ks_two_sample(sa, sb);
  c.statistic = split.statistic;
  c.p_value = split.p_value;
  return c;
}

}  // namespace detail

/// Two-sample KS checks of (d_sigma(1), ..., d_sigma(k)) against (d_1, ..., d_k).
/// For each j in 2..k, sigma = transposition (1 j) is tested through the marginal
/// d_j vs d_1 and through the joint projection sum_i i d_sigma(i). Extra random
/// permutations are added when `random_permutations` > 0. p-values come from
/// disjoint halves of the batch, so the two samples in each test are independent.
inline ExchangeabilityReport exchangeability_test(std::span<const InterlacingArray> arrays, int k, Rng& rng,
                                                  int random_permutations = 0) {
  detail::require(k >= 2, "exchangeability_test: k must be at least 2");
  if (arrays.size() < 100) throw DomainError("exchangeability_test: need at least 100 arrays");
  const auto d = detail::diagonals(arrays, k);
  ExchangeabilityReport rep;
  rep.k = k;
  rep.arrays = arrays.size();
  for (int j = 1; j < k; ++j) {
    std::vector<int> sigma(static_cast<std::size_t>(k));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::swap(sigma[0], sigma[static_cast<std::size_t>(j)]);
    const std::string name = "(1 " + std::to_string(j + 1) + ")";
    rep.checks.push_back(detail::permutation_check(d, sigma, false, "marginal d_" + std::to_string(j + 1) + " vs d_1"));
    rep.checks.push_back(detail::permutation_check(d, sigma, true, "joint " + name));
  }
  for (int r = 0; r < random_permutations; ++r) {
    std::vector<int> sigma(static_cast<std::size_t>(k));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    std::string name = "joint (";
    for (std::size_t i = 0; i < sigma.size(); ++i) name += std::to_string(sigma[i] + 1) + (i + 1 == sigma.size() ? ")" : " ");
    rep.checks.push_back(detail::permutation_check(d, sigma, true, name));
  }
  return rep;
}

/// Paired-sample KS statistic of the joint projection for an explicit permutation (0-based).
inline double exchangeability_statistic(std::span<const InterlacingArray> arrays, std::span<const int> sigma) {
  const auto d = detail::diagonals(arrays, static_cast<int>(sigma.size()));
  return detail::permutation_check(d, sigma, true, "").paired_statistic;
}

struct MartingaleRow {
  int n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;
  double diff_from_first = 0.0;     // mean of T_N - T_{N_1}, paired over arrays
  double diff_std_error = 0.0;
};

struct MartingaleReport {
  std::vector<MartingaleRow> rows;
  bool constant_mean = true;        // every paired difference within 3 standard errors
  bool matches_expected = true;     // every mean within 3 standard errors of `expected_mean`
  bool variance_nonincreasing = true;
  // mean square of successive increments T_{N_{i+1}} - T_{N_i} along each path
  std::vector<double> increment_mean_square;
};

/// Mean and variance of the row averages T_N over a batch of arrays for each N in n_list.
inline MartingaleReport martingale_check(std::span<const InterlacingArray> arrays, std::span<const int> n_list,
                                         std::optional<double> expected_mean = std::nullopt) {
  detail::require(!n_list.empty() && arrays.size() >= 2, "martingale_check: need N values and at least two arrays");
  const std::size_t m = arrays.size();
  std::vector<std::vector<double>> t(n_list.size(), std::vector<double>(m));
  for (std::size_t c = 0; c < n_list.size(); ++c) {
    detail::require(n_list[c] >= 1, "martingale_check: N must be positive");
    for (std::size_t i = 0; i < m; ++i) {
      detail::require(arrays[i].depth() >= n_list[c], "martingale_check: arrays too shallow");
      t[c][i] = arrays[i].row_average(n_list[c]);
    }
  }
  MartingaleReport rep;
  for (std::size_t c = 0; c < n_list.size(); ++c) {
    MartingaleRow row;
    row.n = n_list[c];
    const MeanEstimate me = batch_means(t[c], m);
    row.mean = me.mean;
    row.std_error = me.std_error;
    double ss = 0.0;
    for (double v : t[c]) ss += (v - me.mean) * (v - me.mean);
    row.variance = ss / static_cast<double>(m - 1);
    std::vector<double> diff(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = t[c][i] - t[0][i];
    const MeanEstimate md = batch_means(diff, m);
    row.diff_from_first = md.mean;
    row.diff_std_error = md.std_error;
    if (c > 0 && std::abs(md.mean) > 3.0 * md.std_error) rep.constant_mean = false;
    if (expected_mean && std::abs(me.mean - *expected_mean) > 3.0 * me.std_error) rep.matches_expected = false;
    rep.rows.push_back(row);
  }
  for (std::size_t c = 1; c < n_list.size(); ++c) {
    double ms = 0.0;
    for (std::size_t i = 0; i < m; ++i) ms += (t[c][i] - t[c - 1][i]) * (t[c][i] - t[c - 1][i]);
    rep.increment_mean_square.push_back(ms / static_cast<double>(m));
    // Var(T_N) is non-increasing in N for a backward martingale; allow sampling noise
    // of the order of the paired increment spread.
    const double noise = 3.0 * std::sqrt(2.0 * rep.rows[c - 1].variance * rep.rows[c - 1].variance / static_cast<double>(m - 1)) +
                         3.0 * std::sqrt(rep.increment_mean_square.back() / static_cast<double>(m));
    if (rep.rows[c].variance > rep.rows[c - 1].variance + noise) rep.variance_nonincreasing = false;
  }
  return rep;
}

}  // namespace betamoments
