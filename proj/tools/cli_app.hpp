#pragma once

// Command-line front end. run() is separate from main() so the tests can drive it.
// Exit codes: 0 success, 1 verification failure, 2 usage, 3 numerical domain.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "betamoments/verify.hpp"

namespace betamoments::cli {

enum ExitCode { ok = 0, verification_failed = 1, usage = 2, domain = 3 };

struct Outcome {
  json spec = json::object();
  json result = json::object();
  json diagnostics = json::object();
  std::string text;
  std::vector<std::string> header;  // optional table for csv output
  std::vector<std::vector<double>> rows;
  int exit_code = ok;
};

struct Options {
  std::uint64_t seed = 20240607;
  int threads = 0;
  std::string output;
  std::string format = "text";

  double beta = 2.0, tau = 1.0, delta = 0.0, im = 0.0, s = 1.0, h = 0.0, nu = 2.0, mu = 0.0;
  int n = 1, r = 1, k = 1, power = 2, m = 0, h_int = 0, s_int = 1;
  std::string mode = "calibrated";
  bool as_printed = false;
  std::vector<double> y;

  int samples = 10000, burn_in = 2000, thin = 1, chains = 4, count = 1000, depth = 5;
  double proposal_scale = 0.5;
  bool inverse = false;
  std::string kind = "hua-pickrell";

  double from = -3.0, to = 3.0;
  int points = 21;
  bool slow = false, quick = false;
};

namespace detail {

inline NormalizationMode parse_mode(const std::string& m) {
  if (m == "calibrated") return NormalizationMode::oracle_calibrated;
  if (m == "as-printed") return NormalizationMode::as_printed;
  throw std::invalid_argument("--mode must be calibrated or as-printed");
}

inline ChainConfig chain_config(const Options& o) {
  ChainConfig c;
  c.samples = o.samples;
  c.burn_in = o.burn_in;
  c.thin = o.thin;
  c.chains = o.chains;
  c.proposal_scale = o.proposal_scale;
  c.seed = o.seed;
  c.threads = o.threads;
  c.validate();
  return c;
}

inline json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline Outcome scalar(json spec, const std::string& name, double value) {
  Outcome out;
  out.spec = std::move(spec);
  out.result = {{name, value}};
  out.text = format_double(value);
  return out;
}

inline Outcome quad(json spec, const QuadResult& q) {
  Outcome out;
  out.spec = std::move(spec);
  out.result = q;
  out.text = format_double(q.value) + " +/- " + betamoments::detail::sci(q.error_bound);
  return out;
}

inline Outcome batch_outcome(const EnsembleSpec& spec, const SampleBatch& b, const ChainConfig& cfg) {
  Outcome out;
  out.spec = spec;
  out.diagnostics = b.diagnostics;
  out.header = {"chain", "draw"};
  for (int i = 1; i <= b.dim; ++i) out.header.push_back("x" + std::to_string(i));
  double trace = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::vector<double> row{double(i / b.per_chain), double(i % b.per_chain)};
    const auto p = b.point(i);
    row.insert(row.end(), p.begin(), p.end());
    for (double v : p) trace += v;
    out.rows.push_back(std::move(row));
  }
  out.result = {{"draws", b.size()}, {"config", cfg}, {"mean_row_average", trace / double(b.size()) / b.dim}};
  std::ostringstream t;
  t << b.size() << " draws, mean row average " << format_double(out.result["mean_row_average"].get<double>())
    << ", acceptance " << b.diagnostics.acceptance_rate << ", split R-hat " << b.diagnostics.split_rhat;
  if (!b.diagnostics.warning.empty()) t << "\nwarning: " << b.diagnostics.warning;
  out.text = t.str();
  return out;
}

inline Outcome iid_outcome(json spec, std::vector<std::vector<double>> draws, int dim) {
  Outcome out;
  out.spec = std::move(spec);
  out.header = {"draw"};
  for (int i = 1; i <= dim; ++i) out.header.push_back("x" + std::to_string(i));
  double trace = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    std::vector<double> row{double(i)};
    row.insert(row.end(), draws[i].begin(), draws[i].end());
    for (double v : draws[i]) trace += v;
    out.rows.push_back(std::move(row));
  }
  out.result = {{"draws", draws.size()}, {"mean_row_average", trace / double(draws.size()) / dim}};
  out.text = std::to_string(draws.size()) + " draws, mean row average " +
             format_double(out.result["mean_row_average"].get<double>());
  return out;
}

inline void emit(const Outcome& o, const Options& opt, const std::string& command, std::ostream& out) {
  json report = make_report(o.spec, o.result, o.diagnostics, opt.seed);
  report["command"] = command;
  auto sink = [&](const std::function<void(std::ostream&)>& write) {
    if (opt.output.empty()) return write(out);
    std::ofstream f(opt.output);
    if (!f) throw std::invalid_argument("cannot open output file " + opt.output);
    write(f);
  };
  if (opt.format == "json") {
    sink([&](std::ostream& s) { s << report.dump(2) << '\n'; });
    return;
  }
  if (opt.format == "csv") {
    sink([&](std::ostream& s) {
      if (!o.header.empty()) return write_csv(s, o.header, o.rows);
      std::vector<std::string> names;
      std::vector<double> values;
      for (const auto& [key, v] : o.result.items())
        if (v.is_number()) names.push_back(key), values.push_back(v.get<double>());
      write_csv(s, names, {values});
    });
    if (!opt.output.empty()) {
      std::ofstream side(opt.output + ".json");
      side << report.dump(2) << '\n';
    }
    return;
  }
  out << "# betamoments " << kVersion << " seed=" << opt.seed << " " << command << '\n';
  if (!opt.output.empty()) {
    std::ofstream f(opt.output);
    if (!f) throw std::invalid_argument("cannot open output file " + opt.output);
    f << report.dump(2) << '\n';
  }
  out << o.text << '\n';
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Moments of beta ensembles: limit formulas, finite-N values, samplers and oracles"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads, 0 = machine parallelism")->capture_default_str();
  app.add_option("-o,--output", o.output, "write the result to this file");
  app.add_option("--format", o.format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();

  std::vector<std::pair<CLI::App*, std::function<Outcome()>>> leaves;
  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help, std::function<Outcome()> f) {
    CLI::App* sub = group->add_subcommand(name, help);
    leaves.emplace_back(sub, std::move(f));
    return sub;
  };
  auto beta = [&](CLI::App* a) { a->add_option("--beta", o.beta, "Dyson index")->required(); };
  auto tau = [&](CLI::App* a) {
    a->add_option("--tau,--re", o.tau, "Re(tau)")->required();
    a->add_option("--im", o.im, "Im(tau)");
  };
  auto delta = [&](CLI::App* a) {
    a->add_option("--delta,--re", o.delta, "Re(delta)")->required();
    a->add_option("--im", o.im, "Im(delta)");
  };
  auto chain = [&](CLI::App* a) {
    a->add_option("--samples", o.samples, "kept draws per chain")->capture_default_str();
    a->add_option("--burn-in", o.burn_in, "burn-in sweeps")->capture_default_str();
    a->add_option("--thin", o.thin, "sweeps between kept draws")->capture_default_str();
    a->add_option("--chains", o.chains, "independent chains")->capture_default_str();
    a->add_option("--proposal-scale", o.proposal_scale, "initial random-walk scale")->capture_default_str();
  };

  // limits
  auto* limits = app.add_subcommand("limits", "N -> infinity formulas");
  limits->require_subcommand(1);
  auto* s = leaf(limits, "x-moment", "E[X^{2h}] for the Hua-Pickrell limit", [&] {
    return detail::scalar({{"beta", o.beta}, {"tau", o.tau}, {"h", o.h_int}}, "value", x_moment_limit(o.beta, o.tau, o.h_int));
  });
  beta(s);
  s->add_option("--tau", o.tau, "tau")->required();
  s->add_option("--h", o.h_int, "nonnegative integer h")->required();
  s = leaf(limits, "second-moment", "closed-form E[X^2]", [&] {
    return detail::scalar({{"beta", o.beta}, {"tau", o.tau}}, "value", x_second_moment_closed(o.beta, o.tau));
  });
  beta(s);
  s->add_option("--tau", o.tau, "tau")->required();
  s = leaf(limits, "f0", "the constant in F(s,0) ~ f0 N^{2s^2/beta}", [&] {
    const cplx d(o.delta, o.im);
    const double v = o.as_printed ? std::exp(log_f0_limit_as_printed(o.beta, d, o.s)) : f0_limit(o.beta, d, o.s);
    return detail::scalar({{"beta", o.beta}, {"delta", detail::cjson(d)}, {"s", o.s}, {"as_printed", o.as_printed}},
                          "value", v);
  });
  beta(s);
  delta(s);
  s->add_option("--s", o.s, "s")->required();
  s->add_flag("--as-printed", o.as_printed, "use the literal constant (diagnostic)");
  s = leaf(limits, "forrester", "F(s,h) by the partition sum, integer s", [&] {
    return detail::scalar({{"beta", o.beta}, {"s", o.s_int}, {"h", o.h}}, "value",
                          forrester_joint_moment(o.beta, o.s_int, o.h));
  });
  beta(s);
  s->add_option("--s", o.s_int, "nonnegative integer s")->required();
  s->add_option("--h", o.h, "h")->required();
  s = leaf(limits, "f", "F(s,h) limit = f0 2^{-2h} E[X^{2h}]", [&] {
    JointMomentParams p{o.beta, cplx(o.delta, o.im), o.s, o.h};
    Outcome r = detail::scalar({{"beta", o.beta}, {"delta", detail::cjson(p.delta)}, {"s", o.s}, {"h", o.h}}, "value",
                               f_limit(p));
    r.result["in_theorem_window"] = p.in_theorem_window();
    return r;
  });
  beta(s);
  delta(s);
  s->add_option("--s", o.s, "s")->required();
  s->add_option("--h", o.h, "integer h")->required();
  s = leaf(limits, "y-moment", "E[Y^r] for the inverse-Laguerre limit", [&] {
    return detail::scalar({{"beta", o.beta}, {"nu", o.nu}, {"r", o.r}, {"mode", o.mode}}, "value",
                          y_moment_limit(o.beta, o.nu, o.r, detail::parse_mode(o.mode)));
  });
  beta(s);
  s->add_option("--nu", o.nu, "nu")->required();
  s->add_option("--r", o.r, "power")->required();
  s->add_option("--mode", o.mode, "calibrated or as-printed")->capture_default_str();

  // finite N
  auto* finite = app.add_subcommand("finite", "exact finite-N values");
  finite->require_subcommand(1);
  s = leaf(finite, "cjbe-f0", "F_N(s,0) from the Morris integral", [&] {
    const cplx d(o.delta, o.im);
    return detail::scalar({{"n", o.n}, {"beta", o.beta}, {"delta", detail::cjson(d)}, {"s", o.s}}, "value",
                          cjbe_finite_f0(o.n, o.beta, d, o.s));
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  delta(s);
  s->add_option("--s", o.s, "s")->required();
  s = leaf(finite, "laguerre", "inverse-Laguerre E[(sum x)^r]", [&] {
    return detail::scalar({{"n", o.n}, {"beta", o.beta}, {"nu", o.nu}, {"r", o.r}, {"mode", o.mode}}, "value",
                          laguerre_finite_moment(o.beta, o.nu, o.n, o.r, detail::parse_mode(o.mode)));
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  s->add_option("--nu", o.nu, "nu")->required();
  s->add_option("--r", o.r, "power")->required();
  s->add_option("--mode", o.mode, "calibrated or as-printed")->capture_default_str();
  s = leaf(finite, "jacobi", "Jacobi E[(sum 1/x)^r]", [&] {
    return detail::scalar({{"n", o.n}, {"beta", o.beta}, {"nu", o.nu}, {"mu", o.mu}, {"r", o.r}}, "value",
                          jacobi_inverse_moment(o.beta, o.nu, o.mu, o.n, o.r));
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  s->add_option("--nu", o.nu, "nu")->required();
  s->add_option("--mu", o.mu, "mu")->required();
  s->add_option("--r", o.r, "power")->required();

  // samplers
  auto* sample = app.add_subcommand("sample", "draw configurations");
  sample->require_subcommand(1);
  s = leaf(sample, "hp", "Hua-Pickrell by Metropolis", [&] {
    const auto spec = EnsembleSpec::hua_pickrell(o.n, o.beta, cplx(o.tau, o.im));
    const auto cfg = detail::chain_config(o);
    return detail::batch_outcome(spec, sample_mcmc(spec, cfg), cfg);
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  tau(s);
  chain(s);
  s = leaf(sample, "cjbe", "circular Jacobi by Metropolis (angles)", [&] {
    const auto spec = EnsembleSpec::circular_jacobi(o.n, o.beta, cplx(o.delta, o.im), o.s);
    const auto cfg = detail::chain_config(o);
    return detail::batch_outcome(spec, sample_mcmc(spec, cfg), cfg);
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  delta(s);
  s->add_option("--s", o.s, "tilt |Psi(0)|^{2s}");
  chain(s);
  s = leaf(sample, "laguerre", "Laguerre (or --inverse) by the tridiagonal model", [&] {
    const auto spec = o.inverse ? EnsembleSpec::inverse_laguerre(o.n, o.beta, o.nu) : EnsembleSpec::laguerre(o.n, o.beta, o.nu);
    spec.validate();
    Rng rng = make_stream(o.seed, 0);
    std::vector<std::vector<double>> draws;
    for (int i = 0; i < o.count; ++i)
      draws.push_back(o.inverse ? sample_inverse_laguerre(o.n, o.beta, o.nu, rng) : sample_laguerre_tridiag(o.n, o.beta, o.nu, rng));
    return detail::iid_outcome(spec, std::move(draws), o.n);
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  s->add_option("--nu", o.nu, "nu")->required();
  s->add_option("--count", o.count, "draws")->capture_default_str();
  s->add_flag("--inverse", o.inverse, "return 2/lambda (inverse-Laguerre points)");
  s = leaf(sample, "array", "interlacing arrays from a consistent family", [&] {
    const auto kind = ensemble_kind_from_string(o.kind);
    if (!kind || (*kind != EnsembleKind::hua_pickrell && *kind != EnsembleKind::inverse_laguerre))
      throw std::invalid_argument("--kind must be hua-pickrell or inverse-laguerre");
    const auto spec = *kind == EnsembleKind::hua_pickrell ? EnsembleSpec::hua_pickrell(1, o.beta, o.tau)
                                                          : EnsembleSpec::inverse_laguerre(1, o.beta, o.nu);
    const auto arrays = sample_arrays(spec, o.depth, o.count, o.seed, o.threads);
    Outcome out;
    out.spec = spec;
    out.header = {"array", "row", "index", "value"};
    for (std::size_t a = 0; a < arrays.size(); ++a)
      for (int k = 1; k <= o.depth; ++k)
        for (std::size_t i = 0; i < arrays[a].row(k).size(); ++i)
          out.rows.push_back({double(a), double(k), double(i + 1), arrays[a].row(k)[i]});
    json means = json::array();
    for (int k = 1; k <= o.depth; ++k) {
      double t = 0.0;
      for (const auto& arr : arrays) t += arr.row_average(k);
      means.push_back(t / double(arrays.size()));
    }
    out.result = {{"arrays", arrays.size()}, {"depth", o.depth}, {"mean_row_average", means}};
    out.text = std::to_string(arrays.size()) + " arrays of depth " + std::to_string(o.depth) +
               ", mean T_depth " + format_double(means.back().get<double>());
    return out;
  });
  s->add_option("--kind", o.kind, "hua-pickrell or inverse-laguerre")->capture_default_str();
  beta(s);
  s->add_option("--tau", o.tau, "tau (Hua-Pickrell)");
  s->add_option("--nu", o.nu, "nu (inverse Laguerre)");
  s->add_option("--depth", o.depth, "rows per array")->capture_default_str();
  s->add_option("--count", o.count, "arrays")->capture_default_str();
  s = leaf(sample, "da", "Dixon-Anderson kernel from a fixed top row", [&] {
    Rng rng = make_stream(o.seed, 0);
    std::vector<std::vector<double>> draws;
    for (int i = 0; i < o.count; ++i) draws.push_back(sample_da(o.beta, o.y, rng));
    return detail::iid_outcome({{"beta", o.beta}, {"y", o.y}}, std::move(draws), int(o.y.size()) - 1);
  });
  beta(s);
  s->add_option("--y", o.y, "strictly decreasing top row, comma separated")->delimiter(',')->required();
  s->add_option("--count", o.count, "draws")->capture_default_str();

  // oracles
  auto* oracle = app.add_subcommand("oracle", "quadrature oracles");
  oracle->require_subcommand(1);
  s = leaf(oracle, "cauchy", "one-dimensional Cauchy moment, quadrature and closed form", [&] {
    const CauchyMoment c = cauchy_moment_1d(o.m, o.beta, o.n, o.tau);
    Outcome r = detail::quad({{"m", o.m}, {"beta", o.beta}, {"n", o.n}, {"tau", o.tau}}, c.quadrature);
    r.result["closed_form"] = c.closed_form;
    r.text += " (closed form " + format_double(c.closed_form) + ")";
    return r;
  });
  s->add_option("--m", o.m, "power 2m")->required();
  beta(s);
  s->add_option("--n", o.n, "N")->required();
  s->add_option("--tau", o.tau, "tau")->required();
  s = leaf(oracle, "hp-moment", "Hua-Pickrell E[(x_1+...+x_k)^p], k in {1,2}", [&] {
    return detail::quad({{"k", o.k}, {"beta", o.beta}, {"tau", o.tau}, {"power", o.power}},
                        hp_row_moment(o.k, o.beta, o.tau, o.power));
  });
  s->add_option("--k", o.k, "rows")->required();
  beta(s);
  s->add_option("--tau", o.tau, "tau")->required();
  s->add_option("--power", o.power, "power")->capture_default_str();
  s = leaf(oracle, "invlag-moment", "inverse-Laguerre E[(sum x)^r], N in {1,2}", [&] {
    return detail::quad({{"n", o.n}, {"beta", o.beta}, {"nu", o.nu}, {"r", o.r}},
                        inv_laguerre_moment(o.n, o.beta, o.nu, o.r));
  });
  s->add_option("--n", o.n, "N")->required();
  beta(s);
  s->add_option("--nu", o.nu, "nu")->required();
  s->add_option("--r", o.r, "power")->required();
  s = leaf(oracle, "da-norm", "total mass of the Dixon-Anderson kernel", [&] {
    return detail::quad({{"beta", o.beta}, {"y", o.y}}, da_normalization(o.beta, o.y));
  });
  beta(s);
  s->add_option("--y", o.y, "strictly decreasing top row, comma separated")->delimiter(',')->required();
  s = leaf(oracle, "consistency", "pushed two-point law vs one-point law on a grid", [&] {
    const auto kind = ensemble_kind_from_string(o.kind);
    if (!kind) throw std::invalid_argument("unknown --kind " + o.kind);
    const double param = *kind == EnsembleKind::hua_pickrell ? o.tau : o.nu;
    const auto grid = betamoments::detail::linspace(o.from, o.to, o.points);
    const ConsistencyReport rep = consistency_marginal(*kind, o.beta, param, grid, {}, o.threads);
    Outcome out;
    out.spec = {{"kind", o.kind}, {"beta", o.beta}, {"param", param}, {"from", o.from}, {"to", o.to}, {"points", o.points}};
    out.result = rep;
    out.header = {"x", "pushed", "direct", "error_bound"};
    for (const auto& p : rep.points) out.rows.push_back({p.x, p.pushed, p.direct, p.error_bound});
    out.text = "max deviation " + betamoments::detail::sci(rep.max_deviation);
    return out;
  });
  s->add_option("--kind", o.kind, "hua-pickrell or inverse-laguerre")->capture_default_str();
  beta(s);
  s->add_option("--tau", o.tau, "tau (Hua-Pickrell)");
  s->add_option("--nu", o.nu, "nu (inverse Laguerre)");
  s->add_option("--from", o.from, "grid start")->capture_default_str();
  s->add_option("--to", o.to, "grid end")->capture_default_str();
  s->add_option("--points", o.points, "grid size")->check(CLI::Range(2, 100000))->capture_default_str();

  // verification
  auto* verify = app.add_subcommand("verify", "acceptance suites; exit 1 on failure");
  verify->require_subcommand(1);
  for (std::string suite : {"all", "identities", "convergence", "exchangeability", "laguerre-calibration"}) {
    s = leaf(verify, suite, "run the " + suite + " suite", [&o, suite] {
      VerifyOptions vo;
      vo.seed = o.seed;
      vo.threads = o.threads;
      vo.slow = o.slow;
      if (o.quick) {
        vo.convergence_draws = 20000;
        vo.arrays = 2000;
      }
      Outcome out;
      out.spec = {{"suite", suite}, {"slow", o.slow}, {"quick", o.quick}};
      out.result["criteria"] = json::array();
      std::ostringstream text;
      bool all = true;
      for (int id : suite_criteria(suite)) {
        const CriterionResult r = run_criterion(id, vo);
        all = all && r.passed;
        text << (r.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << r.title << "): " << r.summary << '\n';
        out.result["criteria"].push_back({{"id", id}, {"title", r.title}, {"passed", r.passed}, {"summary", r.summary},
                                          {"seconds", r.seconds}, {"report", r.report}});
      }
      out.result["passed"] = all;
      out.text = text.str() + (all ? "all criteria passed" : "verification FAILED");
      out.exit_code = all ? ok : verification_failed;
      return out;
    });
    s->add_flag("--slow", o.slow, "include the gated slow checks");
    s->add_flag("--quick", o.quick, "smaller Monte Carlo sizes (smoke test)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  std::string command;
  for (int i = 1; i < argc; ++i) command += std::string(i > 1 ? " " : "") + argv[i];
  try {
    for (auto& [sub, action] : leaves)
      if (sub->parsed()) {
        const Outcome res = action();
        detail::emit(res, o, command, out);
        return res.exit_code;
      }
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return domain;
  } catch (const QuadratureError& e) {
    err << "quadrature error: " << e.what() << '\n';
    return domain;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return domain;
  }
  return usage;
}

}  // namespace betamoments::cli
