#pragma once

// CSV and JSON artifacts: sample batches with a JSON sidecar, convergence
// tables, and report objects carrying a provenance header.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "betamoments/ensembles.hpp"
#include "betamoments/errors.hpp"
#include "betamoments/mc.hpp"
#include "betamoments/oracle.hpp"
#include "json.hpp"

namespace betamoments {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON conversions

inline void to_json(json& j, const EnsembleSpec& e) {
  j = json{{"kind", to_string(e.kind)},
           {"beta", e.beta},
           {"n", e.n},
           {"tau", {{"re", e.tau.real()}, {"im", e.tau.imag()}}},
           {"delta", {{"re", e.delta.real()}, {"im", e.delta.imag()}}},
           {"s", e.s},
           {"nu", e.nu}};
}

inline void from_json(const json& j, EnsembleSpec& e) {
  const auto kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw DomainError("unknown ensemble kind " + j.at("kind").get<std::string>());
  e.kind = *kind;
  e.beta = j.at("beta").get<double>();
  e.n = j.at("n").get<int>();
  e.tau = {j.at("tau").at("re").get<double>(), j.at("tau").at("im").get<double>()};
  e.delta = {j.at("delta").at("re").get<double>(), j.at("delta").at("im").get<double>()};
  e.s = j.at("s").get<double>();
  e.nu = j.at("nu").get<double>();
}

inline void to_json(json& j, const ChainDiagnostics& d) {
  j = json{{"acceptance_rate", d.acceptance_rate}, {"chain_acceptance", d.chain_acceptance},
           {"tuned_scale", d.tuned_scale},         {"split_rhat", d.split_rhat},
           {"converged", d.converged},             {"warning", d.warning}};
}

inline void to_json(json& j, const ChainConfig& c) {
  j = json{{"burn_in", c.burn_in}, {"samples", c.samples}, {"thin", c.thin},
           {"proposal_scale", c.proposal_scale}, {"chains", c.chains}, {"seed", c.seed}};
}

inline void to_json(json& j, const MomentEstimate& m) {
  j = json{{"value", m.value},
           {"std_error", m.std_error},
           {"n_samples", m.n_samples},
           {"effective_fraction", m.effective_fraction},
           {"exploratory", m.exploratory}};
}

inline void to_json(json& j, const QuadResult& q) {
  j = json{{"value", q.value}, {"error_bound", q.error_bound}, {"evaluations", q.evaluations}};
}

inline void to_json(json& j, const ConsistencyReport& r) {
  j = json{{"max_deviation", r.max_deviation}, {"points", json::array()}};
  for (const auto& p : r.points)
    j["points"].push_back({{"x", p.x}, {"pushed", p.pushed}, {"direct", p.direct}, {"error_bound", p.error_bound}});
}

/// One top-level object with `spec`, `result`, `diagnostics`, plus the provenance fields.
inline json make_report(const json& spec, const json& result, const json& diagnostics, std::uint64_t seed) {
  return json{{"version", kVersion}, {"seed", seed}, {"spec", spec}, {"result", result}, {"diagnostics", diagnostics}};
}

// ---------------------------------------------------------------------------
// files

/// One row per draw: chain, draw, x1..xN. The sidecar at `csv_path + ".json"`
/// records spec, seed, chain configuration and diagnostics.
inline void write_sample_batch(const std::string& csv_path, const SampleBatch& batch, const EnsembleSpec& spec,
                               const ChainConfig& cfg) {
  std::vector<std::string> header{"chain", "draw"};
  for (int i = 1; i <= batch.dim; ++i) header.push_back("x" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  rows.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::vector<double> row{static_cast<double>(i / batch.per_chain), static_cast<double>(i % batch.per_chain)};
    const auto p = batch.point(i);
    row.insert(row.end(), p.begin(), p.end());
    rows.push_back(std::move(row));
  }
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  write_csv(csv, header, rows);
  std::ofstream side(csv_path + ".json");
  if (!side) throw std::runtime_error("cannot open " + csv_path + ".json");
  side << make_report(spec, {{"file", csv_path}, {"draws", batch.size()}, {"config", cfg}}, batch.diagnostics, cfg.seed)
              .dump(2)
       << '\n';
}

struct ConvergenceRow {
  int n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double limit = 0.0;
};

inline void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  std::vector<std::vector<double>> cells;
  for (const auto& r : rows) cells.push_back({static_cast<double>(r.n), r.estimate, r.std_error, r.limit});
  write_csv(out, {"N", "estimate", "stderr", "limit"}, cells);
}

inline EnsembleSpec spec_from_report(const json& report) { return report.at("spec").get<EnsembleSpec>(); }

}  // namespace betamoments
