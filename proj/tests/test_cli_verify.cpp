#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli_app.hpp"

using namespace betamoments;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "betamoments_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// last line of text output, after the provenance header
std::string value_line(const std::string& s) {
  auto lines = s.substr(0, s.size() - 1);
  return lines.substr(lines.rfind('\n') + 1);
}

}  // namespace

TEST(Cli, DocumentedExamples) {
  auto r = invoke({"limits", "second-moment", "--beta", "2", "--tau", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# betamoments", 0), 0u);
  EXPECT_NEAR(std::stod(value_line(r.out)), 1.0 / 3.0, 1e-15);

  r = invoke({"limits", "x-moment", "--beta", "2", "--tau", "1", "--h", "0"});
  EXPECT_EQ(value_line(r.out), "1");

  r = invoke({"oracle", "da-norm", "--beta", "2", "--y", "1,0", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["result"]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_GE(j["result"]["error_bound"].get<double>(), 0.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"limits", "x-moment", "--beta", "2", "--tau", "1"}).code, 2);
  EXPECT_EQ(invoke({"limits", "f0", "--beta", "2", "--delta", "0", "--s", "1", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"finite", "laguerre", "--n", "2", "--beta", "2", "--nu", "3", "--r", "1", "--mode", "odd"}).code, 2);
  EXPECT_EQ(invoke({"limits", "forrester", "--beta", "2", "--s", "1", "--h", "0.5"}).code, 3);
  EXPECT_EQ(invoke({"oracle", "hp-moment", "--k", "1", "--beta", "2", "--tau", "0.2", "--power", "2"}).code, 3);
  EXPECT_EQ(invoke({"oracle", "da-norm", "--beta", "2", "--y", "0,1"}).code, 3);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, ComplexParametersAsFlagPairs) {
  auto r = invoke({"limits", "f0", "--beta", "2", "--re", "0.3", "--im", "0.1", "--s", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["result"]["value"].get<double>(), f0_limit(2.0, cplx(0.3, 0.1), 1.0), 1e-15);
  EXPECT_EQ(j["spec"]["delta"]["im"].get<double>(), 0.1);
}

TEST(Cli, SampleJsonRoundTripsSpec) {
  auto r = invoke({"sample", "hp", "--n", "3", "--beta", "2", "--re", "1.25", "--im", "0.5", "--samples", "50",
                "--burn-in", "50", "--format", "json", "--seed", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(spec_from_report(j), EnsembleSpec::hua_pickrell(3, 2.0, cplx(1.25, 0.5)));
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 11u);
  EXPECT_TRUE(j["diagnostics"].contains("acceptance_rate"));
}

TEST(Cli, CsvFileWithSidecarAndDeterminism) {
  const auto dir = std::filesystem::temp_directory_path() / "betamoments_cli_test";
  std::filesystem::create_directories(dir);
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  for (const auto& path : {a, b})
    ASSERT_EQ(invoke({"sample", "array", "--kind", "inverse-laguerre", "--beta", "4", "--nu", "2", "--depth", "4",
                   "--count", "20", "--format", "csv", "-o", path, "--threads", path == a ? "1" : "3"})
                  .code,
              0);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a).substr(0, 22), "array,row,index,value\n");
  const json side = json::parse(slurp(a + ".json"));
  EXPECT_EQ(spec_from_report(side), EnsembleSpec::inverse_laguerre(1, 4.0, 2.0));
  std::filesystem::remove_all(dir);
}

TEST(Verify, IdentitySuitePasses) {
  auto r = invoke({"verify", "identities", "--slow"});
  EXPECT_EQ(r.code, 0) << r.out;
  for (int id : {1, 2, 3, 4, 5, 7, 10})
    EXPECT_NE(r.out.find("PASS criterion " + std::to_string(id) + " "), std::string::npos) << id;
  EXPECT_NE(r.out.find("h=2 (beta=2, tau=3)"), std::string::npos);
}

TEST(Verify, LaguerreCalibrationReport) {
  VerifyOptions opt;
  const CriterionResult r = run_criterion(8, opt);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.report["fit"]["constant"].get<double>(), 4.0, 1e-10);
  EXPECT_GT(r.report["as_printed_fit"]["max_rel_residual"].get<double>(), 1e-2);
  EXPECT_EQ(r.report["cells"].size(), 32u);
}

TEST(Verify, QuickMonteCarloSuites) {
  EXPECT_EQ(invoke({"verify", "exchangeability", "--quick", "--seed", "5"}).code, 0);
  EXPECT_EQ(invoke({"verify", "convergence", "--quick", "--seed", "5"}).code, 0);
}

TEST(Verify, MonotoneDistanceFeasibility) {
  using betamoments::detail::monotone_distance_feasible;
  EXPECT_TRUE(monotone_distance_feasible({0.5, 0.3, 0.1}, {0.6, 0.4, 0.2}, 0.0));
  EXPECT_TRUE(monotone_distance_feasible({0.1, 0.3}, {0.35, 0.4}, 0.0));
  EXPECT_FALSE(monotone_distance_feasible({0.1, 0.3}, {0.2, 0.4}, 0.0));
  EXPECT_TRUE(monotone_distance_feasible({-0.5, 0.2}, {0.1, 0.3}, 0.0));
}

TEST(Verify, UnknownSuiteRejected) { EXPECT_THROW(suite_criteria("none"), std::invalid_argument); }
