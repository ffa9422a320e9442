// Runs the ten acceptance criteria and prints one PASS/FAIL line each.
// Usage: acceptance [--slow] [--seed N] [--threads N] [--only ID]

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "betamoments/verify.hpp"

int main(int argc, char** argv) {
  betamoments::VerifyOptions opt;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--slow") {
      opt.slow = true;
    } else if (a == "--seed" && i + 1 < argc) {
      opt.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (a == "--threads" && i + 1 < argc) {
      opt.threads = std::atoi(argv[++i]);
    } else if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "unknown argument %s\n", argv[i]);
      return 2;
    }
  }
  int failed = 0;
  for (int id = 1; id <= 10; ++id) {
    if (only && id != only) continue;
    try {
      const auto r = betamoments::run_criterion(id, opt);
      std::printf("%s criterion %2d (%s): %s [%.1f s]\n", r.passed ? "PASS" : "FAIL", id, r.title.c_str(),
                  r.summary.c_str(), r.seconds);
      failed += !r.passed;
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %2d: exception: %s\n", id, e.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria failed\n", failed, only ? 1 : 10);
  return failed ? 1 : 0;
}
