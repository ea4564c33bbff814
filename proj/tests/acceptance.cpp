// Acceptance runner: one PASS/FAIL line per criterion, sub-check detail
// indented beneath it. Optional arguments select criteria, e.g. `acceptance 1 7`.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "calorex/calorex.hpp"

namespace {

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<calorex::Report(const calorex::Config&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace calorex;
  const Config cfg;
  const int jobs = default_jobs();
  const std::vector<Criterion> all{
      {1, "free-fermion identity (S, c to 1e-6 at t = 0.1, 0.5, 1)", 10, [](const Config& c) { return check_free_fermion(c); }},
      {2, "high-temperature limit S(1e4) = ln 2 +- 1e-4", 5, [](const Config& c) { return check_high_temperature(c); }},
      {3, "ED convergence at t = 1, n = 8..14", 600, [](const Config& c) { return check_ed_convergence(c); }},
      {4, "Grueneisen plateau -1/3 at d = +-0.05, t = 0.02", 60, [](const Config& c) { return check_gamma_plateau(c); }},
      {5, "entropy-jump ratio 2 and crossing integral ln 2 at t = 0.02", 120, [](const Config& c) { return check_entropy_jump(c); }},
      {6, "crossing magnitude |dd Dt/t| in [0.6, 0.9], sign change at t = 0.1 only", 600,
       [jobs](const Config& c) { return check_fig4(c, jobs); }},
      {7, "gapped asymptote within 5% at Delta = 2, t = 0.05; k^2 + k'^2 = 1", 60, [](const Config& c) { return check_gapped(c); }},
      {8, "property suites (FD entropy, refinement, determinism, h symmetry)", 300,
       [](const Config& c) { return check_properties(c); }},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& cr : all) {
    if (!wanted.empty() && !wanted.count(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Report rep = cr.run(cfg);
    const double secs = detail::seconds_since(t0);
    const bool pass = all_pass(rep) && secs <= cr.budget_seconds;
    failed += pass ? 0 : 1;
    std::printf("%s criterion %d: %s [%.1f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", cr.id, cr.title, secs,
                cr.budget_seconds);
    for (const auto& c : rep) std::printf("    %s\n", format_check(c).c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %d criteria failed\n", failed ? "SUMMARY FAIL" : "SUMMARY PASS", failed);
  return failed ? 1 : 0;
}
