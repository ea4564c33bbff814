#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "calorex/oracle.hpp"
#include "calorex/sweep.hpp"

using namespace calorex;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(CALOREX_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

Run cli_err(const std::string& args) {
  const std::string cmd = std::string(CALOREX_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("calorex_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

// ------------------------------------------------------------ library side

TEST(RowLayout, DefaultGridHasBranchRows) {
  const SweepSpec s;
  const auto layout = detail::row_layout(s, 1e-3);
  EXPECT_EQ(layout.size(), 123u);
  int minus = 0, plus = 0, excluded = 0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i > 0) {
      EXPECT_LT(layout[i - 1].first, layout[i].first);
    }
    minus += layout[i].second == RowBranch::Minus;
    plus += layout[i].second == RowBranch::Plus;
    excluded += layout[i].second == RowBranch::Excluded;
  }
  EXPECT_EQ(minus, 1);
  EXPECT_EQ(plus, 1);
  EXPECT_EQ(excluded, 1);
  EXPECT_EQ(layout.size() * s.t_list.size(), 615u);
}

TEST(RowLayout, OneSidedRangeHasNoBranchRows) {
  SweepSpec s;
  s.d_min = 0.1;
  s.d_max = 0.5;
  s.d_steps = 5;
  const auto layout = detail::row_layout(s, 1e-3);
  EXPECT_EQ(layout.size(), 5u);
  for (const auto& [d, b] : layout) EXPECT_EQ(b, RowBranch::Regular);
  s.d_steps = 1;
  EXPECT_THROW(detail::row_layout(s, 1e-3), Error);
}

TEST(Csv, Fmt17RoundTrips) {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(detail::fmt17(x)), x);
  EXPECT_EQ(detail::fmt17(kNaN), "nan");
}

TEST(Csv, HeaderAndExcludedRow) {
  SweepRow ok;
  ok.d = -0.5;
  ok.t = 0.5;
  ok.S = 0.25;
  ok.c = 0.125;
  ok.alpha = -0.5;
  ok.gamma = -4.0;
  ok.residual = 1e-13;
  SweepRow ex;
  ex.branch = RowBranch::Excluded;
  ex.t = 0.5;
  ex.status = "skipped";
  std::ostringstream os;
  write_sweep_csv(os, {ok, ex});
  EXPECT_EQ(os.str(),
            "d,t,S,c,alpha,gamma,branch,residual\n"
            "-0.5,0.5,0.25,0.125,-0.5,-4,regular,1e-13\n"
            "0,0.5,nan,nan,nan,nan,excluded,nan\n");
}

TEST(Manifest, RowsTraceToCsv) {
  SweepSpec s;
  s.d_min = -0.4;
  s.d_max = -0.2;
  s.d_steps = 2;
  s.t_list = {1.0};
  const Config cfg;
  const auto rows = run_sweep(s, cfg);
  ASSERT_EQ(rows.size(), 2u);
  const json m = sweep_manifest(s, cfg, rows, 1, 0.0, "x.csv");
  EXPECT_EQ(m["columns"], kSweepHeader);
  EXPECT_EQ(m["failed_rows"], 0);
  ASSERT_EQ(m["rows"].size(), 2u);
  EXPECT_EQ(m["rows"][1]["d"].get<double>(), rows[1].d);
  EXPECT_EQ(m["rows"][1]["status"], "ok");
  EXPECT_TRUE(m["rows"][1].contains("diagnostics"));
  const SweepSpec back = sweep_spec_from_json(m["spec"]);
  EXPECT_EQ(back.d_steps, 2);
  EXPECT_EQ(back.t_list, s.t_list);
  EXPECT_EQ(config_from_json(m["config"]).snapshot(), cfg.snapshot());
}

TEST(Presets, Known) {
  EXPECT_NO_THROW(require_preset("fig3"));
  EXPECT_THROW(require_preset("fig9"), Error);
  EXPECT_TRUE(preset_is_profile("fig4b"));
  EXPECT_FALSE(preset_is_profile("fig1"));
}

// --------------------------------------------------------------------- CLI

TEST(Cli, SolveEasyPlane) {
  const auto r = cli("solve --delta 0.5 --t 0.5");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "ok");
  const double S = j["entropy"].get<double>();
  EXPECT_GT(S, 0.0);
  EXPECT_LT(S, std::log(2.0));
  EXPECT_EQ(j["regime"], "easy-plane");
  EXPECT_TRUE(j.contains("diagnostics"));
}

TEST(Cli, SolveXXPointMatchesFermions) {
  const auto r = cli("solve --delta 0 --t 1");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  const auto ff = xx_free_fermion(1.0, 0.0);
  EXPECT_NEAR(j["entropy"].get<double>(), ff.S, 1e-8);
  EXPECT_NEAR(j["f_rel"].get<double>(), ff.f_rel, 1e-8);
}

TEST(Cli, IsotropicPointRefused) {
  const auto r = cli_err("solve --delta 1 --t 0.5");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("d_eps"), std::string::npos) << r.out;
}

TEST(Cli, CaloricEqualEndpoints) {
  const auto r = cli("caloric --d1 -0.2 --d2 -0.2 --t 0.5 --method both");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["delta_t_paper"].get<double>(), 0.0);
  EXPECT_EQ(j["delta_t_isentrope"].get<double>(), 0.0);
}

TEST(Cli, BadConfigExitsOne) {
  EXPECT_EQ(cli("--set nlie.bogus=1 solve --delta 0.5 --t 0.5").code, 1);
  EXPECT_EQ(cli("--set nlie.tol=-3 solve --delta 0.5 --t 0.5").code, 1);
  EXPECT_EQ(cli("solve --t 0.5 --bogus").code, 1);
  EXPECT_EQ(cli("--config /nonexistent/calorex.cfg solve --delta 0.5 --t 0.5").code, 1);
}

TEST(Cli, SweepReplayIsByteIdentical) {
  const auto dir = scratch_dir("replay");
  const auto a = dir / "a.csv", b = dir / "b.csv";
  const auto r1 = cli("sweep --d-min -0.4 --d-max 0.2 --d-steps 4 --t-list 0.5,1 --out " + a.string());
  ASSERT_EQ(r1.code, 0) << r1.out;
  const auto r2 = cli("sweep --from-manifest " + a.string() + ".manifest.json --out " + b.string());
  ASSERT_EQ(r2.code, 0) << r2.out;
  const std::string csv = slurp(a);
  EXPECT_EQ(csv, slurp(b));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kSweepHeader);
  const json m = json::parse(slurp(a.string() + ".manifest.json"));
  // 4 grid rows (d = 0 excluded) plus the minus and plus rows, per temperature
  EXPECT_EQ(m["rows"].size(), 12u);
  fs::remove_all(dir);
}

TEST(Cli, QuickValidationIsFast) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli("validate --suite quick");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_LT(secs, 30.0);
}

TEST(Cli, QuickValidationCatchesOverDamping) {
  const auto r = cli("--set nlie.damping=1.5 validate --suite quick");
  EXPECT_EQ(r.code, 3) << r.out;
}

TEST(Cli, EntropyLargerOnAxisSideAtUnitTemperature) {
  const auto dir = scratch_dir("branch");
  const auto a = dir / "s.csv";
  const auto r = cli("sweep --d-min -0.1 --d-max 0.1 --d-steps 3 --t-list 1 --out " + a.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream is(slurp(a));
  std::string line;
  double s_minus = kNaN, s_plus = kNaN;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    if (f[6] == "minus") s_minus = std::stod(f[2]);
    if (f[6] == "plus") s_plus = std::stod(f[2]);
  }
  EXPECT_GT(s_plus, s_minus) << "S(0-) " << s_minus << " S(0+) " << s_plus;
  fs::remove_all(dir);
}
