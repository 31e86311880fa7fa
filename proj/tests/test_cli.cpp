#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgglab/analytic.hpp"
#include "rgglab/report.hpp"
#include "rgglab/testing/oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + RGGLAB_CLI_PATH + std::string(" ") + args + " 2>/dev/null";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// value column of a scalar table printed as CSV
double scalar(const std::string& csv, const std::string& name) {
  for (const auto& l : lines(csv)) {
    const auto f = split(l);
    if (f.size() == 2 && f[0] == name) return std::stod(f[1]);
  }
  ADD_FAILURE() << "no quantity " << name << " in\n" << csv;
  return std::nan("");
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rgglab_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(CliGen, WritesPointsDeterministically) {
  const CliRun a = run("gen --n 100 --seed 7");
  ASSERT_EQ(a.code, 0);
  const auto ls = lines(a.out);
  ASSERT_EQ(ls.size(), 101u);
  EXPECT_EQ(ls[0], "index,x,y");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(std::stoul(f[0]), i - 1);
    const double x = std::stod(f[1]), y = std::stod(f[2]);
    EXPECT_TRUE(x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0);
  }
  EXPECT_EQ(run("gen --n 100 --seed 7").out, a.out);
  EXPECT_NE(run("gen --n 100 --seed 8").out, a.out);
}

TEST(CliGen, MatchesLibrary) {
  const CliRun a = run("gen --n 5 --seed 3");
  std::ostringstream os;
  rgglab::write_csv(os, rgglab::points_table(rgglab::sample_points(5, rgglab::RandomSeed{3})));
  EXPECT_EQ(a.out, os.str());
}

TEST(CliGen, BadInputs) {
  EXPECT_EQ(run("gen --n 0").code, 2);
  EXPECT_EQ(run("gen").code, 2);
  EXPECT_EQ(run("gen --n 10 --format xml").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(CliCensus, Schema) {
  const CliRun a = run("census --n 300 --mu 1 --trials 20 --seed 4 --lmax 3");
  ASSERT_EQ(a.code, 0);
  const auto ls = lines(a.out);
  ASSERT_EQ(ls.size(), 1u + 1u + 5u * 2u);
  EXPECT_EQ(ls[0], "name,n,point_estimate,ci_low,ci_high,trials,seed");
  EXPECT_EQ(split(ls[1])[0], "mean_k1");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    ASSERT_EQ(f.size(), 7u);
    EXPECT_EQ(f[1], "300");
    EXPECT_EQ(f[5], "20");
    EXPECT_EQ(f[6], "4");
    EXPECT_LE(std::stod(f[3]), std::stod(f[2]));
    EXPECT_LE(std::stod(f[2]), std::stod(f[4]));
  }
}

TEST(CliCensus, CountersOrderedInOutput) {
  const CliRun a = run("census --n 400 --mu 1 --trials 50 --format json");
  ASSERT_EQ(a.code, 0);
  const auto j = nlohmann::json::parse(a.out);
  std::map<std::string, double> p;
  for (const auto& row : j["rows"]) p[row["name"]] = row["point_estimate"];
  EXPECT_LE(p.at("pr_kprime_gt0_l2"), p.at("pr_k_gt0_l2"));
  EXPECT_LE(p.at("pr_k_gt0_l2"), p.at("pr_ktilde_gt0_l2"));
}

TEST(CliCensus, Sweep) {
  const CliRun a = run("census --ns 64,128 --ell 2 --mu 1 --trials 10");
  ASSERT_EQ(a.code, 0);
  const auto ls = lines(a.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(split(ls[0]).size(), 14u);
  EXPECT_EQ(split(ls[1])[0], "64");
  EXPECT_EQ(run("census --ns 128,64 --mu 1 --trials 10").code, 2);
  EXPECT_EQ(run("census --ns 64,128 --n 64 --mu 1").code, 2);
}

TEST(CliCensus, BadInputs) {
  EXPECT_EQ(run("census --n 100 --mu 1 --r 0.1").code, 2);
  EXPECT_EQ(run("census --n 100").code, 2);
  EXPECT_EQ(run("census --n 100 --mu 1 --eps 0.5").code, 2);
  EXPECT_EQ(run("census --n 100 --mu 200").code, 2);
  EXPECT_EQ(run("census --n 100 --r -1").code, 2);
}

TEST(CliHitting, RowsAndFormats) {
  const CliRun csv = run("hitting --ns 2,64 --trials 30 --seed 5");
  ASSERT_EQ(csv.code, 0);
  const auto ls = lines(csv.out);
  ASSERT_EQ(ls.size(), 3u);
  const auto r2 = split(ls[1]);
  EXPECT_EQ(r2[0], "2");
  EXPECT_EQ(std::stod(r2[3]), 1.0);
  EXPECT_EQ(r2[6], "");
  EXPECT_EQ(r2[9], "");

  const CliRun js = run("hitting --ns 2,64 --trials 30 --seed 5 --format json");
  ASSERT_EQ(js.code, 0);
  const auto j = nlohmann::json::parse(js.out);
  const auto header = split(ls[0]);
  for (std::size_t row = 0; row < 2; ++row) {
    const auto f = split(ls[row + 1]);
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto& v = j["rows"][row][header[c]];
      if (f[c].empty()) {
        EXPECT_TRUE(v.is_null()) << header[c];
      } else {
        EXPECT_EQ(std::stod(f[c]), v.get<double>()) << header[c];
      }
    }
  }
}

TEST(CliAnalytic, Mu) {
  const double r = rgglab::r_of_mu(1000, 1.0);
  const CliRun a = run("analytic --op mu --n 1000 --r " + rgglab::format_double(r));
  ASSERT_EQ(a.code, 0);
  EXPECT_NEAR(scalar(a.out, "mu"), 1.0, 1e-12);
  const CliRun b = run("analytic --op mu --n 1000 --mu 1");
  EXPECT_NEAR(scalar(b.out, "r"), r, 1e-15);
}

TEST(CliAnalytic, Ek1) {
  const CliRun a = run("analytic --op ek1 --n 4096 --r 0.02");
  ASSERT_EQ(a.code, 0);
  EXPECT_NEAR(scalar(a.out, "expected_k1"), rgglab::oracle::expected_isolated(4096, 0.02), 1e-9);
}

TEST(CliAnalytic, AreaBounds) {
  const CliRun a = run("analytic --op area-bounds --r 0.05 --rho-over-r 0.2");
  ASSERT_EQ(a.code, 0);
  const double base = std::numbers::pi * 0.0025;
  EXPECT_NEAR(scalar(a.out, "lower"), base * (1.0 + 0.2 / 6.0), 1e-15);
  EXPECT_NEAR(scalar(a.out, "upper"), base * 1.5, 1e-15);
  EXPECT_EQ(run("analytic --op area-bounds --r 0.05 --rho-over-r 0.6").code, 2);
  EXPECT_EQ(run("analytic --op area-bounds --rho-over-r 0.2").code, 2);
}

TEST(CliAnalytic, IBetaAgainstClosedForm) {
  const double r = 0.01;
  const CliRun a = run("analytic --op ibeta --n 100000 --r 0.01 --beta 1 --ell 2 --eps 0.3");
  ASSERT_EQ(a.code, 0);
  const double expect = rgglab::oracle::i_beta_closed_form_l2(1.0, 0.3, 100000.0, r);
  EXPECT_NEAR(scalar(a.out, "i_beta"), expect, 1e-9 * expect);
}

TEST(CliAnalytic, BadOp) {
  EXPECT_EQ(run("analytic --op nope --n 10").code, 2);
  EXPECT_EQ(run("analytic --op mu").code, 2);
}

TEST(CliBudget, EnvironmentLimit) {
  EXPECT_EQ(run("census --n 1000 --mu 1 --trials 100", "RGG_BUDGET=1000").code, 3);
  EXPECT_EQ(run("gen --n 1000", "RGG_BUDGET=999").code, 3);
  EXPECT_EQ(run("gen --n 1000", "RGG_BUDGET=1000").code, 0);
  EXPECT_EQ(run("gen --n 10", "RGG_BUDGET=abc").code, 2);
}

TEST(CliConfig, FlagsTakePrecedence) {
  const fs::path cfg = scratch("gen.json");
  {
    std::ofstream f(cfg);
    f << R"({"n": 7, "seed": 11})";
  }
  const CliRun a = run("gen --config " + cfg.string());
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run("gen --n 7 --seed 11").out);
  const CliRun b = run("gen --config " + cfg.string() + " --seed 12");
  EXPECT_EQ(b.out, run("gen --n 7 --seed 12").out);

  const fs::path bad = scratch("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"n": 7, "colour": "red"})";
  }
  EXPECT_EQ(run("gen --config " + bad.string()).code, 2);
  EXPECT_EQ(run("gen --config /nonexistent/x.json").code, 2);
}

TEST(CliOutput, FileWrittenOnlyOnSuccess) {
  const fs::path out = scratch("pts.csv");
  fs::remove(out);
  ASSERT_EQ(run("gen --n 20 --seed 1 --out " + out.string()).code, 0);
  EXPECT_EQ(slurp(out), run("gen --n 20 --seed 1").out);

  const fs::path none = scratch("none.csv");
  fs::remove(none);
  EXPECT_EQ(run("census --n 100 --mu 1 --r 0.1 --out " + none.string()).code, 2);
  EXPECT_FALSE(fs::exists(none));

  EXPECT_EQ(run("gen --n 5 --out /nonexistent/dir/x.csv").code, 4);
}

TEST(CliVerify, QuickSuiteReportsEveryCriterion) {
  const CliRun a = run("verify --quick");
  std::size_t pass = 0, fail = 0;
  for (const auto& l : lines(a.out)) {
    pass += l.rfind("PASS [", 0) == 0 ? 1 : 0;
    fail += l.rfind("FAIL [", 0) == 0 ? 1 : 0;
  }
  EXPECT_EQ(pass + fail, 9u) << a.out;
  EXPECT_EQ(a.code, fail == 0 ? 0 : 1) << a.out;
}
