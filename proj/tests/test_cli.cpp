#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "sdg/closed_form.hpp"
#include "json.hpp"

namespace {

struct CliRun {
  int exit = -1;
  std::string out;
};

// stderr is folded into stdout so error messages can be checked.
CliRun run(const std::string& args) {
  const std::string cmd = std::string(SDG_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (char c : row) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) out.emplace_back();
    else out.back() += c;
  }
  return out;
}

}  // namespace

TEST(Cli, SolvePrintsValueInRange) {
  const CliRun r = run("solve --game g1 --belief -- --lambda 0.2 --h 1");
  ASSERT_EQ(r.exit, 0) << r.out;
  const auto doc = nlohmann::json::parse(r.out);
  const double v = doc.at("value").get<double>();
  EXPECT_GE(v, -1.0);
  EXPECT_LE(v, 1.0);
  EXPECT_EQ(doc.at("belief").get<std::string>(), "--");
}

TEST(Cli, StepTooLargeExitsThree) {
  const CliRun r = run("solve --game g1 --lambda 0.2 --h 2");
  EXPECT_EQ(r.exit, 3);
  EXPECT_NE(r.out.find("StepTooLarge"), std::string::npos) << r.out;
}

TEST(Cli, MalformedFileExitsTwo) {
  const auto path = std::filesystem::temp_directory_path() / "sdg_cli_bad.json";
  std::ofstream(path) << "{\"states\": [";
  const CliRun r = run("solve --game " + path.string() + " --lambda 0.2 --h 1");
  EXPECT_EQ(r.exit, 2);
  EXPECT_NE(r.out.find("ParseError"), std::string::npos) << r.out;
  std::filesystem::remove(path);
}

TEST(Cli, LambdaSweepHasOneRowPerPoint) {
  const CliRun r = run("sweep --game g1 --h 1 --lambda-grid 1e-5:1e-1:40");
  ASSERT_EQ(r.exit, 0) << r.out;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 41u);
  EXPECT_EQ(rows[0], "game,lambda,h,belief,value,error_bound,iterations,solver,seed");
  EXPECT_NEAR(std::stod(fields(rows[1])[1]), 1e-5, 1e-15);
  EXPECT_NEAR(std::stod(fields(rows[40])[1]), 1e-1, 1e-12);
}

TEST(Cli, StepSweepTrendsToClosedForm) {
  const CliRun r = run("sweep --game half-minus:0 --lambda 0.2 --h-grid 0.1,0.01,0.001 --belief 0,1,0,0");
  ASSERT_EQ(r.exit, 0) << r.out;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  const double target = sdg::w(sdg::Side::kMinus, 0.2, 1.0);
  double prev = 1.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double gap = std::abs(std::stod(fields(rows[k])[4]) - target);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 5e-3);
}

TEST(Cli, SweepIsDeterministicAcrossThreadCounts) {
  const std::string args = "sweep --game g1 --h 1 --lambda-grid 0.05:0.5:6 --solver tree --eps 1e-6";
  const CliRun a = run(args + " --threads 1");
  const CliRun b = run(args + " --threads 3");
  const CliRun c = run(args + " --threads 3");
  ASSERT_EQ(a.exit, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
}

TEST(Cli, VerifyPdeSuitePasses) {
  const CliRun r = run("verify pde");
  EXPECT_EQ(r.exit, 0) << r.out;
}

TEST(Cli, CanaryBreaksEquivalence) {
  const auto path = std::filesystem::temp_directory_path() / "sdg_cli_canary.json";
  const CliRun r = run("verify equivalence --canary --out " + path.string());
  EXPECT_EQ(r.exit, 1) << r.out;
  std::ifstream in(path);
  const auto doc = nlohmann::json::parse(in);
  bool seen = false;
  for (const auto& c : doc.at("criteria"))
    if (c.at("id").get<int>() == 6) {
      seen = true;
      EXPECT_EQ(c.at("status").get<std::string>(), "fail");
    }
  EXPECT_TRUE(seen);
  std::filesystem::remove(path);
}

TEST(Cli, ExportWritesLoadableFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "sdg_cli_export";
  std::filesystem::remove_all(dir);
  const CliRun r = run("export --out " + dir.string());
  ASSERT_EQ(r.exit, 0) << r.out;
  for (const char* name : {"g1", "g1-tilde", "half-minus-0", "perfect-test"}) {
    const auto path = dir / (std::string(name) + ".json");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    const CliRun s = run("solve --game " + path.string() + " --lambda 0.3 --h 1 --solver tree --eps 1e-4");
    EXPECT_EQ(s.exit, 0) << name << ": " << s.out;
  }
  std::filesystem::remove_all(dir);
}
