#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

std::string cli() {
  const char* p = std::getenv("CUBES_CLI");
  return p ? p : "./cubes_cli";
}

Run run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  const int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, ExpsumCsv) {
  const auto r = run("expsum --modulus 7 --all");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "a,T\n0,42\n1,287\n2,-154\n3,-154\n4,-154\n5,-154\n6,287\n");
  const auto one = run("expsum --modulus 4 --a 2");
  EXPECT_EQ(one.out, "a,T\n2,-16\n");
}

TEST(Cli, SplusJson) {
  const auto r = run("splus --n 4 --d 2 --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["S"], "128");
}

TEST(Cli, VerifyLocal) {
  const auto r = run("verify --suite local --max-modulus 50");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run("verify --suite ground --format json").code, 0);
}

TEST(Cli, ValidationErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("nonsense").code, 1);
  EXPECT_EQ(run("expsum --modulus 7 --unknown-flag").code, 1);
  EXPECT_EQ(run("expsum --modulus 0").code, 1);
  EXPECT_EQ(run("moments --K 49 --d 1").code, 1);
  EXPECT_EQ(run("scan-primes --A 2000000").code, 1);
  EXPECT_EQ(run("count --X 5 --R 1").code, 1);
  EXPECT_EQ(run("expsum --modulus 7 --format xml").code, 1);
}

TEST(Cli, SeriesWindowAndLevel) {
  const auto r = run("series --K 4 --a-lo 0 --a-hi 1 --exact");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0,1.25,"), std::string::npos);
  EXPECT_NE(r.out.find(",5/4,"), std::string::npos);
  const auto lv = run("series --level 2 --n-max 40 --format json");
  ASSERT_EQ(lv.code, 0);
  EXPECT_GT(nlohmann::json::parse(lv.out)["euler_product"].get<double>(), 0);
}

TEST(Cli, VarianceJsonDeterministicAcrossThreads) {
  const auto a = run("variance --X 12 --K 4 --d 1 --R 2 --format json");
  const auto b = run("variance --X 12 --K 4 --d 1 --R 2 --format json --threads 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["inputs"]["X"], 12);
  EXPECT_LT(j["residuals"]["decomposition_relative"].get<double>(), 1e-6);
  EXPECT_TRUE(j["terms"].contains("sigma1"));
  EXPECT_EQ(run("variance --X 12 --K 4 --d 1 --R 2 --format json").out, a.out);
}

TEST(Cli, ConfigFileAndPrecedence) {
  const auto cfg = tmp("cubes_cli_test.cfg");
  {
    std::ofstream os(cfg);
    os << "# splus defaults\nn = 4\nd = 2\nformat = json\n";
  }
  const auto r = run("splus --config " + cfg.string() + " --d 1");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["d"], 1);
  std::filesystem::remove(cfg);
}

TEST(Cli, OutputFileAndCsvFloats) {
  const auto out = tmp("cubes_cli_density.csv");
  ASSERT_EQ(run("density --R 2 --grid 256 --output " + out.string()).code, 0);
  std::ifstream is(out);
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header, "a_tilde,value");
  int rows = 0;
  while (std::getline(is, row)) ++rows;
  EXPECT_EQ(rows, 256);
  std::filesystem::remove(out);
}

TEST(Cli, MomentsAndScans) {
  const auto m = run("moments --K 4 --d 2");
  ASSERT_EQ(m.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(m.out)["ok"].get<bool>());
  const auto p = run("scan-primes --A 100");
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(nlohmann::json::parse(p.out)["primes"], 25);
  const auto s = run("scan-exceptional --A 1000 --K 8 --eta 0.5");
  ASSERT_EQ(s.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(s.out)["terms"].contains("count"));
  EXPECT_EQ(run("gamma --a 2 --p-max 20").code, 0);
  EXPECT_EQ(run("count --X 6 --R 2 --format json").code, 0);
  EXPECT_EQ(run("sieved --X 12 --K 2 --hbar 0.5 --delta 2").code, 0);
}
