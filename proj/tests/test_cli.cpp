#include <gtest/gtest.h>
#include "json.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs a shell command line; stderr is discarded.
Outcome cli_raw(const std::string& line) {
  const std::string cmd = "{ " + line + " ; } 2>/dev/null";
  Outcome r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Outcome cli(const std::string& args) { return cli_raw(std::string(BLCS_CLI_PATH) + " " + args); }

nlohmann::json json_of(const Outcome& r) { return nlohmann::json::parse(r.out); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ApproxSmallPair) {
  const Outcome r = cli("approx --x-str 0011 --y-str 0101");
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r);
  EXPECT_EQ(j["trivial"], 2);
  EXPECT_GE(j["bound"].get<int>(), 2);
  EXPECT_LE(j["bound"].get<int>(), 3);
  EXPECT_EQ(j["params_profile"], "desk");
  EXPECT_TRUE(j.contains("case_trace"));
  EXPECT_TRUE(j.contains("block_width"));
}

TEST(Cli, ExactAndTrivial) {
  Outcome r = cli("exact --x-str 0011 --y-str 0101");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json_of(r)["exact"], 3);
  r = cli("trivial --x-str 0011 --y-str 0001");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json_of(r)["trivial"], 2);
}

TEST(Cli, ClassifyConstantString) {
  const Outcome r = cli("classify --x-str " + std::string(1024, '0'));
  ASSERT_EQ(r.code, 0);
  const auto blocks = json_of(r)["blocks"];
  ASSERT_FALSE(blocks.empty());
  for (const auto& b : blocks) {
    EXPECT_EQ(b["kind"], "coarse");
    EXPECT_EQ(b["bit"], 0);
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("approx --x-str 01 --x-file - --y-str 01").code, 2);
  EXPECT_EQ(cli("approx --x-str 0a1 --y-str 01").code, 2);
  EXPECT_EQ(cli("approx --x-str 01 --y-str 01 --set bogus=1").code, 2);
  EXPECT_EQ(cli("approx --x-str 01 --y-str 01 --set eps=one").code, 2);
  EXPECT_EQ(cli("no-such-command").code, 2);
}

TEST(Cli, ContractErrorExitsOne) {
  EXPECT_EQ(cli("cover --x-str 0111 --y-str 0101").code, 1);
}

TEST(Cli, GenPipesIntoApprox) {
  const std::string cmd = std::string(BLCS_CLI_PATH) + " gen --spec 'uniform(1/2)' --length 300 --seed 4 | " +
                          BLCS_CLI_PATH + " approx --x-file - --y-str " + std::string(150, '0') +
                          std::string(150, '1') + " --check-exact";
  const Outcome r = cli_raw(cmd);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json_of(r);
  EXPECT_LE(j["trivial"].get<int>(), j["bound"].get<int>());
}

TEST(Cli, GenIsDeterministic) {
  const Outcome a = cli("gen --spec 'periodic(4,1/10)' --length 64 --seed 9");
  const Outcome b = cli("gen --spec 'periodic(4,1/10)' --length 64 --seed 9");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const Outcome bal = cli("gen --spec 'uniform(1/3)' --length 64 --seed 9 --balance");
  ASSERT_EQ(bal.code, 0);
  std::size_t ones = 0, bits = 0;
  for (char c : bal.out) {
    if (c == '0' || c == '1') ++bits;
    if (c == '1') ++ones;
  }
  EXPECT_EQ(bits, 64u);
  EXPECT_EQ(ones, 32u);
}

TEST(Cli, CoverDumpMatchesGolden) {
  // Same commands as tools/make_golden.sh, first fixture only.
  const std::filesystem::path dir = BLCS_GOLDEN_DIR;
  std::ifstream fx(dir / "fixtures.txt");
  std::string line;
  while (std::getline(fx, line) && (line.empty() || line[0] == '#')) {
  }
  ASSERT_FALSE(line.empty());
  std::istringstream ls(line);
  std::string name, xspec, xlen, xseed, yspec, ylen, yseed, extra, word;
  ASSERT_TRUE(ls >> name >> xspec >> xlen >> xseed >> yspec >> ylen >> yseed) << line;
  while (ls >> word) extra += " " + word;
  const Outcome x = cli("gen --spec '" + xspec + "' --length " + xlen + " --seed " + xseed + " --balance");
  const Outcome y = cli("gen --spec '" + yspec + "' --length " + ylen + " --seed " + yseed);
  ASSERT_EQ(x.code, 0);
  ASSERT_EQ(y.code, 0);
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
  };
  const Outcome dump = cli("cover --dump --x-str " + strip(x.out) + " --y-str " + strip(y.out) + extra);
  ASSERT_EQ(dump.code, 0);
  EXPECT_EQ(dump.out, slurp(dir / (name + ".csv")));
}
