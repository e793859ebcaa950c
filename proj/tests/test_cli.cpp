#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = std::string(KLUCAS_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("klucas_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SeqText) {
  auto r = cli("seq --k 3 --from -1 --to 5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "-1 0\n0 2\n1 1\n2 3\n3 6\n4 10\n5 19\n");
}

TEST(Cli, SeqJson) {
  auto r = cli("seq --k 2 --from 0 --to 10 --json");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["terms"].size(), 11u);
  EXPECT_EQ(j["terms"][10]["value"], "123");
}

TEST(Cli, RootGoldenRatio) {
  auto r = cli("root --k 2 --digits 60 --json");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["alpha_lower"].get<std::string>().substr(0, 30), "1.6180339887498948482045868343");
}

TEST(Cli, SearchKTwoFindsElevenAndFortySeven) {
  auto r = cli("search --k-min 2 --k-max 2 --mp-max 60 --json");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> values;
  while (std::getline(in, line)) values.push_back(json::parse(line)["l_n"]);
  EXPECT_EQ(values, (std::vector<std::string>{"11", "47"}));
}

TEST(Cli, SearchResumeSkipsFinishedK) {
  std::string log = tmp("search.jsonl");
  std::filesystem::remove(log);
  auto first = cli("search --k-min 3 --k-max 5 --mp-max 40 --json --resume " + log);
  ASSERT_EQ(first.code, 0);
  EXPECT_EQ(std::count(first.out.begin(), first.out.end(), '\n'), 3);  // (4,4,1,0), (4,5,0,0), (5,4,1,0)
  auto again = cli("search --k-min 3 --k-max 6 --mp-max 40 --json --resume " + log);
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(json::parse(again.out)["k"], 6);
  EXPECT_NE(slurp(log).find("\"k_done\":6}"), std::string::npos);
  std::filesystem::remove(log);
}

TEST(Cli, BoundsChainJson) {
  auto r = cli("bounds --k 3 --json");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  ASSERT_EQ(j["certificates"].size(), 10u);
  for (const auto& c : j["certificates"]) EXPECT_EQ(c["verdict"], "sharper") << c["name"];
  auto big = json::parse(cli("bounds --k 1e6 --json").out);
  EXPECT_EQ(big["certificates"].size(), 10u);
}

TEST(Cli, BoundsLemmaP) {
  auto r = cli("bounds --k 500 --lemma-p");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("lemma_p_n"), std::string::npos);
  EXPECT_EQ(cli("bounds --k 400 --lemma-p").code, 3);
}

TEST(Cli, ReduceCf) {
  auto r = cli("reduce cf --expr 'log(2)/log(10)' --count 10");
  ASSERT_EQ(r.code, 0);
  auto q = json::parse(r.out)["quotients"];
  EXPECT_EQ(q, json::parse(R"(["0","3","3","9","2","2","4","6","2","1"])"));
}

TEST(Cli, ReduceBdPrintedInstance) {
  auto r = cli("reduce bd --gamma 'log(10)/log(2)' --mu '-log(3/4)/log(2)' --A '108/log(2)' --B 2 --M 2e56");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["success"].get<bool>());
  EXPECT_EQ(j["q"], "17974255294124444596871803224395333592038752850416569230287");
  EXPECT_LT(std::stod(j["w_bound"].get<std::string>()), 213.0);
}

TEST(Cli, ReduceBlueInstances) {
  auto a = json::parse(
      cli("reduce blue --delta 3.4e50 --S 5.1e100 --T 2.4e50 --C 5e150 --c3 28 --c4 'log(alpha(8))'").out);
  EXPECT_EQ(a["floor_H"], "343");
  auto b = cli("reduce blue --delta 1 --S 5 --T 1 --C 10 --c3 1 --c4 1");
  EXPECT_EQ(b.code, 3);
}

TEST(Cli, ReduceLll) {
  auto a1 = cli("reduce lll --instance a1 --k 3 --np 5 --m 2");
  ASSERT_EQ(a1.code, 0);
  EXPECT_TRUE(json::parse(a1.out)["applicable"].get<bool>());
  auto a2 = cli("reduce lll --instance a2 --C 4.1e690");
  EXPECT_EQ(a2.code, 3);
  auto j = json::parse(a2.out);
  EXPECT_FALSE(j["applicable"].get<bool>());
  EXPECT_EQ(j["delta"], "1");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("seq").code, 2);
  EXPECT_EQ(cli("seq --k 3 --from 5 --to 1").code, 2);
  EXPECT_EQ(cli("seq --k 1").code, 3);
  EXPECT_EQ(cli("pipeline --format xml").code, 2);
  EXPECT_EQ(cli("pipeline --k-max 2").code, 2);
  EXPECT_EQ(cli("reduce cf --expr 'log(2' --count 3").code, 2);
  EXPECT_EQ(cli("reduce lll --instance a3").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, PipelineRunAndResume) {
  std::string out = tmp("bundle.json");
  std::filesystem::remove(out);
  auto text = cli("pipeline --k-max 4 --mp-max 60 --precision 100 --format text --out " + out);
  EXPECT_EQ(text.code, 1);  // documented mismatches in the large-k branch
  EXPECT_NE(text.out.find("solutions: 2 distinct"), std::string::npos) << text.out;
  std::string first = slurp(out);
  auto lenient = cli("pipeline --k-max 4 --mp-max 60 --precision 100 --lenient --resume " + out);
  EXPECT_EQ(lenient.code, 0);
  EXPECT_EQ(lenient.out, first);
  EXPECT_EQ(cli("pipeline --k-max 5 --mp-max 60 --precision 100 --resume " + out).code, 2);
  std::filesystem::remove(out);
}
