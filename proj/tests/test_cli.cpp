#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "covol/cli.hpp"

using namespace covol;
using covol::cli::json;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int s = cli::run(args, out, err);
  return {s, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + "covol_cli_" + name; }

json load(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_float(const json& j) {
  if (j.is_number_float()) return true;
  if (j.is_structured())
    for (const auto& e : j)
      if (has_float(e)) return true;
  return false;
}

int binary_status(const std::string& args) {
  int rc = std::system((std::string(COVOLUME_BIN) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Cli, ParseRational) {
  EXPECT_EQ(cli::parse_rational("123"), 123);
  EXPECT_EQ(cli::parse_rational("-7/2"), mpq_class(-7, 2));
  EXPECT_EQ(cli::parse_rational("1e14"), mpq_class(100000000000000L));
  EXPECT_EQ(cli::parse_rational("0.5"), mpq_class(1, 2));
  EXPECT_EQ(cli::parse_rational("1e-5"), mpq_class(1, 100000));
  EXPECT_EQ(cli::parse_rational("2^10"), 1024);
  for (const char* bad : {"", "x", "1/0", "2^-1", "1e", "--3"}) EXPECT_THROW(cli::parse_rational(bad), PreconditionError) << bad;
}

TEST(Cli, IdealsCountOverQ) {
  auto path = tmp("ideals.json");
  auto r = run({"ideals", "count", "--disc", "0", "--limit", "10", "--oracle", "--json", path});
  EXPECT_EQ(r.status, 0) << r.err;
  auto j = load(path);
  EXPECT_EQ(j["result"]["count"], 7);
  EXPECT_EQ(j["result"]["oracle"], 7);
  EXPECT_NE(r.out.find("count"), std::string::npos);
  EXPECT_NE(r.out.find("time"), std::string::npos);
  EXPECT_FALSE(j.contains("time"));  // timing only in the human output
}

TEST(Cli, CovolumeOfSplitA2) {
  auto path = tmp("cov.json");
  auto r = run({"covolume", "--family", "A", "--rank", "2", "--disc", "1", "--precision", "64", "--json", path});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = load(path);
  EXPECT_EQ(j["config"]["precision"], 64);
  const std::string mid = j["result"]["volume"]["total"]["mid"];
  EXPECT_NEAR(std::stod(mid), 4.0384e-4, 1e-8);
  EXPECT_LT(std::stod(j["result"]["volume"]["total"]["radius"].get<std::string>()), 1e-40);
  EXPECT_TRUE(j["result"]["volume"]["audit"].get<bool>());
  EXPECT_FALSE(has_float(j));
}

TEST(Cli, FieldsEnumAndCacheRoundTrip) {
  auto cache = tmp("fields.txt");
  auto path = tmp("fields.json");
  auto r = run({"fields", "enum", "--max-disc", "10", "--cache", cache, "--json", path});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(load(path)["result"]["records"], 6);
  EXPECT_EQ(slurp(cache), "-3,0,1,\n-4,0,1,\n5,2,0,\n-7,0,1,\n-8,0,1,\n8,2,0,\n");
  auto v = run({"fields", "verify-cache", "--cache", cache});
  EXPECT_EQ(v.status, 0) << v.err;
}

TEST(Cli, CacheErrorsCarryLineNumbers) {
  auto bad = tmp("bad.txt");
  std::ofstream(bad) << "-3,0,1,1\n9,2,0,\n";
  auto r = run({"fields", "verify-cache", "--cache", bad});
  EXPECT_EQ(r.status, 65);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  auto order = tmp("order.txt");
  std::ofstream(order) << "-4,0,1,1\n-3,0,1,1\n";
  EXPECT_EQ(run({"fields", "verify-cache", "--cache", order}).status, 65);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"nonsense"}).status, 64);
  EXPECT_EQ(run({}).status, 64);
  EXPECT_EQ(run({"ideals", "count", "--disc", "0"}).status, 64);                      // missing --limit
  EXPECT_EQ(run({"ideals", "count", "--disc", "0", "--limit", "ten"}).status, 64);    // malformed value
  EXPECT_EQ(run({"covolume", "--family", "A", "--rank", "1", "--disc", "0"}).status, 2);
  EXPECT_EQ(run({"covolume", "--family", "Z", "--rank", "2", "--disc", "0"}).status, 2);
  EXPECT_EQ(run({"ideals", "count", "--disc", "12", "--limit", "10"}).status, 0);     // 12 is fundamental
  EXPECT_EQ(run({"ideals", "count", "--disc", "9", "--limit", "10"}).status, 2);
  EXPECT_EQ(run({"census", "pigeonhole", "--x", "9", "--family", "A", "--rank", "2"}).status, 2);
  EXPECT_EQ(run({"--help"}).status, 0);
  // the installed binary maps the same way
  EXPECT_EQ(binary_status("nonsense"), 64);
  EXPECT_EQ(binary_status("ideals count --disc 0 --limit 10"), 0);
  EXPECT_EQ(binary_status("covolume --family A --rank 1 --disc 0"), 2);
}

TEST(Cli, HelpMentionsRationalMarker) {
  auto r = run({"--help"});
  EXPECT_NE(r.out.find("--disc 0"), std::string::npos);
}

TEST(Cli, PrecisionFromEnvironment) {
  auto path = tmp("env.json");
  ::setenv("COVOLUME_PRECISION", "45", 1);
  auto r = run({"--json", path, "ideals", "count", "--disc", "-4", "--limit", "50"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(load(path)["config"]["precision"], 45);
  // explicit flag wins
  run({"--json", path, "--precision", "20", "ideals", "count", "--disc", "-4", "--limit", "50"});
  EXPECT_EQ(load(path)["config"]["precision"], 20);
  ::setenv("COVOLUME_PRECISION", "abc", 1);
  EXPECT_EQ(run({"ideals", "count", "--disc", "0", "--limit", "5"}).status, 64);
  ::unsetenv("COVOLUME_PRECISION");
}

TEST(Cli, ShardedReportsAreByteIdentical) {
  for (const std::vector<std::string>& base : {std::vector<std::string>{"fields", "enum", "--max-disc", "3000", "--class-numbers"},
                                                std::vector<std::string>{"census", "grid", "--family", "A", "--rank", "2",
                                                                         "--mode", "uniform"}}) {
    std::string first;
    for (const char* shards : {"1", "2", "8"}) {
      auto path = tmp(std::string("shard") + shards + ".json");
      auto args = base;
      args.insert(args.end(), {"--shards", shards, "--json", path});
      ASSERT_EQ(run(args).status, 0);
      auto text = slurp(path);
      if (first.empty()) first = text;
      EXPECT_EQ(text, first) << base[0] << " shards " << shards;
    }
  }
}

TEST(Cli, ReplayReproducesPayload) {
  auto path = tmp("replay.json");
  ASSERT_EQ(run({"census", "upper", "--x", "2^24", "--family", "G2", "--rank", "2", "--json", path}).status, 0);
  auto j = load(path);
  std::vector<std::string> args;
  for (const auto& a : j["command"]) args.push_back(a);
  auto again = tmp("replay2.json");
  args.insert(args.end(), {"--json", again});
  ASSERT_EQ(run(args).status, 0);
  EXPECT_EQ(slurp(path), slurp(again));
  EXPECT_TRUE(j["config"]["constants"].contains("c19"));
  EXPECT_FALSE(has_float(j));
}

TEST(Cli, CensusAndBounds) {
  auto path = tmp("lower.json");
  ASSERT_EQ(run({"census", "lower", "--x", "1e14", "--base", "1", "--family", "G2", "--rank", "2", "--disc", "0", "--json", path}).status, 0);
  EXPECT_EQ(load(path)["result"]["count"], 6);
  ASSERT_EQ(run({"census", "pigeonhole", "--x", "10", "--family", "A", "--rank", "2", "--json", path}).status, 0);
  auto p = load(path)["result"];
  EXPECT_EQ(p["N"], 6);
  EXPECT_TRUE(p["all_hold"].get<bool>());
  ASSERT_EQ(run({"bound", "index", "--family", "A", "--rank", "2", "--disc", "0", "--num-s", "1", "--json", path}).status, 0);
  EXPECT_EQ(load(path)["result"]["exact"], 54);
  ASSERT_EQ(run({"bound", "b-lower", "--family", "G2", "--rank", "2", "--disc", "-3", "--scan", "500", "--json", path}).status, 0);
  EXPECT_TRUE(load(path)["result"]["scan"]["prefix"].get<bool>());
  ASSERT_EQ(run({"bound", "class-number", "--family", "A", "--rank", "2", "--disc", "0", "--json", path}).status, 0);
  EXPECT_EQ(load(path)["config"]["mu0"]["den"], "100000");
  ASSERT_EQ(run({"lie", "show", "E8", "8", "--json", path}).status, 0);
  EXPECT_EQ(load(path)["result"]["type"]["dim"], 248);
}

TEST(Cli, AppendixVerify) {
  auto path = tmp("apx.json");
  auto r = run({"appendix", "verify", "--poly-file", CORPUS_FILE, "--quadratic-max", "200", "--json", path});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = load(path)["result"];
  EXPECT_EQ(j["fields"].size(), 20u);
  EXPECT_EQ(j["passed"], j["total"]);
  EXPECT_EQ(run({"appendix", "verify"}).status, 2);
  auto bad = tmp("red.txt");
  std::ofstream(bad) << "1 0 -1\n";
  EXPECT_EQ(run({"appendix", "verify", "--poly-file", bad}).status, 2);
}
