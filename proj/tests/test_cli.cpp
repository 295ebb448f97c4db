#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "standbyrel/cli.hpp"

using standbyrel::cli::run;

namespace {

struct Output {
  int code;
  std::string out;
  std::string err;
};

Output invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      row.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, EvalSinglePoint) {
  const auto r = invoke({"eval", "--warm", "1,1,1", "--t", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "phi", "f", "r"}));
  EXPECT_NEAR(std::stod(rows[1][1]), 0.6651433193661932, 1e-15);
}

TEST(Cli, EvalJsonRoundTrip) {
  const auto r = invoke({"eval", "--cold", "1,1", "--grid", "0,5,11,lin", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["command"], "eval");
  ASSERT_EQ(j["t"].size(), 11u);
  EXPECT_NEAR(j["phi"][2].get<double>(), 0.7866455993033681, 1e-15);
  const auto c = invoke({"eval", "--cold", "1,1", "--grid", "0,5,11,lin"});
  EXPECT_EQ(std::stod(csv(c.out)[3][1]), j["phi"][2].get<double>());
}

TEST(Cli, EvalGeneralMethodsAgree) {
  const std::vector<std::string> base{"eval", "--x1", "exp:1", "--x2", "exp:1", "--y1", "exp:1", "--y2", "exp:1",
                                      "--grid", "0,10,21,lin"};
  auto lap = base, vol = base;
  lap.insert(lap.end(), {"--method", "laplace"});
  vol.insert(vol.end(), {"--method", "volterra"});
  const auto a = csv(invoke(lap).out), b = csv(invoke(vol).out);
  ASSERT_EQ(a.size(), 22u);
  ASSERT_EQ(b.size(), 22u);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_NEAR(std::stod(a[i][1]), std::stod(b[i][1]), 1e-6);
}

TEST(Cli, CompareLrPair) {
  const auto r = invoke({"compare", "--warm", "1,1,1", "--warm", "2,2,1", "--rel", "lr"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"lr", "holds", "warm_lr_iff", "holds", "true"}));
}

TEST(Cli, CompareRepairOnlyPair) {
  const auto r = invoke({"compare", "--warm", "1,1,2", "1,1,1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["verdicts"].size(), 5u);
  for (const auto& v : j["verdicts"]) {
    if (v["relation"] == "hr") EXPECT_EQ(v["numeric"], "holds");
    if (v["relation"] == "lr") {
      EXPECT_EQ(v["numeric"], "fails");
      EXPECT_TRUE(v["witness"].is_number());
    }
    if (!v["agree"].is_null()) EXPECT_TRUE(v["agree"].get<bool>());
  }
}

TEST(Cli, MttfAndAllocate) {
  const std::vector<std::string> sys{"--x1", "exp:1", "--x2", "exp:2", "--y1", "det:0.4", "--y2", "det:1"};
  auto m = std::vector<std::string>{"mttf", "--format", "json"};
  m.insert(m.end(), sys.begin(), sys.end());
  const auto r = invoke(m);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["mean"]["tau0"].get<double>(), 2.13733, 5e-6);
  EXPECT_NEAR(j["mean"]["tau3"].get<double>(), 1.91840, 5e-6);

  auto a = std::vector<std::string>{"allocate"};
  a.insert(a.end(), sys.begin(), sys.end());
  const auto rows = csv(invoke(a).out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "tau0");
  ASSERT_EQ(rows[1].size(), rows[0].size());
  EXPECT_EQ(rows[1][5], "true");
  EXPECT_EQ(rows[1][6], "mean_and_race_dominance+exp_det_repair_ratio");
}

TEST(Cli, SimulateJson) {
  const auto r = invoke({"simulate", "--cold", "1,2", "--n", "2000", "--seed", "4", "--shards", "2", "--format",
                         "json", "--grid", "0,4,5,lin"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 2000);
  EXPECT_EQ(j["survival"]["value"].size(), 5u);
  EXPECT_EQ(j["survival"]["value"][0], 1.0);
  const auto again = invoke({"simulate", "--cold", "1,2", "--n", "2000", "--seed", "4", "--shards", "2", "--format",
                             "json", "--grid", "0,4,5,lin"});
  EXPECT_EQ(r.out, again.out);
}

TEST(Cli, AgingAndAudit) {
  EXPECT_EQ(invoke({"aging", "--warm", "1,0.5,2"}).code, 0);
  const auto star = invoke({"aging", "--cold", "1,2", "--star", "--format", "json"});
  ASSERT_EQ(star.code, 0);
  EXPECT_EQ(nlohmann::json::parse(star.out)["certificates"][0]["class"], "DLR");
  const auto audit = invoke({"audit", "--warm", "1,1,1", "2,2,1"});
  EXPECT_EQ(audit.code, 0) << audit.err;
  EXPECT_EQ(csv(audit.out).size(), 6u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"eval", "--warm", "0,1,1"}).code, 2);
  EXPECT_EQ(invoke({"eval", "--warm", "1,1"}).code, 2);
  EXPECT_EQ(invoke({"compare", "--warm", "1,1,1"}).code, 2);
  EXPECT_EQ(invoke({"compare", "--warm", "1,1,1", "1,1,1", "--rel", "xyz"}).code, 2);
  EXPECT_EQ(invoke({"bogus"}).code, 2);
  EXPECT_EQ(invoke({"mttf", "--x1", "exp:1", "--x2", "exp:1", "--y1", "det:0", "--y2", "det:0"}).code, 2);
  EXPECT_EQ(invoke({"eval", "--warm", "1,1,1", "--grid", "1,0,3,lin"}).code, 2);
  EXPECT_EQ(invoke({"eval", "--warm", "1,1,1", "--format", "xml"}).code, 2);
}

TEST(Cli, ZeroRepairWarns) {
  const auto r = invoke({"mttf", "--x1", "exp:1", "--x2", "exp:1", "--y1", "det:0", "--y2", "exp:1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}
