#include "rdlab/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rd-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = rdlab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Lines that are not "# ..." comments.
std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  for (auto& l : lines(csv))
    if (l.rfind("#", 0) != 0) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rdlab-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("RD_LAB_THREADS");
  }
  void TearDown() override {
    unsetenv("RD_LAB_THREADS");
    fs::remove_all(dir_);
  }

  std::string file(const std::string& name, const std::string& content) {
    auto p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string f2() { return file("f2.json", R"j({"type":"free","rank":2})j"); }
  std::string z() { return file("z.json", R"j({"type":"weighted_abelian","weights":[1]})j"); }
  std::string pentagon() {
    return file("pentagon.json", R"j({"type":"graph_product","vertices":5,
      "edges":[[0,1],[1,2],[2,3],[3,4],[4,0]],
      "vertex_groups":[{"type":"free","rank":1},{"type":"free","rank":1},{"type":"free","rank":1},
                       {"type":"free","rank":1},{"type":"free","rank":1}]})j");
  }

  fs::path dir_;
};

}  // namespace

// ---------------------------------------------------------------------------
// ball

TEST_F(Cli, BallWritesSeventeenRows) {
  auto out = path("ball.csv");
  auto r = run({"ball", "--group", f2(), "--radius", "2", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  auto content = slurp(out);
  auto rows = data_lines(content);
  ASSERT_EQ(rows.size(), 18u);
  EXPECT_EQ(rows[0], "element,length");
  EXPECT_EQ(rows[1], "1,0");
  EXPECT_NE(content.find("# command=ball\n"), std::string::npos);
  EXPECT_NE(content.find("# element_cap="), std::string::npos);
  EXPECT_EQ(content.find("# config_digest=none"), std::string::npos);
  // No temporary file is left behind.
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++files;
  EXPECT_EQ(files, 2u);
}

TEST_F(Cli, BallToStdoutMatchesFile) {
  auto g = f2();
  auto out = path("ball.csv");
  ASSERT_EQ(run({"ball", "--group", g, "--radius", "3", "--out", out}).code, 0);
  auto r = run({"ball", "--group", g, "--radius", "3"});
  EXPECT_EQ(r.out, slurp(out));
}

TEST_F(Cli, BallBudgetIsUsageError) {
  auto r = run({"ball", "--group", f2(), "--radius", "10", "--cap", "100"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(lines(r.err).size(), 1u);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
  EXPECT_EQ(run({"ball", "--group", f2(), "--radius", "1", "--cap", "0"}).code, 2);
}

// ---------------------------------------------------------------------------
// config errors

TEST_F(Cli, MalformedConfigsExitTwoWithOneLine) {
  struct Case {
    std::string name, json;
  } cases[] = {
      {"half.json", R"j({"type":"weighted_abelian","weights":[1, 0.5]})j"},
      {"dup.json", R"j({"type":"graph_product","vertices":2,"edges":[[0,1],[1,0]],
          "vertex_groups":[{"type":"free","rank":1},{"type":"free","rank":1}]})j"},
      {"broken.json", R"j({"type":"free","rank":)j"},
      {"unknown.json", R"j({"type":"free","rank":2,"colour":"red"})j"},
      {"many.json", R"j({"type":"weighted_abelian","weights":[0, -1, "x"]})j"},
  };
  for (const auto& c : cases) {
    auto r = run({"ball", "--group", file(c.name, c.json), "--radius", "1"});
    EXPECT_EQ(r.code, 2) << c.name;
    EXPECT_EQ(lines(r.err).size(), 1u) << c.name << ": " << r.err;
    EXPECT_EQ(r.err.rfind("rd-lab: ", 0), 0u) << c.name;
    EXPECT_TRUE(r.out.empty());
  }
  auto r = run({"ball", "--group", path("missing.json"), "--radius", "1"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, SeveralSchemaIssuesAreItemized) {
  auto r = run({"ball", "--group", file("many.json", R"j({"type":"weighted_abelian","weights":[0, -1, "x"]})j"), "--radius", "1"});
  EXPECT_NE(r.err.find("/weights/0"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("/weights/1"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("/weights/2"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"ball", "--radius", "1"}).code, 2);
  EXPECT_EQ(run({"ball", "--group", f2(), "--radius", "abc"}).code, 2);
  EXPECT_EQ(run({"centroid-check", "--group", f2(), "--mode", "c9", "--radius", "1", "--fixed", "a1"}).code, 2);
  auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("counterexample"), std::string::npos);
}

// ---------------------------------------------------------------------------
// RD_LAB_THREADS

TEST_F(Cli, ThreadVariable) {
  auto g = f2();
  setenv("RD_LAB_THREADS", "0", 1);
  EXPECT_EQ(run({"ball", "--group", g, "--radius", "1"}).code, 2);
  setenv("RD_LAB_THREADS", "many", 1);
  auto bad = run({"ball", "--group", g, "--radius", "1"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("RD_LAB_THREADS"), std::string::npos);
  setenv("RD_LAB_THREADS", "3", 1);
  auto three = run({"rd-scan", "--group", g, "--rmax", "2", "--seed", "5", "--trials", "4"});
  unsetenv("RD_LAB_THREADS");
  auto one = run({"rd-scan", "--group", g, "--rmax", "2", "--seed", "5", "--trials", "4"});
  EXPECT_EQ(three.code, 0);
  EXPECT_EQ(three.out, one.out);
}

// ---------------------------------------------------------------------------
// rd-scan

TEST_F(Cli, ScanAtRadiusZero) {
  auto r = run({"rd-scan", "--group", f2(), "--rmax", "0", "--sampler", "ball"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "r,sampler,max_ratio,bound,pass");
  EXPECT_EQ(rows[1], "0,ball,1,,");
  EXPECT_NE(r.out.find("# seed=0\n"), std::string::npos);
  EXPECT_NE(r.out.find("# config_digest="), std::string::npos);
}

TEST_F(Cli, ScanIsByteStablePerSeed) {
  auto g = f2();
  auto a = path("a.csv"), b = path("b.csv");
  std::vector<std::string> common{"rd-scan", "--group", g, "--rmax", "2", "--seed", "1234", "--psi-radius", "1", "--trials", "5"};
  auto args_a = common, args_b = common;
  args_a.insert(args_a.end(), {"--out", a});
  args_b.insert(args_b.end(), {"--out", b});
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a).find("# seed=1234\n"), std::string::npos);
  EXPECT_NE(slurp(a).find("# psi_domain=ball(1)\n"), std::string::npos);
}

TEST_F(Cli, ScanBoundPassAndFail) {
  auto ok = run({"rd-scan", "--group", f2(), "--rmax", "2", "--bound", "1,3,3,1", "--sampler", "sphere"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  auto rows = data_lines(ok.out);
  EXPECT_EQ(rows[2], "1,sphere,1.75,8,true");
  auto fail = run({"rd-scan", "--group", z(), "--rmax", "3", "--bound", "1", "--sampler", "ball"});
  EXPECT_EQ(fail.code, 1);
  EXPECT_NE(fail.out.find(",false"), std::string::npos);
  EXPECT_EQ(run({"rd-scan", "--group", z(), "--rmax", "1", "--bound", "1,-1"}).code, 2);
  EXPECT_EQ(run({"rd-scan", "--group", z(), "--rmax", "1", "--sampler", "gaussian"}).code, 2);
}

// ---------------------------------------------------------------------------
// conv

TEST_F(Cli, ConvOnIntegers) {
  auto phi = file("phi.json", R"j({"entries":[{"element":"(-1)","value":1},{"element":"(0)","value":1},{"element":"(1)","value":1}]})j");
  std::string psi_text = R"j({"entries":[)j";
  for (int i = 0; i <= 9; ++i) psi_text += std::string(i ? "," : "") + "{\"element\":\"(" + std::to_string(i) + ")\",\"value\":1}";
  psi_text += "]}";
  auto psi = file("psi.json", psi_text);
  auto r = run({"conv", "--group", z(), "--phi", phi, "--psi", psi});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["rd_ratio"].get<double>(), 82.0 / 30.0);
  EXPECT_EQ(j["result_l2_squared"].get<double>(), 82.0);
  EXPECT_EQ(j["phi_propagation"], "1");
  EXPECT_EQ(j["result"]["entries"].size(), 12u);
  EXPECT_EQ(j["meta"]["command"], "conv");
}

TEST_F(Cli, ConvRelativeToACliqueMatchesFullOnSubgroupSupport) {
  auto g = pentagon();
  auto phi = file("phi.json", R"j({"entries":[{"element":"v0:a","value":1},{"element":"v1:a^2","value":2}]})j");
  auto psi = file("psi.json", R"j({"entries":[{"element":"v0:a^-1 | v1:a","value":1},{"element":"1","value":3}]})j");
  auto all = run({"conv", "--group", g, "--phi", phi, "--psi", psi});
  auto rel = run({"conv", "--group", g, "--phi", phi, "--psi", psi, "--triples", "clique:0,1"});
  ASSERT_EQ(all.code, 0) << all.err;
  ASSERT_EQ(rel.code, 0) << rel.err;
  EXPECT_EQ(nlohmann::json::parse(all.out)["result"], nlohmann::json::parse(rel.out)["result"]);
  EXPECT_EQ(run({"conv", "--group", g, "--phi", phi, "--psi", psi, "--triples", "clique:0,2"}).code, 2);
  EXPECT_EQ(run({"conv", "--group", g, "--phi", phi, "--psi", psi, "--triples", "clique:7"}).code, 2);
  EXPECT_EQ(run({"conv", "--group", g, "--phi", phi, "--psi", psi, "--triples", "some"}).code, 2);
}

TEST_F(Cli, ConvRejectsBadFunctions) {
  auto g = z();
  auto good = file("good.json", R"j({"entries":[{"element":"(0)","value":1}]})j");
  for (std::string bad : {R"j({"entries":[{"element":"(0)","value":-1}]})j", R"j({"entries":[{"element":"(0)","value":1}],"x":1})j",
                          R"j({"entries":[{"element":"(0)","value":1},{"element":"(0)","value":2}]})j",
                          R"j({"entries":[{"element":"(0,1)","value":1}]})j", R"j({"entries":)j"}) {
    auto r = run({"conv", "--group", g, "--phi", file("bad.json", bad), "--psi", good});
    EXPECT_EQ(r.code, 2) << bad;
    EXPECT_EQ(lines(r.err).size(), 1u) << r.err;
  }
}

// ---------------------------------------------------------------------------
// centroid-check and rc-check

TEST_F(Cli, CentroidCheck) {
  auto g = f2();
  auto r = run({"centroid-check", "--group", g, "--mode", "c1", "--radius", "2", "--fixed", "a1 a2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "mode,fixed_element,radius,count,stabilized");
  EXPECT_EQ(rows[1], "c1,a1 a2,2,3,");
  EXPECT_EQ(run({"centroid-check", "--group", g, "--mode", "c1", "--radius", "2", "--fixed", "a1 a2", "--bound", "1,1"}).code, 0);
  EXPECT_EQ(run({"centroid-check", "--group", g, "--mode", "c1", "--radius", "2", "--fixed", "a1 a2", "--bound", "1"}).code, 1);

  auto c2 = run({"centroid-check", "--group", g, "--mode", "c2", "--radius", "5", "--fixed-radius", "2", "--bound", "1,1"});
  EXPECT_EQ(c2.code, 0) << c2.err;
  auto c2rows = data_lines(c2.out);
  EXPECT_EQ(c2rows.size(), 18u);
  for (std::size_t i = 1; i < c2rows.size(); ++i) EXPECT_NE(c2rows[i].find(",true"), std::string::npos) << c2rows[i];

  EXPECT_EQ(run({"centroid-check", "--group", g, "--mode", "c3", "--radius", "3", "--fixed-radius", "1", "--bound", "1,1"}).code, 0);
  EXPECT_EQ(run({"centroid-check", "--group", g, "--mode", "c1", "--radius", "2"}).code, 2);
  EXPECT_EQ(run({"centroid-check", "--group", z(), "--mode", "c1", "--radius", "2", "--fixed", "(1)"}).code, 2);
}

TEST_F(Cli, RcCheck) {
  auto g = pentagon();
  auto rc4 = run({"rc-check", "--group", g, "--mode", "rc4", "--radius", "4", "--fixed-radius", "2"});
  ASSERT_EQ(rc4.code, 0) << rc4.err;
  EXPECT_EQ(data_lines(rc4.out).size(), 12u);
  auto rc1 = run({"rc-check", "--group", g, "--mode", "rc1", "--radius", "0", "--fixed", "v0:a | v2:a^-1"});
  ASSERT_EQ(rc1.code, 0) << rc1.err;
  EXPECT_EQ(data_lines(rc1.out)[1], "rc1,v0:a | v2:a^-1,0,1,");
  auto rc3 = run({"rc-check", "--group", g, "--mode", "rc3", "--radius", "2", "--fixed", "1"});
  EXPECT_EQ(data_lines(rc3.out)[1], "rc3,1,2,1,");
  auto rc2 = run({"rc-check", "--group", g, "--mode", "rc2", "--radius", "2", "--fixed", "v1:a"});
  EXPECT_EQ(rc2.code, 0);
  EXPECT_EQ(run({"rc-check", "--group", f2(), "--mode", "rc1", "--radius", "1", "--fixed", "a1"}).code, 2);
}

// ---------------------------------------------------------------------------
// expansion

TEST_F(Cli, ExpansionFromElementLists) {
  auto S = file("S.json", R"j({"elements":["(0)","(1)"]})j");
  auto r = run({"expansion", "--group", z(), "--S", S, "--X", S, "--poly", "1,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["S"], 2);
  EXPECT_EQ(j["X"], 2);
  EXPECT_EQ(j["SX"], 3);
  EXPECT_EQ(j["bound"], 2.0);
  EXPECT_EQ(j["verdict"], "satisfies");
  for (const char* key : {"S", "X", "SX", "bound", "verdict"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(Cli, ExpansionFromBalls) {
  auto r = run({"expansion", "--group", f2(), "--s-radius", "1", "--x-radius", "2", "--poly", "1,3,3,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["S"], 5);
  EXPECT_EQ(j["X"], 17);
  EXPECT_EQ(j["SX"], 53);
  EXPECT_EQ(j["verdict"], "satisfies");
  EXPECT_EQ(run({"expansion", "--group", f2(), "--x-radius", "2", "--poly", "1"}).code, 2);
  auto S = file("S.json", R"j({"elements":["a1"]})j");
  EXPECT_EQ(run({"expansion", "--group", f2(), "--S", S, "--s-radius", "1", "--x-radius", "1", "--poly", "1"}).code, 2);
  auto bad = file("bad.json", R"j(["a1"])j");
  EXPECT_EQ(run({"expansion", "--group", f2(), "--S", bad, "--x-radius", "1", "--poly", "1"}).code, 2);
}

// ---------------------------------------------------------------------------
// counterexample

TEST_F(Cli, CounterexampleWritesViolation) {
  auto out = path("demo.json");
  auto r = run({"counterexample", "--n", "3", "--poly", "0,0,1", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["verdict"], "violates");
  EXPECT_EQ(j["S"], 4089);
  EXPECT_LE(j["SX"].get<std::uint64_t>(), 2 * j["X"].get<std::uint64_t>());
  EXPECT_NE(j["meta"]["config_digest"], "none");
  EXPECT_EQ(j["meta"]["caps"]["point_cap"], "3000000");
}

TEST_F(Cli, CounterexampleErrors) {
  EXPECT_EQ(run({"counterexample", "--n", "1", "--poly", "0,0,1"}).code, 2);
  EXPECT_EQ(run({"counterexample", "--n", "0", "--poly", "1"}).code, 2);
  EXPECT_EQ(run({"counterexample", "--n", "3", "--poly", "0,0,1", "--point-cap", "1000"}).code, 2);
  // Below the threshold there is no witness.
  auto early = run({"counterexample", "--n", "3", "--poly", "0,0,1", "--radius", "30"});
  EXPECT_EQ(early.code, 1);
}

// ---------------------------------------------------------------------------
// opnorm

TEST_F(Cli, OpnormDefaultsToGenerators) {
  auto r = run({"opnorm", "--group", z(), "--window", "5", "--window", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["estimates"].size(), 2u);
  double a = j["estimates"][0]["estimate"], b = j["estimates"][1]["estimate"];
  EXPECT_LE(a, b);
  EXPECT_GE(a, std::sqrt(2.0));
  EXPECT_LE(b, 2.0);
  EXPECT_EQ(j["phi"]["entries"].size(), 2u);
  EXPECT_EQ(run({"opnorm", "--group", z(), "--window", "5", "--max-iters", "0"}).code, 2);
  EXPECT_EQ(run({"opnorm", "--group", z()}).code, 2);
}

TEST_F(Cli, ProductGroupBallCsvQuotesCommas) {
  auto g = file("z2.json", R"j({"type":"weighted_abelian","weights":[1,"3/2"]})j");
  auto r = run({"ball", "--group", g, "--radius", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = data_lines(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1], "\"(0,0)\",0");
}
