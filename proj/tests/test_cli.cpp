#include "dirac/serialize.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dirac;
namespace fs = std::filesystem;

namespace {

const std::string kData = DIRAC_TEST_DATA;

struct Outcome {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("dirac_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const fs::path out = dir_ / "stdout", err = dir_ / "stderr";
    const std::string cmd = std::string(DIRAC_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckIsDeterministicAndPasses) {
  const Outcome a = run("check --seed 42 --output " + path("a.json"));
  const Outcome b = run("check --seed 42 --output " + path("b.json"));
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0);
  const std::string ja = slurp(path("a.json"));
  EXPECT_EQ(ja, slurp(path("b.json")));
  const json report = json::parse(ja);
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_GE(report["suites"].size(), 8u);
  for (const auto& s : report["suites"]) {
    EXPECT_TRUE(s["passed"].get<bool>()) << s["name"];
    EXPECT_EQ(s["instances"], 100);
  }
}

TEST_F(Cli, CheckFailureExitsWithOne) {
  const Outcome r = run("check --seed 1 --instances 5 --tol 1e-30");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(json::parse(r.out)["passed"].get<bool>());
  EXPECT_NE(r.err.find("failed"), std::string::npos);
}

TEST_F(Cli, CheckClassifiesStructureFiles) {
  const Outcome r = run("check --instances 1 --structure " + kData + "/series_closure.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(r.out);
  ASSERT_EQ(report["structures"].size(), 1u);
  EXPECT_EQ(report["structures"][0]["class"], "dirac");
}

TEST_F(Cli, CorruptedStructureIsAUsageError) {
  std::ofstream(path("bad.json")) << R"({"n": 2, "span": {"ambient_dim": 4, "basis": [[1, 0, 0]]}})";
  EXPECT_EQ(run("check --instances 1 --structure " + path("bad.json")).code, 2);
  std::ofstream(path("garbage.json")) << "{not json";
  EXPECT_EQ(run("check --instances 1 --structure " + path("garbage.json")).code, 2);
  EXPECT_EQ(run("check --structure " + path("absent.json")).code, 2);
}

TEST_F(Cli, ComposeReproducesGoldenFixture) {
  const std::string c = kData + "/compose/";
  const Outcome r = run("compose --da " + c + "da.json --db " + c + "db.json --di " + c +
                    "di.json --u1 2 --u2 2 --v1 1 --v2 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const LinearStructure got = structure_from_json(json::parse(r.out));
  const LinearStructure golden = read_structure(c + "golden.json");
  EXPECT_TRUE(got.is_dirac());
  EXPECT_LE(projector_distance(got.span(), golden.span()), 1e-9);
}

TEST_F(Cli, ComposeDimensionMismatch) {
  const std::string c = kData + "/compose/";
  const Outcome r = run("compose --da " + c + "da.json --db " + c + "db.json --di " + c + "di.json --u1 1 --u2 1 --v1 1 --v2 2");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("dimension"), std::string::npos);
  EXPECT_EQ(run("compose --da " + c + "da.json --db " + c + "db.json").code, 2);
}

TEST_F(Cli, ZeroLengthRunHasOneRow) {
  const Outcome r = run("simulate --model oscillator --t-final 0 --output " + path("t.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(path("t.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 2);
  EXPECT_EQ(json::parse(r.out)["rows"], 1);
}

TEST_F(Cli, LcLoopConservesEnergy) {
  const Outcome r = run("simulate --model lc --netlist " + kData + "/loop.json --dt 1e-3 --t-final 10 --format json --output " +
                    path("lc.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json summary = json::parse(r.out);
  EXPECT_EQ(summary["rows"], 10001);
  EXPECT_LE(summary["energy_drift"].get<double>(), 1e-7);
  EXPECT_EQ(json::parse(slurp(path("lc.json")))["rows"].size(), 10001u);
}

TEST_F(Cli, LcWithClosure) {
  const Outcome r = run("simulate --model lc --netlist " + kData + "/two_loop.json --closure " + kData +
                    "/series_closure.json --dt 1e-2 --t-final 5");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(json::parse(r.out)["energy_drift"].get<double>(), 1e-7);
  EXPECT_EQ(run("simulate --model lc").code, 2);
}

TEST_F(Cli, PendulumPairSticks) {
  const Outcome r = run("simulate --model pendulum-pair --closed --dt 1e-3 --t-final 10");
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = json::parse(r.out);
  EXPECT_LE(s["max_lock_residual"].get<double>(), 1e-6);
  EXPECT_LE(s["max_momentum_relation_residual"].get<double>(), 1e-6);
}

TEST_F(Cli, InconsistentInitialStateExitsWithThree) {
  std::ofstream(path("p.json")) << R"({"x0": [0, 0, 0, 0, 0, 1]})";
  const Outcome r = run("simulate --model nonholonomic-particle --t-final 1 --dt 0.01 --params " + path("p.json"));
  EXPECT_EQ(r.code, 3);
  const json e = json::parse(r.err);
  EXPECT_EQ(e["error"], "inconsistent_state");
  EXPECT_GT(e["residual"].get<double>(), 0.5);
}

TEST_F(Cli, RegularityFailureExitsWithFour) {
  const Outcome r = run("simulate --model pendulum-pair --closed --dt 5 --t-final 20");
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(json::parse(r.err)["error"], "regularity");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("simulate --model nope").code, 2);
  EXPECT_EQ(run("simulate --model oscillator --dt -1").code, 2);
  EXPECT_EQ(run("simulate --model oscillator --scheme euler").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}
