#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

#include "lbsim/netlist.hpp"
#include "test_support.hpp"

namespace lbsim {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lbsim_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(LBSIM_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = test::read_file(out.string());
    r.err = test::read_file(err.string());
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, ExtractNandWritesNetAndTrace) {
  const Result r =
      run("extract --layout " + test::fixture_path("nand4") + " --out " + path("nand"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto statements = parse_netlist_file(test::read_file(path("nand.net")));
  int fets = 0, contacts = 0;
  for (const auto& s : statements) (std::holds_alternative<FetStatement>(s) ? fets : contacts)++;
  EXPECT_EQ(fets, 4);
  EXPECT_GE(contacts, 18);
  const std::string trace = test::read_file(path("nand.trace.csv"));
  EXPECT_EQ(trace.rfind("step,layer_finder,", 0), 0u);
}

TEST_F(Cli, ExtractIsByteIdentical) {
  const std::string args = "extract --layout " + test::fixture_path("inverter") + " --seed 4 --out ";
  ASSERT_EQ(run(args + path("a")).code, 0);
  ASSERT_EQ(run(args + path("b")).code, 0);
  EXPECT_EQ(test::read_file(path("a.net")), test::read_file(path("b.net")));
  EXPECT_EQ(test::read_file(path("a.trace.csv")), test::read_file(path("b.trace.csv")));
}

TEST_F(Cli, MalformedLayoutIsInputError) {
  {
    std::ofstream f(path("bad.lay"));
    f << "LAYOUT 4 4\nRECT METAL1 0 0 9 9\n";
  }
  const Result r = run("extract --layout " + path("bad.lay"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
  EXPECT_EQ(run("extract --layout " + path("missing.lay")).code, 1);
  EXPECT_EQ(run("oracle --layout " + path("bad.lay")).code, 1);
}

TEST_F(Cli, UsageErrorsAreInputErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("extract").code, 1);
  EXPECT_EQ(run("extract --layout " + test::fixture_path("cross") + " --agents 0").code, 1);
  EXPECT_EQ(run("bench --layout " + test::fixture_path("cross") + " --repeats 1").code, 1);
  const Result help = run("--help");
  EXPECT_EQ(help.code, 0);
  for (const char* flag : {"extract", "oracle", "compare", "bench"})
    EXPECT_NE(help.out.find(flag), std::string::npos);
}

TEST_F(Cli, TooFewAgentsHitsCap) {
  // One agent can label only one wire, so the NAND never completes.
  const Result r =
      run("extract --layout " + test::fixture_path("nand4") + " --agents 1 --max-steps 2000");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, OracleWritesCanonicalText) {
  ASSERT_EQ(run("oracle --layout " + test::fixture_path("cross") + " --out " + path("x.canon")).code,
            0);
  EXPECT_EQ(test::read_file(path("x.canon")),
            test::read_file(std::string(LBSIM_GOLDEN_DIR) + "/cross.canon"));
}

TEST_F(Cli, CompareCrossAnySeed) {
  for (int seed : {1, 2, 17, 123456})
    EXPECT_EQ(run("compare --layout " + test::fixture_path("cross") + " --seed " +
                  std::to_string(seed))
                  .code,
              0)
        << seed;
}

TEST_F(Cli, CompareCatchesInjectedFault) {
  const Result r = run("compare --layout " + test::fixture_path("inverter") + " --inject-fault");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("netlists differ"), std::string::npos);
  EXPECT_NE(r.out.find("cell "), std::string::npos);
}

TEST_F(Cli, BenchPrintsSlopeAndWritesCsv) {
  const Result r = run("bench --layout " + test::fixture_path("inverter") +
                       " --agent-counts 50,100 --repeats 3 --out " + path("s.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("slope ", 0), 0u);
  const std::string csv = test::read_file(path("s.csv"));
  EXPECT_EQ(csv.rfind("n_agents,mean,min,max\n50,", 0), 0u);
}

}  // namespace
}  // namespace lbsim
