#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bcpar/autotune.hpp"
#include "bcpar/classfile.hpp"
#include "cli.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace bcpar;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("bcpar_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& s) const { return (path_ / s).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::map<std::string, std::vector<std::uint8_t>> class_files(const std::string& dir) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".class") out[e.path().filename().string()] = read_file(e.path().string());
  return out;
}

std::string fixture(const std::string& f) { return testkit::fixture_path(f); }

}  // namespace

TEST(Cli, ParallelizeMatMul) {
  TempDir d;
  CliRun r = run_cli({"parallelize", fixture("MatMul.class"), "--out", d.str(), "--workers", "4", "--n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto files = class_files(d.str());
  EXPECT_EQ(files.size(), 5u);
  for (const auto& [name, bytes] : files) EXPECT_NO_THROW(parse_class(bytes)) << name;
  EXPECT_TRUE(fs::exists(d / "tune-report.json"));
}

TEST(Cli, ParallelizeIsReproducible) {
  TempDir a, b;
  ASSERT_EQ(run_cli({"parallelize", fixture("Histogram.class"), "--out", a.str(), "--r", "32"}).code, 0);
  ASSERT_EQ(run_cli({"parallelize", fixture("Histogram.class"), "--out", b.str(), "--r", "32"}).code, 0);
  EXPECT_EQ(class_files(a.str()), class_files(b.str()));
  EXPECT_EQ(read_file(a / "tune-report.json"), read_file(b / "tune-report.json"));
}

TEST(Cli, TruncatedClassfile) {
  TempDir d;
  auto bytes = read_file(fixture("MatMul.class"));
  bytes.resize(bytes.size() / 2);
  write_file(d / "Bad.class", bytes);
  EXPECT_EQ(run_cli({"analyze", d / "Bad.class"}).code, cli::kMalformed);
  EXPECT_EQ(run_cli({"parallelize", d / "Bad.class", "--out", d / "o"}).code, cli::kMalformed);
}

TEST(Cli, UnsupportedVersion) {
  TempDir d;
  auto bytes = read_file(fixture("MatMul.class"));
  bytes[6] = 0;
  bytes[7] = 70;
  write_file(d / "New.class", bytes);
  EXPECT_EQ(run_cli({"analyze", d / "New.class"}).code, cli::kUnsupportedVersion);
}

TEST(Cli, NoLoopsIsNotAnError) {
  CliRun r = run_cli({"analyze", fixture("NoLoops.class")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"note\""), std::string::npos) << r.out;
}

TEST(Cli, SerialOnlyHasNoCandidate) {
  TempDir d;
  CliRun r = run_cli({"parallelize", fixture("Conflict.class"), "--out", d.str()});
  EXPECT_EQ(r.code, cli::kNoCandidate);
  EXPECT_EQ(class_files(d.str()).size(), 1u);
}

TEST(Cli, VerifyRejectsConflict) {
  CliRun r = run_cli({"verify", fixture("Conflict.class"), fixture("conflict"), "--n", "16"});
  EXPECT_EQ(r.code, cli::kVerifyFailed) << r.out << r.err;
  EXPECT_NE(r.out.find("witness"), std::string::npos);
}

TEST(Cli, VerifyAcceptsGoodVariant) {
  TempDir d;
  ASSERT_EQ(run_cli({"parallelize", fixture("MatMul.class"), "--out", d.str(), "--n", "8"}).code, 0);
  CliRun r = run_cli({"verify", fixture("MatMul.class"), d.str(), "--n", "8"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(Cli, ZeroToleranceCatchesReassociation) {
  TempDir d;
  ASSERT_EQ(run_cli({"parallelize", fixture("Reductions.class"), "--out", d.str(), "--n", "256"}).code, 0);
  CliRun r = run_cli({"verify", fixture("Reductions.class"), d.str(), "--method", "sum", "--tol", "0", "--n", "256"});
  EXPECT_EQ(r.code, cli::kVerifyFailed) << r.out << r.err;
}

TEST(Cli, BenchCsv) {
  std::vector<std::string> args{"bench", fixture("MatMul.class"), "--sizes", "16,32", "--procs", "1,2,4", "--csv"};
  CliRun a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u) << a.out;
  EXPECT_EQ(lines[0], "benchmark,N,P,T,E,S");
  EXPECT_EQ(lines[1].substr(lines[1].size() - 9), "1.00,1.00");
}

TEST(Cli, JvmBackendUnavailable) {
  if (!bcpar::find_java().empty()) GTEST_SKIP() << "java present";
  TempDir d;
  CliRun r = run_cli({"parallelize", fixture("MatMul.class"), "--out", d.str(), "--backend", "jvm"});
  EXPECT_EQ(r.code, cli::kBackendUnavailable);
}

TEST(Cli, FlagsOverrideConfig) {
  TempDir d;
  {
    std::ofstream cfg(d / "bcpar.ini");
    cfg << "workers = 2\n";
  }
  ASSERT_EQ(run_cli({"--config", d / "bcpar.ini", "parallelize", fixture("MatMul.class"), "--out", d / "a"}).code, 0);
  EXPECT_EQ(class_files(d / "a").size(), 3u);
  ASSERT_EQ(run_cli({"--config", d / "bcpar.ini", "parallelize", fixture("MatMul.class"), "--out", d / "b", "--workers",
                 "3"})
                .code,
            0);
  EXPECT_EQ(class_files(d / "b").size(), 4u);
}

TEST(Cli, ReportFromRecords) {
  TempDir d;
  {
    std::ofstream f(d / "rec.json");
    f << R"({"records":[{"benchmark":"mm","N":1024,"P":1,"T":1.15},{"benchmark":"mm","N":1024,"P":2,"T":0.78}]})";
  }
  CliRun r = run_cli({"report", d / "rec.json", "--csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mm,1024,2,0.78,0.74,1.47"), std::string::npos) << r.out;
}
