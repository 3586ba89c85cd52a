#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "phimi/cli.hpp"
#include "phimi/power_study.hpp"
#include "phimi/samplers.hpp"

namespace phimi {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("phimi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    std::ofstream g(path("g.csv"));
    g << "x,y\n";
    const PairedSample s = sample_gaussian({0.5}, 120, 1);
    for (std::size_t i = 0; i < s.size(); ++i)
      g << format_shortest(s.x()[i]) << ',' << format_shortest(s.y()[i]) << '\n';
    std::ofstream c(path("c.csv"));
    c << "x,y\n";
    const PairedSample t = sample_finite({3, 0.4}, 150, 2);
    for (std::size_t i = 0; i < t.size(); ++i) c << t.x_tokens()[i] << ',' << t.y_tokens()[i] << '\n';
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, EstimateText) {
  ASSERT_EQ(run({"estimate", "--csv", path("g.csv"), "--model", "gaussian"}), 0) << err_.str();
  const std::string s = out_.str();
  EXPECT_EQ(s.rfind("phimi-format=1\n", 0), 0u);
  EXPECT_NE(s.find("i_hat: "), std::string::npos);
  EXPECT_NE(s.find("converged: true"), std::string::npos);
}

TEST_F(Cli, TestBootstrapJsonWithSeed) {
  ASSERT_EQ(run({"test", "--csv", path("g.csv"), "--x", "x", "--y", "y", "--divergence", "kl",
                 "--model", "expbilinear:x,y", "--route", "bootstrap", "--alpha", "0.05",
                 "--seed", "42", "--B", "200", "--format", "json"}),
            0)
      << err_.str();
  const std::string s = out_.str();
  EXPECT_NE(s.find("\"phimi-format\": 1"), std::string::npos);
  EXPECT_NE(s.find("\"reject\": true"), std::string::npos);
  EXPECT_NE(s.find("\"seed\": 42"), std::string::npos);
  EXPECT_TRUE(err_.str().empty());
}

TEST_F(Cli, GeneratedSeedIsPrinted) {
  ASSERT_EQ(run({"test", "--csv", path("g.csv"), "--model", "fgm", "--B", "100"}), 0);
  EXPECT_EQ(err_.str().rfind("generated seed ", 0), 0u);
  const std::string seed = err_.str().substr(15, err_.str().size() - 16);
  EXPECT_NE(out_.str().find("seed: " + seed + "\n"), std::string::npos);
}

TEST_F(Cli, DefaultRoutes) {
  ASSERT_EQ(run({"test", "--csv", path("c.csv"), "--model", "finite", "--format", "csv"}), 0)
      << err_.str();
  EXPECT_NE(out_.str().find(",chisq,"), std::string::npos);
  ASSERT_EQ(run({"test", "--csv", path("g.csv"), "--model", "gaussian", "--seed", "3",
                 "--moment-draws", "50000"}),
            0);
  EXPECT_NE(out_.str().find("route: ztz"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"frobnicate"}), cli::kUsage);
  EXPECT_NE(err_.str().find("frobnicate"), std::string::npos);
  EXPECT_EQ(run({}), cli::kUsage);
  EXPECT_EQ(run({"estimate", "--model", "gaussian"}), cli::kUsage);  // --csv missing
  EXPECT_EQ(run({"test", "--csv", path("g.csv"), "--model", "gaussian", "--route", "chisq"}),
            cli::kUsage);
  EXPECT_EQ(run({"estimate", "--csv", path("g.csv"), "--model", "spline"}), cli::kUsage);
  EXPECT_EQ(run({"estimate", "--csv", path("missing.csv"), "--model", "gaussian"}), cli::kRuntime);
  EXPECT_EQ(run({"estimate", "--csv", path("g.csv"), "--x", "nope", "--model", "gaussian"}),
            cli::kRuntime);
  EXPECT_EQ(run({"--help"}), cli::kOk);
  EXPECT_NE(out_.str().find("estimate"), std::string::npos);
}

TEST_F(Cli, BootstrapReplicatesFileIsDeterministic) {
  for (const char* tag : {"a", "b"}) {
    ASSERT_EQ(run({"bootstrap", "--csv", path("g.csv"), "--model", "fgm", "--B", "120", "--seed",
                   "5", "--replicates", path(std::string("rep_") + tag), "--out",
                   path(std::string("out_") + tag), "--threads", tag[0] == 'a' ? "1" : "2"}),
              0)
        << err_.str();
  }
  EXPECT_EQ(slurp("rep_a"), slurp("rep_b"));
  EXPECT_EQ(slurp("out_a"), slurp("out_b"));
  EXPECT_FALSE(slurp("rep_a").empty());
}

TEST_F(Cli, SelectAndPower) {
  {
    std::ofstream cfg(path("cands.cfg"));
    cfg << "[candidate xy]\nmodel = expbilinear:x,y\n[candidate gauss]\nmodel = gaussian\n";
    std::ofstream study(path("study.cfg"));
    study << "[study]\nfamily = finite\nk = 2\ngrid = 0, 0.5\nn = 30\nreps = 100\n"
             "alpha = 0.05\ntests = kl, chisq\nseed = 4\n";
  }
  ASSERT_EQ(run({"select", "--csv", path("g.csv"), "--config", path("cands.cfg"), "--seed", "1"}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("selected: "), std::string::npos);

  ASSERT_EQ(run({"power", "--config", path("study.cfg"), "--out", path("p.csv"), "--report",
                 path("p.txt"), "--plot", path("p.long")}),
            0)
      << err_.str();
  std::istringstream in(slurp("p.csv"));
  const PowerTable t = read_power_csv(in);
  EXPECT_EQ(t.rows.size(), 4u);
  EXPECT_NE(slurp("p.txt").find("critical kl"), std::string::npos);
  EXPECT_NE(slurp("p.long").find("series,x,y,y_low,y_high"), std::string::npos);
  ASSERT_EQ(run({"power", "--config", path("study.cfg"), "--reps", "200"}), 0);
  EXPECT_NE(out_.str().find("reps: 200"), std::string::npos);
}

TEST_F(Cli, Limits) {
  ASSERT_EQ(run({"limits", "--model", "finite", "--levels", "2,2", "--alpha", "0.01", "--seed",
                 "1", "--draws", "100000"}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("chisq_df: 1"), std::string::npos);
  ASSERT_EQ(run({"limits", "--model", "gaussian", "--margins", "data", "--csv", path("g.csv"),
                 "--seed", "1"}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("margins: data"), std::string::npos);
  EXPECT_EQ(run({"limits", "--model", "fgm", "--seed", "1"}), cli::kUsage);
}

}  // namespace
}  // namespace phimi
