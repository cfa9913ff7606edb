#include "swelab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

namespace cli = swelab::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("swelab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), {"--out-dir", dir_.string()});
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  [[nodiscard]] std::string slurp(const fs::path& p) const {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST(CliParse, Numbers) {
  EXPECT_EQ(cli::parse_number("0.25"), 0.25);
  EXPECT_EQ(cli::parse_number(" 1/16 "), 0.0625);
  EXPECT_EQ(cli::parse_number("+2e-1"), 0.2);
  EXPECT_THROW(cli::parse_number("abc"), cli::UsageError);
  EXPECT_THROW(cli::parse_number("1/0"), cli::UsageError);
  EXPECT_THROW(cli::parse_number("0.3x"), cli::UsageError);
}

TEST(CliParse, ListsAndGrids) {
  EXPECT_EQ(cli::parse_list("0.3,0.3,0.3"), (std::vector<double>{0.3, 0.3, 0.3}));
  EXPECT_TRUE(cli::parse_list("").empty());
  EXPECT_THROW(cli::parse_list("0.1,,0.2"), cli::UsageError);
  EXPECT_EQ(cli::parse_grid("0.5:1:0.1"), (std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 1.0}));
  EXPECT_EQ(cli::parse_grid("0.05:0.2:0.05"), (std::vector<double>{0.05, 0.1, 0.15, 0.2}));
  EXPECT_TRUE(cli::parse_grid("1:0:0.1").empty());
  EXPECT_EQ(cli::parse_grid("0.5,0.7"), (std::vector<double>{0.5, 0.7}));
  EXPECT_THROW(cli::parse_grid("0:1"), cli::UsageError);
  EXPECT_THROW(cli::parse_grid("0:1:0"), cli::UsageError);
  EXPECT_THROW(cli::parse_grid("0:1:-0.1"), cli::UsageError);
}

TEST(CliCsv, SchemaEnforced) {
  std::istringstream good("# schema=1\na,b\n1,2\n3,4\n");
  const auto t = cli::read_csv(good);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.rows.size(), 2u);
  std::istringstream future("# schema=2\na,b\n");
  EXPECT_THROW(cli::read_csv(future), cli::UsageError);
  std::istringstream bare("a,b\n1,2\n");
  EXPECT_THROW(cli::read_csv(bare), cli::UsageError);
  std::istringstream ragged("# schema=1\na,b\n1\n");
  EXPECT_THROW(cli::read_csv(ragged), cli::UsageError);
}

TEST(CliSvg, Polyline) {
  const auto svg = cli::svg_line_plot({0, 1, 2}, {0, 1, 4}, "a < b", "x", "y");
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
  EXPECT_THROW(cli::svg_line_plot({0}, {0}, "", "", ""), swelab::PreconditionError);
}

TEST(CliEnv, DefaultOutDir) {
  ::setenv(cli::kOutDirEnv, "/tmp/somewhere", 1);
  EXPECT_EQ(cli::default_out_dir(), fs::path("/tmp/somewhere"));
  ::unsetenv(cli::kOutDirEnv);
  EXPECT_EQ(cli::default_out_dir(), fs::path("swelab_out"));
}

TEST_F(CliTest, SolvabilityExamples) {
  EXPECT_EQ(run({"solvability", "--d", "1", "--h0", "0.5", "--h", "0.3"}), cli::kPass);
  EXPECT_NE(out_.str().find("solvable"), std::string::npos);
  const json doc = json::parse(slurp(dir_ / "solvability.json"));
  EXPECT_TRUE(doc["closed"]["solvable"].get<bool>());
  EXPECT_NEAR(doc["closed"]["margin"].get<double>(), 0.3, 1e-15);

  EXPECT_EQ(run({"solvability", "--d", "3", "--h0", "1", "--h", "0.3,0.3,0.3"}), cli::kPass);
  EXPECT_NE(out_.str().find("not solvable"), std::string::npos);

  EXPECT_EQ(run({"solvability", "--h0", "0.5", "--h", "1.2"}), cli::kUsage);
  EXPECT_EQ(run({"solvability", "--d", "2", "--h0", "0.5", "--h", "0.3"}), cli::kUsage);
  EXPECT_EQ(run({"solvability", "--h0", "0.5"}), cli::kUsage);
  EXPECT_EQ(run({"solvability", "--bogus"}), cli::kUsage);
}

TEST_F(CliTest, SolvabilityNumeric) {
  EXPECT_EQ(run({"solvability", "--h0", "0.7", "--habs", "0.5", "--numeric"}), cli::kPass);
  const json doc = json::parse(slurp(dir_ / "solvability.json"));
  EXPECT_EQ(doc["numeric"]["flag"], "ok");
  // margin 0.01: inside the near-critical band
  EXPECT_EQ(run({"solvability", "--h0", "0.5", "--habs", "0.01", "--numeric"}), cli::kIndeterminate);
}

TEST_F(CliTest, G1Curve) {
  EXPECT_EQ(run({"g1-curve", "--h0", "0.7", "--rho-max", "1000", "--n-points", "1001"}), cli::kPass);
  std::ifstream is(dir_ / "g1_curve.csv");
  const auto t = cli::read_csv(is);
  EXPECT_EQ(t.header, (std::vector<std::string>{"rho", "g1"}));
  ASSERT_EQ(t.rows.size(), 1001u);
  EXPECT_EQ(t.rows[1000][0], "1000");
  const json side = json::parse(slurp(dir_ / "g1_curve.json"));
  EXPECT_GE(side["fit"]["r2"].get<double>(), 0.99);
  EXPECT_FALSE(fs::exists(dir_ / "g1_curve.svg"));

  EXPECT_EQ(run({"--svg", "g1-curve", "--h0", "1", "--rho-min", "800", "--rho-max", "1000", "--n-points", "401"}),
            cli::kPass);
  EXPECT_TRUE(fs::exists(dir_ / "g1_curve.svg"));
  const json fig2 = json::parse(slurp(dir_ / "g1_curve.json"));
  EXPECT_LE(fig2["g1_max"].get<double>(), 2.0 + 1e-6);
  EXPECT_GE(fig2["g1_min"].get<double>(), 0.0);

  EXPECT_EQ(run({"g1-curve", "--h0", "0.7", "--n-points", "1"}), cli::kUsage);
  EXPECT_EQ(run({"g1-curve", "--h0", "0.5"}), cli::kUsage);
}

TEST_F(CliTest, PhaseDiagram) {
  EXPECT_EQ(run({"phase-diagram", "--d", "1", "--h0-grid", "0.5:1:0.25", "--habs-grid", "0.1:0.9:0.2"}), cli::kPass);
  std::ifstream is(dir_ / "phase_diagram.csv");
  const auto t = cli::read_csv(is);
  EXPECT_EQ(t.header, (std::vector<std::string>{"h0", "habs", "closed", "numeric", "margin", "flag"}));
  EXPECT_EQ(t.rows.size(), 15u);
  EXPECT_EQ(t.rows.front()[0], "0.5");
  EXPECT_EQ(t.rows.front()[1], "0.1");

  EXPECT_EQ(run({"phase-diagram", "--h0-grid", "1:0:0.1", "--habs-grid", "0.1:0.3:0.1", "--out",
                 (dir_ / "empty.csv").string()}),
            cli::kPass);
  EXPECT_EQ(slurp(dir_ / "empty.csv"), "# schema=1\nh0,habs,closed,numeric,margin,flag\n");

  EXPECT_EQ(run({"phase-diagram", "--h0-grid", "0.5:1", "--habs-grid", "0.1:0.3:0.1"}), cli::kUsage);
}

TEST_F(CliTest, PhaseDiagramFlagsNearCritical) {
  // d = 1, H0 = 0.5: margin = |H|, so |H| = 0.02 lies in the band
  EXPECT_EQ(run({"phase-diagram", "--h0-grid", "0.5", "--habs-grid", "0.02,0.5"}), cli::kPass);
  std::ifstream is(dir_ / "phase_diagram.csv");
  const auto t = cli::read_csv(is);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][5], "near-critical");
  EXPECT_EQ(t.rows[1][5], "ok");
}

TEST_F(CliTest, HolderSpaceDeterministic) {
  const std::vector<std::string> args{"holder-space", "--L", "1", "--n-reps", "100"};
  ASSERT_EQ(run(args), cli::kPass) << out_.str() << err_.str();
  const std::string first = slurp(dir_ / "holder_space.json");
  ASSERT_EQ(run(args), cli::kPass);
  const std::string second = slurp(dir_ / "holder_space.json");
  const json a = json::parse(first), b = json::parse(second);
  EXPECT_EQ(cli::without_timing(a).dump(2), cli::without_timing(b).dump(2));
  EXPECT_TRUE(a.contains("timing"));
  ASSERT_EQ(a["estimates"].size(), 4u);
  for (const auto& e : a["estimates"]) {
    EXPECT_TRUE(e.contains("mean"));
    EXPECT_TRUE(e.contains("stderr"));
    EXPECT_EQ(e["n"].get<int>(), 100);
  }
  EXPECT_EQ(a["fits"][0]["ci"].size(), 2u);
  EXPECT_TRUE(a["fits"][0].contains("r2"));
  EXPECT_EQ(a["seed"].get<std::uint64_t>(), swelab::bounds::kDefaultSeed);

  ASSERT_EQ(run({"--seed", "5", "holder-space", "--L", "1", "--n-reps", "100"}), cli::kPass);
  EXPECT_NE(json::parse(slurp(dir_ / "holder_space.json"))["estimates"][0]["mean"], a["estimates"][0]["mean"]);
}

TEST_F(CliTest, ExperimentErrors) {
  EXPECT_EQ(run({"holder-space", "--n-reps", "1"}), cli::kUsage);
  EXPECT_EQ(run({"holder-time", "--tau-list", "0,1/32,1/64"}), cli::kUsage);
  EXPECT_EQ(run({"sup-growth", "--H", "1.5"}), cli::kUsage);
  // grid cap exceeded inside the harness
  EXPECT_EQ(run({"sup-growth", "--x-per-tmin", "64", "--n-reps", "2"}), cli::kFailure);
}

TEST_F(CliTest, DumpFields) {
  ASSERT_EQ(run({"--dump-fields", "holder-time", "--L", "1", "--n-reps", "200"}), cli::kPass) << err_.str();
  const fs::path d = dir_ / "holder_time_fields";
  const json side = json::parse(slurp(d / "cell0.json"));
  const auto n_points = side["n_points"].get<std::size_t>();
  EXPECT_EQ(n_points, 66u);
  EXPECT_EQ(side["byte_order"], "little");
  EXPECT_EQ(fs::file_size(d / "cell0.f64"), 200u * n_points * sizeof(double));
  EXPECT_EQ(side["points"].size(), n_points);
}

TEST_F(CliTest, MetricRatio) {
  EXPECT_EQ(run({"metric-ratio", "--t-set", "0.5,1,2", "--dx-grid", "0:2:0.5"}), cli::kPass);
  const json doc = json::parse(slurp(dir_ / "metric_ratio.json"));
  EXPECT_GT(doc["r_min"].get<double>(), 0.0);
  EXPECT_GE(doc["r_max"].get<double>(), doc["r_min"].get<double>());
  EXPECT_EQ(doc["degenerate_skipped"].get<int>(), 3);
  EXPECT_NE(err_.str().find("degenerate"), std::string::npos);
  EXPECT_EQ(run({"metric-ratio", "--t-set", "1", "--dx-grid", "0"}), cli::kUsage);
}
