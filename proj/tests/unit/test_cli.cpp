#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fdml/grid.hpp"
#include "fdml/synth.hpp"
#include "temp_dir.hpp"

using fdml::testing::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run fdml_run(std::vector<std::string> args) {
  args.insert(args.begin(), "fdml");
  std::ostringstream out, err;
  const int code = fdml::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// Small league: 10 teams, 2 seasons, 1 league.
std::vector<std::string> small_sim(const TempDir& dir, const std::string& sub) {
  return {"simulate", "--teams", "10", "--seasons", "2", "--leagues", "1", "--output-dir", (dir / sub).string()};
}

}  // namespace

TEST_CASE("simulate defaults and seeds") {
  TempDir dir;
  const auto r = fdml_run({"simulate", "--output-dir", (dir / "a").string()});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "fixtures: 3800"));
  CHECK(std::filesystem::exists(dir / "a" / "fixtures.csv"));
  CHECK(std::filesystem::exists(dir / "a" / "truth.csv"));

  REQUIRE(fdml_run({"simulate", "--null", "--teams", "6", "--seasons", "1", "--output-dir", (dir / "n").string()})
              .code == 0);
  const auto truth = fdml::read_truth_file(dir / "n" / "truth.csv");
  CHECK(truth.true_beta == fdml::SquareGrid<double>(6, 0.0));

  auto a = small_sim(dir, "s1");
  auto b = small_sim(dir, "s2");
  b.insert(b.end(), {"--seed", "8"});
  REQUIRE(fdml_run(a).code == 0);
  REQUIRE(fdml_run(b).code == 0);
  CHECK(read(dir / "s1" / "fixtures.csv") != read(dir / "s2" / "fixtures.csv"));
}

TEST_CASE("ingest reports filters and rounds") {
  TempDir dir;
  REQUIRE(fdml_run({"simulate", "--teams", "20", "--seasons", "1", "--leagues", "1", "--output-dir",
                    (dir / "sim").string()})
              .code == 0);
  const auto r = fdml_run({"ingest", "--input", (dir / "sim" / "fixtures.csv").string(), "--output-dir",
                           (dir / "in").string()});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "rejected: 0"));
  CHECK(contains(r.out, ": 3-34"));
  CHECK(contains(r.out, "fixtures after round filter: 320"));
  CHECK(contains(r.out, "analysis rows: 640"));
  CHECK(std::filesystem::exists(dir / "in" / "analysis.csv"));
  CHECK(std::filesystem::exists(dir / "in" / "rejects.csv"));

  // relabel two fixtures as play-off games
  auto fixtures = fdml::parse_fixture_table(dir / "sim" / "fixtures.csv", fdml::ColumnSchema::identity()).fixtures;
  fixtures[0].stage = "Play-off";
  fixtures[1].stage = "play-out";
  fdml::write_fixture_table(dir / "po.csv", fixtures);
  const auto po = fdml_run({"ingest", "--input", (dir / "po.csv").string(), "--output-dir", (dir / "po").string()});
  REQUIRE(po.code == 0);
  CHECK(contains(po.out, "fixtures after validation: 380"));
  CHECK(contains(po.out, "fixtures after stage filter: 378"));
}

TEST_CASE("estimate writes the run directory") {
  TempDir dir;
  REQUIRE(fdml_run(small_sim(dir, "sim")).code == 0);
  REQUIRE(fdml_run({"ingest", "--input", (dir / "sim" / "fixtures.csv").string(), "--output-dir",
                    (dir / "in").string()})
              .code == 0);
  const std::string analysis = (dir / "in" / "analysis.csv").string();
  const std::vector<std::string> fast{"--n-stages", "5", "--learning-rate", "0.3", "--folds", "3",
                                      "--min-samples-leaf", "5"};
  auto plain = std::vector<std::string>{"estimate", "--input", analysis, "--output-dir", (dir / "run").string()};
  plain.insert(plain.end(), fast.begin(), fast.end());
  const auto r = fdml_run(plain);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(contains(r.out, "home effect:"));
  for (const char* name : {"config.txt", "beta.csv", "beta_display.csv", "beta_side.csv", "se.csv", "pvalue.csv",
                           "stars.csv", "counts.csv", "matrix.txt", "heatmap.svg", "residual_summary.csv",
                           "first_stage.csv", "diagnostics.txt"})
    CHECK_MESSAGE(std::filesystem::exists(dir / "run" / name), name);

  auto side = std::vector<std::string>{"estimate", "--input", analysis, "--output-dir", (dir / "side").string(),
                                       "--side-adjusted"};
  side.insert(side.end(), fast.begin(), fast.end());
  REQUIRE(fdml_run(side).code == 0);
  const auto base = fdml::read_grid_csv(dir / "run" / "beta_display.csv");
  const auto shifted = fdml::read_grid_csv(dir / "side" / "beta_side.csv");
  CHECK(fdml::read_grid_csv(dir / "side" / "beta.csv") == fdml::read_grid_csv(dir / "run" / "beta.csv"));
  const std::string diag = read(dir / "run" / "diagnostics.txt");
  const auto pos = diag.find("home_effect=");
  REQUIRE(pos != std::string::npos);
  const double home = std::stod(diag.substr(pos + 12));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(shifted(i, j) == doctest::Approx(base(i, j) + home).epsilon(1e-9));
  CHECK(contains(read(dir / "side" / "matrix.txt"), "(added)"));

  const auto rep = fdml_run({"report", "--input", analysis, "--output-dir", (dir / "rep").string(), "--beta",
                             (dir / "run" / "beta_display.csv").string(), "--pvalue",
                             (dir / "run" / "pvalue.csv").string()});
  REQUIRE(rep.code == 0);
  CHECK(std::filesystem::exists(dir / "rep" / "usage.csv"));
  CHECK(std::filesystem::exists(dir / "rep" / "averages.csv"));
  CHECK(contains(read(dir / "rep" / "heatmap.svg"), "<svg"));
}

TEST_CASE("errors carry a stable code") {
  TempDir dir;
  auto r = fdml_run({"estimate", "--input", (dir / "missing.csv").string(), "--output-dir", dir.path().string()});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[E_IO]", 0) == 0);

  r = fdml_run({"simulate", "--teams", "1", "--output-dir", dir.path().string()});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[E_CONFIG]", 0) == 0);

  r = fdml_run({"estimate", "--folds"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error[E_CONFIG]", 0) == 0);

  r = fdml_run({"frobnicate"});
  CHECK(r.code == 2);

  std::ofstream(dir / "empty.csv") << "";
  r = fdml_run({"report", "--input", (dir / "empty.csv").string(), "--output-dir", dir.path().string()});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[", 0) == 0);
}

TEST_CASE("config file overrides flags") {
  TempDir dir;
  std::ofstream(dir / "run.cfg") << "# overrides\nteams = 6\nseasons = 1\nleagues=1\n";
  auto r = fdml_run({"simulate", "--teams", "20", "--config", (dir / "run.cfg").string(), "--output-dir",
                     (dir / "o").string()});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "fixtures: 30"));

  std::ofstream(dir / "bad.cfg") << "teems = 6\n";
  r = fdml_run({"simulate", "--config", (dir / "bad.cfg").string(), "--output-dir", (dir / "o").string()});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "teems"));
}

TEST_CASE("output directory falls back to the environment") {
  TempDir dir;
  const std::string target = (dir / "from_env").string();
  ::setenv("FDML_OUTPUT_DIR", target.c_str(), 1);
  const auto r = fdml_run({"simulate", "--teams", "4", "--seasons", "1", "--leagues", "1"});
  ::unsetenv("FDML_OUTPUT_DIR");
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir / "from_env" / "fixtures.csv"));
}
