#include <doctest.h>

#include <fstream>

#include "builders.hpp"
#include "fdml/error.hpp"
#include "fdml/fixture.hpp"
#include "fdml/text_io.hpp"
#include "temp_dir.hpp"

using namespace fdml;
using fdml::testing::TempDir;

namespace {

const char* kHeader =
    "fixture_id,season,league,round,date,home_team,away_team,home_formation,away_formation,home_goals,away_goals,"
    "home_corners,away_corners,home_possession,away_possession,home_yellow_cards,away_yellow_cards,home_red_cards,"
    "away_red_cards,home_cl_flag,away_cl_flag";

std::string row(const std::string& id, const std::string& hf = "4-4-2", const std::string& af = "4-3-3",
                const std::string& hp = "55", const std::string& ap = "45", const std::string& round = "3") {
  return id + ",2020-2021,Serie A," + round + ",2020-10-04,Roma,Lazio," + hf + "," + af + ",2,1,6,3," + hp + "," +
         ap + ",2,3,0,1,1,0";
}

std::filesystem::path write(const TempDir& dir, const std::string& body) {
  const auto p = dir / "fixtures.csv";
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("well-formed rows parse with no rejects") {
  TempDir dir;
  const auto p = write(dir, std::string(kHeader) + "\n" + row("f1") + "\n" + row("f2") + "\n" + row("f3") + "\n");
  const auto r = parse_fixture_table(p, ColumnSchema::identity());
  REQUIRE(r.fixtures.size() == 3);
  CHECK(r.rejects.empty());
  const Fixture& f = r.fixtures[0];
  CHECK(f.fixture_id == "f1");
  CHECK(f.round == 3);
  CHECK(format_date(f.date) == "2020-10-04");
  CHECK(f.home.team == "Roma");
  CHECK(f.home.stats.goals == 2);
  CHECK(f.away.stats.red_cards == 1);
  CHECK(f.home.cl_flag);
  CHECK_FALSE(f.away.cl_flag);
  CHECK_FALSE(f.temperature.has_value());
}

TEST_CASE("invariant violations are rejected with the rule name") {
  TempDir dir;
  const auto p = write(dir, std::string(kHeader) + "\n" + row("ok") + "\n" + row("poss", "4-4-2", "4-3-3", "60", "43") +
                                "\n" + row("form", "4-3-3-1") + "\n" + row("round0", "4-4-2", "4-3-3", "55", "45", "0") +
                                "\n" + row("bad", "4-4-2", "4-3-3", "x", "45") + "\n" + "short,row\n");
  const auto r = parse_fixture_table(p, ColumnSchema::identity());
  CHECK(r.fixtures.size() == 1);
  REQUIRE(r.rejects.size() == 5);
  CHECK(r.rejects[0].fixture_id == "poss");
  CHECK(r.rejects[0].rule == "possession_sum");
  CHECK(r.rejects[1].rule == "formation_outfielders");
  CHECK(r.rejects[2].rule == "round_positive");
  CHECK(r.rejects[3].rule == "unparseable_numeric:home_possession");
  CHECK(r.rejects[4].rule == "field_count");
  CHECK(r.rejects[4].line == 7);

  write_reject_report(dir / "rejects.csv", r.rejects);
  std::ifstream in(dir / "rejects.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first == "poss,possession_sum");
}

TEST_CASE("possession tolerance is half a point") {
  Fixture f = testing::make_fixture("x", "A", "B", 1, 0, testing::ymd(2020, 9, 1));
  f.home.stats.possession = 50.4;
  f.away.stats.possession = 50.0;
  CHECK_FALSE(check_fixture(f).has_value());
  f.home.stats.possession = 50.6;
  CHECK(check_fixture(f) == "possession_sum");
  f.home.stats.possession = 50;
  f.away.stats.corners = -1;
  CHECK(check_fixture(f) == "non_negative");
}

TEST_CASE("missing column is a schema error naming it") {
  TempDir dir;
  std::string header = kHeader;
  header.replace(header.find("home_corners"), 12, "corners_home");
  const auto p = write(dir, header + "\n" + row("f1") + "\n");
  try {
    parse_fixture_table(p, ColumnSchema::identity());
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
    CHECK(std::string(e.what()).find("home_corners") != std::string::npos);
  }
}

TEST_CASE("column mapping renames source columns") {
  TempDir dir;
  std::string header = kHeader;
  header.replace(header.find("home_corners"), 12, "corners_home");
  const auto p = write(dir, header + "\n" + row("f1") + "\n");
  const auto schema = ColumnSchema::from_key_values({{"home_corners", "corners_home"}});
  const auto r = parse_fixture_table(p, schema);
  REQUIRE(r.fixtures.size() == 1);
  CHECK(r.fixtures[0].home.stats.corners == 6);
  CHECK_THROWS_AS(ColumnSchema::from_key_values({{"not_a_field", "x"}}), Error);
}

TEST_CASE("semicolon delimiter and optional columns") {
  TempDir dir;
  std::string header = kHeader;
  std::replace(header.begin(), header.end(), ',', ';');
  std::string r1 = row("f1");
  std::replace(r1.begin(), r1.end(), ',', ';');
  const auto p = write(dir, header + ";stage;temperature;humidity\n" + r1 + ";Play-off;12.5;\n");
  const auto r = parse_fixture_table(p, ColumnSchema::identity(), ';');
  REQUIRE(r.fixtures.size() == 1);
  CHECK(r.fixtures[0].stage == "Play-off");
  CHECK(r.fixtures[0].temperature == 12.5);
  CHECK_FALSE(r.fixtures[0].humidity.has_value());
}

TEST_CASE("write then parse round-trips") {
  TempDir dir;
  std::vector<Fixture> in;
  for (int i = 0; i < 5; ++i) {
    Fixture f = testing::make_fixture("id" + std::to_string(i), "H" + std::to_string(i), "A" + std::to_string(i), i,
                                      4 - i, testing::ymd(2021, 1, static_cast<unsigned>(i + 1)), i + 1);
    f.stage = i == 4 ? "play-out" : "";
    if (i % 2) f.temperature = 3.25 * i;
    f.home.cl_flag = i == 2;
    in.push_back(f);
  }
  write_fixture_table(dir / "out.csv", in);
  const auto r = parse_fixture_table(dir / "out.csv", ColumnSchema::identity());
  CHECK(r.rejects.empty());
  REQUIRE(r.fixtures.size() == in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto& a = in[i];
    const auto& b = r.fixtures[i];
    CHECK(a.fixture_id == b.fixture_id);
    CHECK(a.date == b.date);
    CHECK(a.stage == b.stage);
    CHECK(a.temperature == b.temperature);
    CHECK(a.home.stats.goals == b.home.stats.goals);
    CHECK(a.away.stats.possession == b.away.stats.possession);
    CHECK(a.home.cl_flag == b.home.cl_flag);
  }
}

TEST_CASE("dates") {
  CHECK(parse_date("2021-02-29") == std::nullopt);
  CHECK(parse_date("2020-02-29").has_value());
  CHECK(parse_date("20-02-2020") == std::nullopt);
  CHECK(day_of_week(testing::ymd(2024, 9, 16)) == 0);  // a Monday
  CHECK(day_of_week(testing::ymd(2024, 9, 22)) == 6);
  CHECK(parse_target("possession") == Target::possession);
  CHECK_FALSE(parse_target("shots").has_value());
}
