#include <doctest.h>

#include <map>
#include <random>

#include "builders.hpp"
#include "fdml/error.hpp"
#include "fdml/strength.hpp"
#include "oracles.hpp"

using namespace fdml;
using fdml::testing::make_fixture;
using fdml::testing::ymd;

TEST_CASE("win, draw, loss gives 4 of 9 points") {
  std::vector<Fixture> fx{
      make_fixture("a", "A", "B", 2, 0, ymd(2020, 9, 1)),
      make_fixture("b", "C", "A", 1, 1, ymd(2020, 9, 8)),
      make_fixture("c", "A", "D", 0, 3, ymd(2020, 9, 15)),
      make_fixture("d", "E", "A", 0, 0, ymd(2020, 9, 22)),
  };
  const auto s = compute_strength_features(fx, "A", 3);
  CHECK(s.points_ratio_overall == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  // away record for A: one draw at C
  CHECK(s.points_ratio_side == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.streak == 0);
}

TEST_CASE("first match uses the no-history defaults") {
  std::vector<Fixture> fx{
      make_fixture("a", "A", "B", 2, 0, ymd(2020, 9, 1)),
      make_fixture("b", "C", "D", 1, 0, ymd(2020, 9, 1)),
  };
  for (std::size_t i = 0; i < fx.size(); ++i) {
    for (const auto& team : {fx[i].home.team, fx[i].away.team}) {
      const auto s = compute_strength_features(fx, team, i);
      CHECK(s.points_ratio_overall == 0.5);
      CHECK(s.points_ratio_side == 0.5);
      CHECK(s.streak == 0);
      CHECK(s.ranking == 1);
    }
  }
}

TEST_CASE("equal points share a rank") {
  StrengthTracker t;
  t.record(make_fixture("a", "A", "B", 1, 0, ymd(2020, 9, 1)));
  t.record(make_fixture("b", "C", "D", 1, 0, ymd(2020, 9, 1)));
  std::map<std::string, int> points{{"A", 3}, {"B", 0}, {"C", 3}, {"D", 0}};
  for (const auto& team : {"A", "B", "C", "D"}) CHECK(t.ranking(team) == oracle::competition_rank(points, team));
  CHECK(t.ranking("A") == 1);
  CHECK(t.ranking("C") == 1);
  CHECK(t.ranking("B") == 3);
}

TEST_CASE("streak counts consecutive wins only") {
  std::vector<Fixture> fx{
      make_fixture("a", "A", "B", 2, 0, ymd(2020, 9, 1)),
      make_fixture("b", "C", "A", 0, 1, ymd(2020, 9, 8)),
      make_fixture("c", "A", "D", 1, 1, ymd(2020, 9, 15)),
      make_fixture("d", "A", "E", 3, 1, ymd(2020, 9, 22)),
      make_fixture("e", "F", "A", 0, 0, ymd(2020, 9, 29)),
  };
  CHECK(compute_strength_features(fx, "A", 2).streak == 2);
  CHECK(compute_strength_features(fx, "A", 3).streak == 0);
  CHECK(compute_strength_features(fx, "A", 4).streak == 1);
}

TEST_CASE("features ignore the current fixture and later ones") {
  std::vector<Fixture> fx{
      make_fixture("a", "A", "B", 2, 0, ymd(2020, 9, 1)),
      make_fixture("b", "A", "C", 5, 0, ymd(2020, 9, 8)),
      make_fixture("c", "A", "D", 0, 4, ymd(2020, 9, 15)),
  };
  const auto before = compute_strength_features(fx, "A", 1);
  fx[1].home.stats.goals = 0;
  fx[1].away.stats.goals = 9;
  fx[2].away.stats.goals = 0;
  CHECK(compute_strength_features(fx, "A", 1) == before);
}

TEST_CASE("other seasons and leagues do not leak") {
  std::vector<Fixture> fx{
      make_fixture("a", "A", "B", 2, 0, ymd(2020, 9, 1), 1, "2019-2020"),
      make_fixture("b", "A", "B", 2, 0, ymd(2020, 9, 2), 1, "2020-2021", "Other"),
      make_fixture("c", "A", "C", 1, 1, ymd(2020, 9, 8)),
  };
  const auto s = compute_strength_features(fx, "A", 2);
  CHECK(s.points_ratio_overall == 0.5);
  CHECK(s.ranking == 1);
}

TEST_CASE("absent team raises team_absent") {
  std::vector<Fixture> fx{make_fixture("a", "A", "B", 2, 0, ymd(2020, 9, 1))};
  try {
    (void)compute_strength_features(fx, "Z", 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::team_absent);
  }
}

TEST_CASE("batch computation equals the single-row definition") {
  std::mt19937_64 rng(11);
  std::vector<Fixture> fx;
  const std::vector<std::string> teams{"A", "B", "C", "D", "E", "F"};
  std::uniform_int_distribution<int> goals(0, 3);
  int id = 0;
  for (const std::string season : {"2020-2021", "2021-2022"}) {
    for (int round = 1; round <= 8; ++round) {
      auto order = teams;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t m = 0; m < order.size(); m += 2) {
        // two fixtures per round share a date to exercise same-day ordering
        const unsigned day = 1 + static_cast<unsigned>(m / 4);
        fx.push_back(make_fixture("f" + std::to_string(id++), order[m], order[m + 1], goals(rng), goals(rng),
                                  ymd(season == "2020-2021" ? 2020 : 2021, 9 + static_cast<unsigned>(round) / 3,
                                      static_cast<unsigned>(round % 3) * 7 + day),
                                  round, season));
      }
    }
  }
  std::shuffle(fx.begin(), fx.end(), rng);
  const auto all = compute_all_strength_features(fx);
  REQUIRE(all.size() == fx.size());
  for (std::size_t i = 0; i < fx.size(); ++i) {
    CHECK(all[i].first == compute_strength_features(fx, fx[i].home.team, i));
    CHECK(all[i].second == compute_strength_features(fx, fx[i].away.team, i));
    CHECK(all[i].first.points_ratio_overall >= 0);
    CHECK(all[i].first.points_ratio_overall <= 1);
  }
}
