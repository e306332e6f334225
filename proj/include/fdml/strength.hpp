#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdml/fixture.hpp"

namespace fdml {

struct StrengthFeatures {
  double points_ratio_overall = 0.5;
  double points_ratio_side = 0.5;
  int ranking = 1;
  int streak = 0;
  bool cl_flag = false;

  friend bool operator==(const StrengthFeatures&, const StrengthFeatures&) = default;
};

inline constexpr std::size_t kStrengthWidth = 5;

// Pre-fixture standings for one season-league. Results are recorded after the
// features of every fixture on the same date have been read.
class StrengthTracker {
 public:
  StrengthFeatures features(const std::string& team, bool at_home, bool cl_flag) const;
  void record(const Fixture& fixture);

  // 1 + number of teams with strictly more points.
  int ranking(const std::string& team) const;

 private:
  struct Record {
    int points = 0;
    int played = 0;
    int home_points = 0;
    int home_played = 0;
    int away_points = 0;
    int away_played = 0;
    int streak = 0;
  };
  std::map<std::string, Record, std::less<>> teams_;
};

// Features of `team` entering fixtures[as_of]: only fixtures of the same
// season and league dated strictly before it are used. Throws
// Error(team_absent) if the team never plays in that season-league.
StrengthFeatures compute_strength_features(std::span<const Fixture> fixtures, std::string_view team,
                                           std::size_t as_of);

// (home, away) features for every fixture, in input order. One pass per
// season-league; equal to calling compute_strength_features per row.
std::vector<std::pair<StrengthFeatures, StrengthFeatures>> compute_all_strength_features(
    std::span<const Fixture> fixtures);

}  // namespace fdml
