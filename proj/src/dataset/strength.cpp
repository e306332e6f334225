#include "fdml/strength.hpp"

#include <algorithm>
#include <numeric>

#include "fdml/error.hpp"

namespace fdml {

namespace {

constexpr double kNoHistoryRatio = 0.5;

double ratio(int points, int played) { return played == 0 ? kNoHistoryRatio : points / (3.0 * played); }

int points_for(double own, double other) { return own > other ? 3 : (own == other ? 1 : 0); }

bool same_partition(const Fixture& a, const Fixture& b) { return a.season == b.season && a.league == b.league; }

}  // namespace

int StrengthTracker::ranking(const std::string& team) const {
  auto it = teams_.find(team);
  const int own = it == teams_.end() ? 0 : it->second.points;
  int better = 0;
  for (const auto& [name, rec] : teams_)
    if (rec.points > own) ++better;
  return 1 + better;
}

StrengthFeatures StrengthTracker::features(const std::string& team, bool at_home, bool cl_flag) const {
  StrengthFeatures out;
  out.cl_flag = cl_flag;
  out.ranking = ranking(team);
  auto it = teams_.find(team);
  if (it == teams_.end()) return out;
  const Record& r = it->second;
  out.points_ratio_overall = ratio(r.points, r.played);
  out.points_ratio_side = at_home ? ratio(r.home_points, r.home_played) : ratio(r.away_points, r.away_played);
  out.streak = r.streak;
  return out;
}

void StrengthTracker::record(const Fixture& f) {
  const int hp = points_for(f.home.stats.goals, f.away.stats.goals);
  const int ap = points_for(f.away.stats.goals, f.home.stats.goals);
  Record& h = teams_[f.home.team];
  h.points += hp;
  h.played += 1;
  h.home_points += hp;
  h.home_played += 1;
  h.streak = hp == 3 ? h.streak + 1 : 0;
  Record& a = teams_[f.away.team];
  a.points += ap;
  a.played += 1;
  a.away_points += ap;
  a.away_played += 1;
  a.streak = ap == 3 ? a.streak + 1 : 0;
}

StrengthFeatures compute_strength_features(std::span<const Fixture> fixtures, std::string_view team,
                                           std::size_t as_of) {
  if (as_of >= fixtures.size()) throw Error(ErrorCode::validation, "as_of index outside the fixture sequence");
  const Fixture& target = fixtures[as_of];

  std::vector<std::size_t> prior;
  bool seen = false;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const Fixture& f = fixtures[i];
    if (!same_partition(f, target)) continue;
    if (f.home.team == team || f.away.team == team) seen = true;
    if (f.date < target.date) prior.push_back(i);
  }
  if (!seen)
    throw Error(ErrorCode::team_absent, "team '" + std::string(team) + "' does not play in " + target.league + " " +
                                            target.season);
  std::stable_sort(prior.begin(), prior.end(),
                   [&](std::size_t a, std::size_t b) { return fixtures[a].date < fixtures[b].date; });

  StrengthTracker tracker;
  for (std::size_t i : prior) tracker.record(fixtures[i]);

  const std::string name(team);
  if (target.home.team == team) return tracker.features(name, true, target.home.cl_flag);
  if (target.away.team == team) return tracker.features(name, false, target.away.cl_flag);
  StrengthFeatures out = tracker.features(name, true, false);
  out.points_ratio_side = out.points_ratio_overall;
  return out;
}

std::vector<std::pair<StrengthFeatures, StrengthFeatures>> compute_all_strength_features(
    std::span<const Fixture> fixtures) {
  std::vector<std::pair<StrengthFeatures, StrengthFeatures>> out(fixtures.size());

  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> partitions;
  for (std::size_t i = 0; i < fixtures.size(); ++i)
    partitions[{fixtures[i].season, fixtures[i].league}].push_back(i);

  for (auto& [key, idx] : partitions) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fixtures[a].date < fixtures[b].date; });
    StrengthTracker tracker;
    std::size_t begin = 0;
    while (begin < idx.size()) {
      std::size_t end = begin;
      while (end < idx.size() && fixtures[idx[end]].date == fixtures[idx[begin]].date) ++end;
      for (std::size_t p = begin; p < end; ++p) {
        const Fixture& f = fixtures[idx[p]];
        out[idx[p]] = {tracker.features(f.home.team, true, f.home.cl_flag),
                       tracker.features(f.away.team, false, f.away.cl_flag)};
      }
      for (std::size_t p = begin; p < end; ++p) tracker.record(fixtures[idx[p]]);
      begin = end;
    }
  }
  return out;
}

}  // namespace fdml
