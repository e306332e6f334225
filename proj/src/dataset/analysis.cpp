#include "fdml/analysis.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>

#include "fdml/error.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

namespace {

constexpr std::array<std::string_view, 7> kDayNames{"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
constexpr std::array<std::string_view, kStrengthWidth> kStrengthNames{
    "points_ratio_overall", "points_ratio_side", "ranking", "streak", "cl_flag"};
constexpr std::array<std::string_view, 5> kStatNames{"goals", "corners", "possession", "yellow_cards",
                                                     "red_cards"};

using PartitionKey = std::pair<std::string, std::string>;

std::vector<bool> round_keep_mask(std::span<const Fixture> fixtures, int drop_first, int drop_last) {
  std::map<PartitionKey, int> max_round;
  for (const auto& f : fixtures) {
    auto& m = max_round[{f.season, f.league}];
    m = std::max(m, f.round);
  }
  std::vector<bool> keep(fixtures.size());
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const auto& f = fixtures[i];
    const int last = max_round[{f.season, f.league}] - drop_last;
    keep[i] = f.round > drop_first && f.round <= last;
  }
  return keep;
}

void append_strength(std::vector<double>& out, const StrengthFeatures& s) {
  out.push_back(s.points_ratio_overall);
  out.push_back(s.points_ratio_side);
  out.push_back(static_cast<double>(s.ranking));
  out.push_back(static_cast<double>(s.streak));
  out.push_back(s.cl_flag ? 1.0 : 0.0);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::array<double, 5> stats_array(const TeamStats& s) {
  return {s.goals, s.corners, s.possession, s.yellow_cards, s.red_cards};
}

}  // namespace

std::vector<Fixture> filter_rounds(std::span<const Fixture> fixtures, int drop_first, int drop_last) {
  const auto keep = round_keep_mask(fixtures, drop_first, drop_last);
  std::vector<Fixture> out;
  for (std::size_t i = 0; i < fixtures.size(); ++i)
    if (keep[i]) out.push_back(fixtures[i]);
  return out;
}

std::vector<Fixture> filter_stages(std::span<const Fixture> fixtures, std::span<const std::string> regular_labels) {
  std::set<std::string> regular{"regular", "regular season", "regular_season"};
  for (const auto& l : regular_labels) regular.insert(to_lower(trim(l)));
  std::vector<Fixture> out;
  for (const auto& f : fixtures) {
    const std::string stage = to_lower(trim(f.stage));
    if (stage.empty() || regular.count(stage)) out.push_back(f);
  }
  return out;
}

ConfounderEncoder ConfounderEncoder::fit(std::span<const Fixture> fixtures) {
  ConfounderEncoder enc;
  std::set<std::string> seasons, leagues;
  std::vector<double> temps, hums;
  for (const auto& f : fixtures) {
    seasons.insert(f.season);
    leagues.insert(f.league);
    if (f.temperature) temps.push_back(*f.temperature);
    if (f.humidity) hums.push_back(*f.humidity);
  }
  enc.seasons_.assign(seasons.begin(), seasons.end());
  enc.leagues_.assign(leagues.begin(), leagues.end());
  enc.weather_ = !temps.empty() || !hums.empty();
  enc.temperature_median_ = median(temps);
  enc.humidity_median_ = median(hums);

  auto& names = enc.layout_.names;
  for (const auto& s : enc.seasons_) names.push_back("season=" + s);
  for (const auto& l : enc.leagues_) names.push_back("league=" + l);
  for (auto d : kDayNames) names.push_back("dow=" + std::string(d));
  if (enc.weather_) {
    names.insert(names.end(), {"temperature", "temperature_missing", "humidity", "humidity_missing"});
  }
  enc.layout_.shared_width = names.size();
  enc.layout_.is_home_column = names.size();
  names.push_back("is_home");
  enc.layout_.main_offset = names.size();
  for (auto n : kStrengthNames) names.push_back("main_" + std::string(n));
  enc.layout_.rival_offset = names.size();
  for (auto n : kStrengthNames) names.push_back("rival_" + std::string(n));
  return enc;
}

std::vector<double> ConfounderEncoder::shared_columns(const Fixture& f) const {
  std::vector<double> out;
  out.reserve(layout_.shared_width);
  for (const auto& s : seasons_) out.push_back(f.season == s ? 1.0 : 0.0);
  for (const auto& l : leagues_) out.push_back(f.league == l ? 1.0 : 0.0);
  const int dow = day_of_week(f.date);
  for (int d = 0; d < 7; ++d) out.push_back(d == dow ? 1.0 : 0.0);
  if (weather_) {
    out.push_back(f.temperature.value_or(temperature_median_));
    out.push_back(f.temperature ? 0.0 : 1.0);
    out.push_back(f.humidity.value_or(humidity_median_));
    out.push_back(f.humidity ? 0.0 : 1.0);
  }
  return out;
}

std::array<AnalysisRow, 2> expand_perspectives(const Fixture& fixture, Target target,
                                               const PerspectiveInputs& in) {
  std::array<AnalysisRow, 2> rows;
  auto& home = rows[0];
  auto& away = rows[1];
  for (auto* r : {&home, &away}) {
    r->fixture_id = fixture.fixture_id;
    r->league = fixture.league;
  }
  home.is_home = true;
  away.is_home = false;
  home.cell = {in.home_group.index(), in.away_group.index()};
  away.cell = home.cell.transposed();
  home.main_stats = away.rival_stats = fixture.home.stats;
  home.rival_stats = away.main_stats = fixture.away.stats;
  home.outcome = fixture.home.stats.get(target) - fixture.away.stats.get(target);
  away.outcome = -home.outcome;

  home.confounders = in.shared;
  home.confounders.push_back(1.0);
  append_strength(home.confounders, in.home_strength);
  append_strength(home.confounders, in.away_strength);
  away.confounders = in.shared;
  away.confounders.push_back(0.0);
  append_strength(away.confounders, in.away_strength);
  append_strength(away.confounders, in.home_strength);
  return rows;
}

AnalysisRow mirror_row(const AnalysisRow& row, const ConfounderLayout& layout) {
  AnalysisRow m = row;
  m.is_home = !row.is_home;
  m.cell = row.cell.transposed();
  m.outcome = -row.outcome;
  std::swap(m.main_stats, m.rival_stats);
  m.confounders[layout.is_home_column] = 1.0 - row.confounders[layout.is_home_column];
  for (std::size_t i = 0; i < kStrengthWidth; ++i) {
    m.confounders[layout.main_offset + i] = row.confounders[layout.rival_offset + i];
    m.confounders[layout.rival_offset + i] = row.confounders[layout.main_offset + i];
  }
  return m;
}

Eigen::MatrixXd AnalysisTable::confounder_matrix() const {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(layout.width());
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = rows[static_cast<std::size_t>(i)].confounders;
    if (static_cast<Eigen::Index>(c.size()) != p)
      throw Error(ErrorCode::dimension, "confounder vector length differs across rows");
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = c[static_cast<std::size_t>(j)];
  }
  return x;
}

Eigen::VectorXd AnalysisTable::outcomes() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i].outcome;
  return y;
}

std::vector<std::string> AnalysisTable::fixture_ids() const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const auto& r : rows) ids.push_back(r.fixture_id);
  return ids;
}

void AnalysisTable::set_target(Target t) {
  target = t;
  for (auto& r : rows) r.outcome = r.main_stats.get(t) - r.rival_stats.get(t);
}

AnalysisTable prepare_analysis(std::span<const Fixture> fixtures, const FormationMapping& mapping,
                               const PrepareOptions& options, PrepareLog* log) {
  const std::vector<Fixture> regular = filter_stages(fixtures, options.regular_stage_labels);
  const auto strength = compute_all_strength_features(regular);
  const auto keep = round_keep_mask(regular, options.drop_first, options.drop_last);

  std::vector<std::size_t> retained;
  std::set<std::string> unmapped;
  std::map<PartitionKey, std::pair<int, int>> rounds;
  for (std::size_t i = 0; i < regular.size(); ++i) {
    if (!keep[i]) continue;
    retained.push_back(i);
    const auto& f = regular[i];
    for (const auto* raw : {&f.home.formation_raw, &f.away.formation_raw})
      if (!mapping.contains(*raw)) unmapped.insert(*raw);
    auto [it, inserted] = rounds.try_emplace({f.season, f.league}, f.round, f.round);
    it->second.first = std::min(it->second.first, f.round);
    it->second.second = std::max(it->second.second, f.round);
  }
  if (!unmapped.empty()) {
    std::string list;
    for (const auto& u : unmapped) list += (list.empty() ? "" : ", ") + u;
    throw Error(ErrorCode::unmapped_formation, "unmapped formations: " + list);
  }

  std::vector<Fixture> kept;
  kept.reserve(retained.size());
  for (auto i : retained) kept.push_back(regular[i]);
  const ConfounderEncoder encoder = ConfounderEncoder::fit(kept);

  AnalysisTable table;
  table.target = options.target;
  table.layout = encoder.layout();
  table.rows.reserve(2 * retained.size());
  for (auto i : retained) {
    const auto& f = regular[i];
    PerspectiveInputs in{mapping.group(f.home.formation_raw), mapping.group(f.away.formation_raw),
                         encoder.shared_columns(f), strength[i].first, strength[i].second};
    for (auto& row : expand_perspectives(f, options.target, in)) table.rows.push_back(std::move(row));
  }

  if (log) {
    log->input_fixtures = fixtures.size();
    log->after_stage_filter = regular.size();
    log->after_round_filter = retained.size();
    log->analysis_rows = table.rows.size();
    log->retained_rounds.clear();
    for (const auto& [key, range] : rounds) log->retained_rounds.push_back({key.first + "/" + key.second, range});
  }
  return table;
}

void write_analysis_table(const std::filesystem::path& path, const AnalysisTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  std::vector<std::string> header{"fixture_id", "league", "is_home", "main_group", "rival_group"};
  for (auto s : kStatNames) header.push_back("main_" + std::string(s));
  for (auto s : kStatNames) header.push_back("rival_" + std::string(s));
  for (const auto& n : table.layout.names) header.push_back("x." + n);
  out << join_record(header, ',') << '\n';
  for (const auto& r : table.rows) {
    std::vector<std::string> row{r.fixture_id, r.league, r.is_home ? "1" : "0",
                                 std::string(FormationGroup::from_index(r.cell.main).label()),
                                 std::string(FormationGroup::from_index(r.cell.rival).label())};
    for (double v : stats_array(r.main_stats)) row.push_back(format_double(v));
    for (double v : stats_array(r.rival_stats)) row.push_back(format_double(v));
    for (double v : r.confounders) row.push_back(format_double(v));
    out << join_record(row, ',') << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

AnalysisTable read_analysis_table(const std::filesystem::path& path, Target target) {
  const Table t = read_table(path, ',');
  auto require = [&](const std::string& name) {
    auto idx = t.column(name);
    if (!idx) throw Error(ErrorCode::schema, "analysis table '" + path.string() + "' lacks column '" + name + "'");
    return *idx;
  };
  const auto c_id = require("fixture_id");
  const auto c_league = require("league");
  const auto c_home = require("is_home");
  const auto c_main = require("main_group");
  const auto c_rival = require("rival_group");
  std::array<std::size_t, 5> c_main_stats{}, c_rival_stats{};
  for (std::size_t s = 0; s < kStatNames.size(); ++s) {
    c_main_stats[s] = require("main_" + std::string(kStatNames[s]));
    c_rival_stats[s] = require("rival_" + std::string(kStatNames[s]));
  }

  AnalysisTable table;
  table.target = target;
  std::vector<std::size_t> x_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c].rfind("x.", 0) == 0) {
      x_cols.push_back(c);
      table.layout.names.push_back(t.header[c].substr(2));
    }
  }
  auto find_name = [&](const std::string& name) {
    auto it = std::find(table.layout.names.begin(), table.layout.names.end(), name);
    if (it == table.layout.names.end())
      throw Error(ErrorCode::schema, "analysis table lacks confounder '" + name + "'");
    return static_cast<std::size_t>(it - table.layout.names.begin());
  };
  table.layout.is_home_column = find_name("is_home");
  table.layout.shared_width = table.layout.is_home_column;
  table.layout.main_offset = find_name("main_points_ratio_overall");
  table.layout.rival_offset = find_name("rival_points_ratio_overall");

  auto num = [&](const std::vector<std::string>& row, std::size_t c, std::size_t line) {
    auto v = c < row.size() ? parse_double(row[c]) : std::nullopt;
    if (!v)
      throw Error(ErrorCode::schema, "analysis table line " + std::to_string(line) + ": bad number in column '" +
                                         t.header[c] + "'");
    return *v;
  };
  auto group = [&](const std::string& label, std::size_t line) {
    auto g = FormationGroup::from_label(trim(label));
    if (!g) throw Error(ErrorCode::schema, "analysis table line " + std::to_string(line) + ": unknown group '" + label + "'");
    return g->index();
  };

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto line = t.line_numbers[r];
    if (row.size() != t.header.size())
      throw Error(ErrorCode::schema, "analysis table line " + std::to_string(line) + ": wrong field count");
    AnalysisRow a;
    a.fixture_id = row[c_id];
    a.league = row[c_league];
    a.is_home = num(row, c_home, line) != 0.0;
    a.cell = {group(row[c_main], line), group(row[c_rival], line)};
    auto fill = [&](TeamStats& s, const std::array<std::size_t, 5>& cols) {
      s.goals = num(row, cols[0], line);
      s.corners = num(row, cols[1], line);
      s.possession = num(row, cols[2], line);
      s.yellow_cards = num(row, cols[3], line);
      s.red_cards = num(row, cols[4], line);
    };
    fill(a.main_stats, c_main_stats);
    fill(a.rival_stats, c_rival_stats);
    a.confounders.reserve(x_cols.size());
    for (auto c : x_cols) a.confounders.push_back(num(row, c, line));
    table.rows.push_back(std::move(a));
  }
  table.set_target(target);
  return table;
}

}  // namespace fdml
