#include "fdml/fixture.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <fstream>

#include "fdml/error.hpp"
#include "fdml/formation.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

std::string_view target_name(Target target) noexcept {
  switch (target) {
    case Target::goals: return "goals";
    case Target::red_cards: return "red_cards";
    case Target::yellow_cards: return "yellow_cards";
    case Target::possession: return "possession";
    case Target::corners: return "corners";
  }
  return "goals";
}

std::optional<Target> parse_target(std::string_view name) {
  for (Target t : kAllTargets)
    if (target_name(t) == name) return t;
  return std::nullopt;
}

double TeamStats::get(Target target) const noexcept {
  switch (target) {
    case Target::goals: return goals;
    case Target::red_cards: return red_cards;
    case Target::yellow_cards: return yellow_cards;
    case Target::possession: return possession;
    case Target::corners: return corners;
  }
  return goals;
}

std::optional<std::chrono::year_month_day> parse_date(std::string_view text) {
  const std::string t = trim(text);
  if (t.size() != 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
  auto y = parse_int(std::string_view(t).substr(0, 4));
  auto m = parse_int(std::string_view(t).substr(5, 2));
  auto d = parse_int(std::string_view(t).substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(*y)}, std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

int day_of_week(std::chrono::year_month_day date) {
  const std::chrono::weekday wd{std::chrono::sys_days{date}};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

const std::vector<std::string>& ColumnSchema::required_fields() {
  static const std::vector<std::string> fields{
      "fixture_id",        "season",           "league",          "round",          "date",
      "home_team",         "away_team",        "home_formation",  "away_formation", "home_goals",
      "away_goals",        "home_corners",     "away_corners",    "home_possession", "away_possession",
      "home_yellow_cards", "away_yellow_cards", "home_red_cards", "away_red_cards", "home_cl_flag",
      "away_cl_flag"};
  return fields;
}

const std::vector<std::string>& ColumnSchema::optional_fields() {
  static const std::vector<std::string> fields{"stage", "temperature", "humidity"};
  return fields;
}

ColumnSchema ColumnSchema::identity() {
  ColumnSchema s;
  for (const auto& f : required_fields()) s.map_[f] = f;
  for (const auto& f : optional_fields()) s.map_[f] = f;
  return s;
}

ColumnSchema ColumnSchema::from_key_values(const KeyValueMap& overrides) {
  ColumnSchema s = identity();
  for (const auto& [key, value] : overrides) {
    if (!s.map_.count(key)) throw Error(ErrorCode::config, "unknown canonical column '" + key + "' in schema");
    s.map_[key] = value;
  }
  return s;
}

const std::string& ColumnSchema::source(std::string_view field) const {
  auto it = map_.find(std::string(field));
  if (it == map_.end()) throw Error(ErrorCode::schema, "no such canonical column '" + std::string(field) + "'");
  return it->second;
}

std::optional<std::string> check_fixture(const Fixture& f) {
  if (f.round < 1) return "round_positive";
  if (std::abs(f.home.stats.possession + f.away.stats.possession - 100.0) > 0.5) return "possession_sum";
  if (!parse_formation_lines(f.home.formation_raw) || !parse_formation_lines(f.away.formation_raw))
    return "formation_outfielders";
  for (const TeamLine* side : {&f.home, &f.away}) {
    const auto& s = side->stats;
    for (double v : {s.goals, s.corners, s.possession, s.yellow_cards, s.red_cards})
      if (!(v >= 0)) return "non_negative";
  }
  return std::nullopt;
}

namespace {

std::optional<bool> parse_bool(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "y") return true;
  if (t == "0" || t == "false" || t == "no" || t == "n") return false;
  return std::nullopt;
}

struct RowParseFailure {
  std::string rule;
};

}  // namespace

FixtureParseResult parse_fixture_table(const std::filesystem::path& path, const ColumnSchema& schema, char delim) {
  const Table table = read_table(path, delim);

  std::map<std::string, std::size_t> col;
  for (const auto& field : ColumnSchema::required_fields()) {
    auto idx = table.column(schema.source(field));
    if (!idx) throw Error(ErrorCode::schema, "missing column '" + schema.source(field) + "' (field " + field + ")");
    col[field] = *idx;
  }
  for (const auto& field : ColumnSchema::optional_fields())
    if (auto idx = table.column(schema.source(field))) col[field] = *idx;

  FixtureParseResult result;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    auto cell = [&](const std::string& field) -> std::string {
      const auto idx = col.at(field);
      return idx < row.size() ? trim(row[idx]) : std::string{};
    };
    const std::string id = col.count("fixture_id") && col["fixture_id"] < row.size() ? trim(row[col["fixture_id"]])
                                                                                     : std::string{};
    if (row.size() != table.header.size()) {
      result.rejects.push_back({id, "field_count", line});
      continue;
    }
    try {
      auto number = [&](const std::string& field) {
        auto v = parse_double(cell(field));
        if (!v || !std::isfinite(*v)) throw RowParseFailure{"unparseable_numeric:" + field};
        return *v;
      };
      auto optional_number = [&](const std::string& field) -> std::optional<double> {
        if (!col.count(field)) return std::nullopt;
        const std::string text = cell(field);
        if (text.empty() || to_lower(text) == "na" || to_lower(text) == "nan") return std::nullopt;
        auto v = parse_double(text);
        if (!v || !std::isfinite(*v)) throw RowParseFailure{"unparseable_numeric:" + field};
        return v;
      };
      auto flag = [&](const std::string& field) {
        auto v = parse_bool(cell(field));
        if (!v) throw RowParseFailure{"unparseable_flag:" + field};
        return *v;
      };

      Fixture f;
      f.fixture_id = id;
      if (f.fixture_id.empty()) throw RowParseFailure{"missing_fixture_id"};
      f.season = cell("season");
      f.league = cell("league");
      auto round = parse_int(cell("round"));
      if (!round) throw RowParseFailure{"unparseable_numeric:round"};
      f.round = static_cast<int>(*round);
      auto date = parse_date(cell("date"));
      if (!date) throw RowParseFailure{"bad_date"};
      f.date = *date;
      if (col.count("stage")) f.stage = cell("stage");
      f.home.team = cell("home_team");
      f.away.team = cell("away_team");
      f.home.formation_raw = cell("home_formation");
      f.away.formation_raw = cell("away_formation");
      f.home.stats = {number("home_goals"), number("home_corners"), number("home_possession"),
                      number("home_yellow_cards"), number("home_red_cards")};
      f.away.stats = {number("away_goals"), number("away_corners"), number("away_possession"),
                      number("away_yellow_cards"), number("away_red_cards")};
      f.home.cl_flag = flag("home_cl_flag");
      f.away.cl_flag = flag("away_cl_flag");
      f.temperature = optional_number("temperature");
      f.humidity = optional_number("humidity");

      if (auto rule = check_fixture(f)) {
        result.rejects.push_back({f.fixture_id, *rule, line});
        continue;
      }
      result.fixtures.push_back(std::move(f));
    } catch (const RowParseFailure& failure) {
      result.rejects.push_back({id, failure.rule, line});
    }
  }
  return result;
}

void write_fixture_table(const std::filesystem::path& path, const std::vector<Fixture>& fixtures) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  std::vector<std::string> header = ColumnSchema::required_fields();
  header.insert(header.end(), ColumnSchema::optional_fields().begin(), ColumnSchema::optional_fields().end());
  out << join_record(header, ',') << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  for (const auto& f : fixtures) {
    std::vector<std::string> row{f.fixture_id,
                                 f.season,
                                 f.league,
                                 std::to_string(f.round),
                                 format_date(f.date),
                                 f.home.team,
                                 f.away.team,
                                 f.home.formation_raw,
                                 f.away.formation_raw,
                                 format_double(f.home.stats.goals),
                                 format_double(f.away.stats.goals),
                                 format_double(f.home.stats.corners),
                                 format_double(f.away.stats.corners),
                                 format_double(f.home.stats.possession),
                                 format_double(f.away.stats.possession),
                                 format_double(f.home.stats.yellow_cards),
                                 format_double(f.away.stats.yellow_cards),
                                 format_double(f.home.stats.red_cards),
                                 format_double(f.away.stats.red_cards),
                                 f.home.cl_flag ? "1" : "0",
                                 f.away.cl_flag ? "1" : "0",
                                 f.stage,
                                 opt(f.temperature),
                                 opt(f.humidity)};
    out << join_record(row, ',') << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

void write_reject_report(const std::filesystem::path& path, const std::vector<RejectEntry>& rejects) {
  std::string text;
  for (const auto& r : rejects) text += r.fixture_id + "," + r.rule + "\n";
  write_text_file(path, text);
}

}  // namespace fdml
