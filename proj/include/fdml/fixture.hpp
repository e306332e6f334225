#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdml/keyvalue.hpp"

namespace fdml {

enum class Target { goals, red_cards, yellow_cards, possession, corners };

inline constexpr std::array<Target, 5> kAllTargets{Target::goals, Target::red_cards, Target::yellow_cards,
                                                   Target::possession, Target::corners};

std::string_view target_name(Target target) noexcept;
std::optional<Target> parse_target(std::string_view name);

struct TeamStats {
  double goals = 0;
  double corners = 0;
  double possession = 0;
  double yellow_cards = 0;
  double red_cards = 0;

  double get(Target target) const noexcept;
};

struct TeamLine {
  std::string team;
  std::string formation_raw;
  TeamStats stats;
  bool cl_flag = false;
};

struct Fixture {
  std::string fixture_id;
  std::string season;
  std::string league;
  int round = 1;
  std::chrono::year_month_day date{};
  std::string stage;  // empty means regular season
  TeamLine home;
  TeamLine away;
  std::optional<double> temperature;
  std::optional<double> humidity;
};

std::optional<std::chrono::year_month_day> parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);
// 0 = Monday .. 6 = Sunday
int day_of_week(std::chrono::year_month_day date);

// Canonical field -> source column. Fields not present in the file may be
// omitted for the optional ones (stage, temperature, humidity).
class ColumnSchema {
 public:
  static const std::vector<std::string>& required_fields();
  static const std::vector<std::string>& optional_fields();

  static ColumnSchema identity();
  // Overrides from `canonical = source` lines; unknown canonical keys are rejected.
  static ColumnSchema from_key_values(const KeyValueMap& overrides);

  const std::string& source(std::string_view field) const;

 private:
  KeyValueMap map_;
};

struct RejectEntry {
  std::string fixture_id;
  std::string rule;
  std::size_t line = 0;
};

struct FixtureParseResult {
  std::vector<Fixture> fixtures;
  std::vector<RejectEntry> rejects;
};

// Throws Error(schema) naming the first missing column.
FixtureParseResult parse_fixture_table(const std::filesystem::path& path, const ColumnSchema& schema,
                                       char delim = ',');

// Validation rule that a fixture breaks, or nullopt. Rule names are stable:
// possession_sum, formation_outfielders, round_positive, non_negative.
std::optional<std::string> check_fixture(const Fixture& fixture);

// Writes the canonical fixture format read back by parse_fixture_table with ColumnSchema::identity().
void write_fixture_table(const std::filesystem::path& path, const std::vector<Fixture>& fixtures);

// One line per rejected row: fixture_id,rule
void write_reject_report(const std::filesystem::path& path, const std::vector<RejectEntry>& rejects);

}  // namespace fdml
