#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdml {

enum class ErrorCode {
  io,
  schema,
  config,
  validation,
  unmapped_formation,
  team_absent,
  dimension,
  degenerate_column,
  rank_deficient,
  no_home_rows,
  empty_table,
};

// Stable, machine-parsable identifier printed by the CLI ("E_SCHEMA", ...).
std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fdml
