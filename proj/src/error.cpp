#include "fdml/error.hpp"

namespace fdml {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return "E_IO";
    case ErrorCode::schema: return "E_SCHEMA";
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::validation: return "E_VALIDATION";
    case ErrorCode::unmapped_formation: return "E_UNMAPPED_FORMATION";
    case ErrorCode::team_absent: return "E_TEAM_ABSENT";
    case ErrorCode::dimension: return "E_DIMENSION";
    case ErrorCode::degenerate_column: return "E_DEGENERATE_COLUMN";
    case ErrorCode::rank_deficient: return "E_RANK_DEFICIENT";
    case ErrorCode::no_home_rows: return "E_NO_HOME_ROWS";
    case ErrorCode::empty_table: return "E_EMPTY_TABLE";
  }
  return "E_UNKNOWN";
}

}  // namespace fdml
