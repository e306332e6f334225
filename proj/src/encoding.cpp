#include "fdml/encoding.hpp"

#include <numeric>

#include "fdml/error.hpp"

namespace fdml {

std::string to_string(TreatmentCell cell) {
  return "(" + std::to_string(cell.main) + "," + std::to_string(cell.rival) + ")";
}

void EncodingSpec::validate() const {
  if (k < 2) throw Error(ErrorCode::config, "effect coding needs k >= 2, got " + std::to_string(k));
  const auto ref = reference();
  if (ref.main < 1 || ref.main > k || ref.rival < 1 || ref.rival > k)
    throw Error(ErrorCode::config, "reference cell " + to_string(ref) + " outside the " + std::to_string(k) + "x" +
                                       std::to_string(k) + " grid");
}

std::vector<TreatmentCell> EncodingSpec::columns() const {
  const auto ref = reference();
  std::vector<TreatmentCell> cols;
  cols.reserve(static_cast<std::size_t>(k * k - 1));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j)
      if (TreatmentCell{i, j} != ref) cols.push_back({i, j});
  return cols;
}

std::size_t EffectCodedMatrix::column_of(TreatmentCell cell) const {
  const auto ref = spec.reference();
  if (cell == ref) throw Error(ErrorCode::validation, "reference cell " + to_string(cell) + " has no column");
  // row-major order with the reference skipped
  const auto flat = static_cast<std::size_t>((cell.main - 1) * spec.k + (cell.rival - 1));
  const auto ref_flat = static_cast<std::size_t>((ref.main - 1) * spec.k + (ref.rival - 1));
  return flat > ref_flat ? flat - 1 : flat;
}

EffectCodedMatrix build_effect_coded_matrix(std::span<const TreatmentCell> cells, const EncodingSpec& spec) {
  spec.validate();
  EffectCodedMatrix m;
  m.spec = spec;
  m.columns = spec.columns();
  m.row_cells.assign(cells.begin(), cells.end());
  const auto n = static_cast<Eigen::Index>(cells.size());
  const auto p = static_cast<Eigen::Index>(m.columns.size());
  m.values = Eigen::MatrixXd::Zero(n, p);
  const auto ref = spec.reference();
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto c = cells[static_cast<std::size_t>(r)];
    if (c.main < 1 || c.main > spec.k || c.rival < 1 || c.rival > spec.k)
      throw Error(ErrorCode::validation, "row " + std::to_string(r) + " has cell " + to_string(c) + " outside 1.." +
                                             std::to_string(spec.k));
    if (c == ref)
      m.values.row(r).setConstant(-1.0);
    else
      m.values(r, static_cast<Eigen::Index>(m.column_of(c))) = 1.0;
  }
  return m;
}

TreatmentCell decode_row(std::span<const double> code, const EncodingSpec& spec) {
  const auto cols = spec.columns();
  if (code.size() != cols.size()) throw Error(ErrorCode::dimension, "code vector length differs from k^2-1");
  bool all_negative = true;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i] == 1.0) return cols[i];
    if (code[i] != -1.0) all_negative = false;
  }
  if (all_negative) return spec.reference();
  throw Error(ErrorCode::validation, "code vector is not a valid effect-coded row");
}

double recover_omitted_beta(std::span<const double> betas) {
  return -std::accumulate(betas.begin(), betas.end(), 0.0);
}

}  // namespace fdml
