#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fdml/cell.hpp"

namespace fdml {

struct EncodingSpec {
  int k = 6;
  // Reference cell left out of the design; defaults to (k, k) when unset.
  TreatmentCell omitted{0, 0};

  TreatmentCell reference() const noexcept { return omitted.main == 0 ? TreatmentCell{k, k} : omitted; }
  // Row-major cells with the reference removed.
  std::vector<TreatmentCell> columns() const;
  void validate() const;
};

// Effect-coded treatment design: +1 in a row's own column, 0 elsewhere; a row
// in the reference cell is -1 in every column.
struct EffectCodedMatrix {
  EncodingSpec spec;
  std::vector<TreatmentCell> columns;
  std::vector<TreatmentCell> row_cells;
  Eigen::MatrixXd values;

  std::size_t column_of(TreatmentCell cell) const;  // throws for the reference cell
};

EffectCodedMatrix build_effect_coded_matrix(std::span<const TreatmentCell> cells, const EncodingSpec& spec);

// Cell encoded by a single code vector.
TreatmentCell decode_row(std::span<const double> code, const EncodingSpec& spec);

// Coefficient of the reference cell: minus the sum of all the others.
double recover_omitted_beta(std::span<const double> betas);

}  // namespace fdml
