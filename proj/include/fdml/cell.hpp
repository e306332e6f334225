#pragma once

#include <compare>
#include <string>

namespace fdml {

// Ordered (main, rival) pair of 1-based formation group indices.
struct TreatmentCell {
  int main = 1;
  int rival = 1;

  TreatmentCell transposed() const noexcept { return {rival, main}; }
  bool is_diagonal() const noexcept { return main == rival; }

  friend bool operator==(TreatmentCell, TreatmentCell) = default;
  friend auto operator<=>(TreatmentCell, TreatmentCell) = default;
};

std::string to_string(TreatmentCell cell);

}  // namespace fdml
