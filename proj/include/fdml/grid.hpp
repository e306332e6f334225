#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fdml/cell.hpp"

namespace fdml {

// k x k values addressed by 0-based (row, col) or by a 1-based TreatmentCell.
template <class T>
class SquareGrid {
 public:
  SquareGrid() = default;
  explicit SquareGrid(int k, T fill = T{}) : k_(k), data_(static_cast<std::size_t>(k * k), fill) {}

  int k() const noexcept { return k_; }
  T& operator()(int row, int col) { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const { return data_[index(row, col)]; }
  T& at(TreatmentCell c) { return (*this)(c.main - 1, c.rival - 1); }
  const T& at(TreatmentCell c) const { return (*this)(c.main - 1, c.rival - 1); }

  friend bool operator==(const SquareGrid&, const SquareGrid&) = default;

 private:
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row * k_ + col); }
  int k_ = 0;
  std::vector<T> data_;
};

// Row/column header label of a grid index (group labels when k is 6).
std::string grid_label(int index0, int k);

// Header row and first column carry the labels; `digits` < 0 means
// shortest round-trip formatting. Lines starting with '#' are comments.
std::string grid_to_csv(const SquareGrid<double>& grid, int digits = -1);
std::string grid_to_csv(const SquareGrid<std::string>& grid);
std::string grid_to_csv(const SquareGrid<long>& grid);
SquareGrid<double> parse_grid_csv(const std::string& text);
SquareGrid<double> read_grid_csv(const std::filesystem::path& path);

}  // namespace fdml
