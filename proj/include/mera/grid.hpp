#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace mera {

/// A map coordinate. Ordered by (row, col), which is the tie-break order used
/// throughout the planner.
struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
  friend constexpr Cell operator+(Cell a, Cell b) { return {a.row + b.row, a.col + b.col}; }
  friend constexpr Cell operator-(Cell a, Cell b) { return {a.row - b.row, a.col - b.col}; }
};

inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

inline bool adjacent8(Cell a, Cell b) { return chebyshev(a, b) == 1; }

struct Extent {
  int rows = 0;
  int cols = 0;

  constexpr bool contains(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols;
  }
  constexpr std::size_t area() const { return static_cast<std::size_t>(rows) * cols; }
  friend constexpr bool operator==(const Extent&, const Extent&) = default;
};

/// Dense row-major grid.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{}) : extent_{rows, cols}, data_(extent_.area(), fill) {}
  explicit Grid(Extent e, T fill = T{}) : Grid(e.rows, e.cols, fill) {}

  int rows() const { return extent_.rows; }
  int cols() const { return extent_.cols; }
  Extent extent() const { return extent_; }
  bool contains(Cell c) const { return extent_.contains(c); }
  bool empty() const { return data_.empty(); }

  typename std::vector<T>::reference operator[](Cell c) { return data_[index(c)]; }
  typename std::vector<T>::const_reference operator[](Cell c) const { return data_[index(c)]; }
  typename std::vector<T>::reference at(int r, int c) { return data_[index({r, c})]; }
  typename std::vector<T>::const_reference at(int r, int c) const { return data_[index({r, c})]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  const std::vector<T>& data() const { return data_; }

  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * extent_.cols + c.col; }
  Cell cell_of(std::size_t i) const {
    return {static_cast<int>(i / extent_.cols), static_cast<int>(i % extent_.cols)};
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Extent extent_{};
  std::vector<T> data_;
};

}  // namespace mera
