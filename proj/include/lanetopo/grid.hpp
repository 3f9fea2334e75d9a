#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lanetopo {

/// Dense row-major 2D array. Used for topology matrices (bool) and
/// confidence/distance tables (double).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  decltype(auto) operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  decltype(auto) operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  decltype(auto) at(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("grid index out of range");
    return data_[r * cols_ + c];
  }
  decltype(auto) at(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("grid index out of range");
    return data_[r * cols_ + c];
  }

  const std::vector<T>& values() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using BoolGrid = Grid<bool>;
using RealGrid = Grid<double>;

}  // namespace lanetopo
