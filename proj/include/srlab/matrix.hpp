#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace srlab {

/// Dense row-major square matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }

  double& at(int i, int j) {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  double at(int i, int j) const {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace srlab
