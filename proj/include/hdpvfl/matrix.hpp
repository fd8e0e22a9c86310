// Copyright 2026 The HDP-VFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDPVFL_MATRIX_HPP_
#define HDPVFL_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hdpvfl {

// Dense row-major matrix. Small enough problems that a plain vector wins
// over pulling in a linear-algebra dependency.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data).subspan(i * cols, cols);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(data).subspan(i * cols, cols);
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> v) {
  return std::sqrt(dot(v, v));
}

}  // namespace hdpvfl

#endif  // HDPVFL_MATRIX_HPP_
