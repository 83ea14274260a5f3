#pragma once

#include <cmath>
#include <random>

#include "dgad/autodiff.hpp"

namespace dgad {

inline ad::Matrix gaussian(int rows, int cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  ad::Matrix m(rows, cols);
  // row-major fill order keeps initial values independent of Eigen storage
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

inline ad::Matrix glorot(int fan_in, int fan_out, std::mt19937_64& rng) {
  return gaussian(fan_in, fan_out, std::sqrt(2.0 / (fan_in + fan_out)), rng);
}

}  // namespace dgad
