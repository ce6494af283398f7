// Copyright 2026 The objdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "objdyn/savgol.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "objdyn/error.hpp"

namespace objdyn {

std::vector<double> savitzky_golay_weights(int window, int order, int eval) {
  const double half = 0.5 * (window - 1);
  const double scale = std::max(half, 1.0);
  Eigen::MatrixXd v(window, order + 1);
  for (int j = 0; j < window; ++j) {
    const double x = (j - eval) / scale;
    double p = 1.0;
    for (int k = 0; k <= order; ++k, p *= x) v(j, k) = p;
  }
  // Polynomial value at x = 0 is its constant coefficient.
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(order + 1);
  e0[0] = 1.0;
  const Eigen::VectorXd w = v * (v.transpose() * v).ldlt().solve(e0);
  return {w.data(), w.data() + w.size()};
}

std::vector<double> savitzky_golay(std::span<const double> signal, int window, int order) {
  if (window <= 0 || window % 2 == 0) throw Error(ErrorKind::kInvalidArgument, "savitzky_golay: window must be odd");
  if (order < 0 || window <= order) throw Error(ErrorKind::kInvalidArgument, "savitzky_golay: window must exceed order");
  const int n = static_cast<int>(signal.size());
  if (n < window) throw Error(ErrorKind::kInvalidArgument, "savitzky_golay: signal shorter than window");

  const int half = window / 2;
  const std::vector<double> centre = savitzky_golay_weights(window, order, half);
  std::vector<double> out(signal.size());
  for (int i = 0; i < n; ++i) {
    const int start = std::clamp(i - half, 0, n - window);
    const int eval = i - start;
    const std::vector<double> edge = eval == half ? std::vector<double>{} : savitzky_golay_weights(window, order, eval);
    const std::vector<double>& w = eval == half ? centre : edge;
    double acc = 0.0;
    for (int j = 0; j < window; ++j) acc += w[j] * signal[start + j];
    out[i] = acc;
  }
  return out;
}

}  // namespace objdyn
