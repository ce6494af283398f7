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

#pragma once

#include <span>
#include <vector>

namespace objdyn {

/// Savitzky–Golay smoothing: each output is the value at that sample of the
/// least-squares polynomial of degree `order` over `window` samples. Near the
/// ends the window is truncated to stay inside the signal (one-sided fit), so
/// any polynomial of degree <= order is reproduced exactly everywhere.
/// Throws kInvalidArgument unless window is odd, window > order and
/// signal.size() >= window.
std::vector<double> savitzky_golay(std::span<const double> signal, int window, int order);

/// Weights w with smoothed[i] = Σ_j w[j] · signal[start + j] for a fit
/// evaluated at offset `eval` inside the window.
std::vector<double> savitzky_golay_weights(int window, int order, int eval);

}  // namespace objdyn
