/*
 Copyright 2026 The spdectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <memory>
#include <span>

#include "spdectl/field_grid.hpp"

namespace spdectl {

/// Fast evaluation of sum_s c_s e_s(x_k) for the Dirichlet sine / Neumann cosine
/// eigenbasis through an FFTW type-I DST/DCT. The plan is created once (FFTW_ESTIMATE,
/// so the arithmetic is identical on every run) and executed concurrently from any thread.
class SpectralSynth {
 public:
  SpectralSynth(const Grid& grid, int modes);
  ~SpectralSynth();
  SpectralSynth(const SpectralSynth&) = delete;
  SpectralSynth& operator=(const SpectralSynth&) = delete;

  /// Size of the scratch buffers required by synthesize().
  int transform_size() const noexcept { return n_; }

  /// coeffs[s] multiplies the (s+1)-th orthonormal eigenfunction. Writes all J+1 nodes.
  void synthesize(std::span<const double> coeffs, std::span<double> scratch_in,
                  std::span<double> scratch_out, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  Grid grid_;
  int modes_;
  int n_;
  void* plan_;  // fftw_plan
};

}  // namespace spdectl
