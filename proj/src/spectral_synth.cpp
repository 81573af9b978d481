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

#include "spdectl/spectral_synth.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace spdectl {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralSynth::SpectralSynth(const Grid& grid, int modes) : grid_(grid), modes_(modes), n_(0), plan_(nullptr) {
  const int J = grid.intervals();
  n_ = grid.bc() == Boundary::DirichletZero ? J - 1 : J + 1;
  std::vector<double> in(n_), out(n_);
  const fftw_r2r_kind kind = grid.bc() == Boundary::DirichletZero ? FFTW_RODFT00 : FFTW_REDFT00;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_r2r_1d(n_, in.data(), out.data(), kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralSynth::~SpectralSynth() {
  if (plan_ != nullptr) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

void SpectralSynth::synthesize(std::span<const double> coeffs, std::span<double> scratch_in,
                               std::span<double> scratch_out, Eigen::Ref<Eigen::VectorXd> out) const {
  const int J = grid_.intervals();
  const double L = grid_.length();
  std::fill(scratch_in.begin(), scratch_in.end(), 0.0);
  if (grid_.bc() == Boundary::DirichletZero) {
    // RODFT00: Y_k = 2 sum_j X_j sin(pi (j+1)(k+1) / J); e_s = sqrt(2/L) sin(s pi x / L).
    const double scale = std::sqrt(2.0 / L) * 0.5;
    for (int s = 0; s < modes_; ++s) scratch_in[s] = scale * coeffs[s];
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), scratch_in.data(), scratch_out.data());
    out[0] = 0.0;
    for (int k = 1; k < J; ++k) out[k] = scratch_out[k - 1];
    out[J] = 0.0;
  } else {
    // REDFT00: Y_k = X_0 + (-1)^k X_{J} + 2 sum_{j=1}^{J-1} X_j cos(pi j k / J).
    // e_1 = 1/sqrt(L); e_{s>=2} = sqrt(2/L) cos((s-1) pi x / L).
    scratch_in[0] = coeffs[0] / std::sqrt(L);
    const double scale = std::sqrt(2.0 / L) * 0.5;
    for (int s = 1; s < modes_; ++s) scratch_in[s] = scale * coeffs[s];
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), scratch_in.data(), scratch_out.data());
    for (int k = 0; k <= J; ++k) out[k] = scratch_out[k];
  }
}

}  // namespace spdectl
