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

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spdectl/field_grid.hpp"

namespace spdectl {

class SpectralSynth;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class NoiseKind { Cylindrical, Diagonal };

/// Truncated Karhunen-Loeve expansion W = sum_s sqrt(lambda_s) beta_s e_s over the
/// Laplacian eigenbasis matching the grid's boundary condition.
class NoiseModel {
 public:
  NoiseModel(const Grid& grid, NoiseKind kind, std::vector<double> eigenvalues);

  const Grid& grid() const noexcept { return grid_; }
  NoiseKind kind() const noexcept { return kind_; }
  int modes() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  double eigenvalue(int s) const { return eigenvalues_.at(s); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

  /// (J+1) x modes matrix; column s holds e_{s+1} sampled on the nodes.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  Field eigenfunction(int s) const;

  const SpectralSynth& synth() const noexcept { return *synth_; }

 private:
  Grid grid_;
  NoiseKind kind_;
  std::vector<double> eigenvalues_;
  Eigen::MatrixXd basis_;
  std::shared_ptr<const SpectralSynth> synth_;
};

/// Cylindrical (all lambda_s = 1) model. Throws truncation-too-large if modes > J-1.
NoiseModel build_eigenbasis(const Grid& grid, int modes);
/// Diagonal covariance with the given eigenvalues (one per retained mode).
NoiseModel build_eigenbasis(const Grid& grid, std::vector<double> eigenvalues);

/// Identifies an independent random stream, e.g. (seed, rollout) or (seed, tag, step).
struct StreamKey {
  std::vector<std::uint64_t> words;

  StreamKey() = default;
  StreamKey(std::initializer_list<std::uint64_t> w) : words(w) {}
  StreamKey child(std::uint64_t w) const;
  bool operator==(const StreamKey&) const = default;
};

/// Tags separating the stream families derived from one master seed.
namespace stream_tag {
inline constexpr std::uint64_t train = 0x7472616eULL;
inline constexpr std::uint64_t eval = 0x6576616cULL;
inline constexpr std::uint64_t plant = 0x706c616eULL;
inline constexpr std::uint64_t mpc = 0x6d706300ULL;
inline constexpr std::uint64_t verify_base = 0x76626173ULL;
inline constexpr std::uint64_t verify_ctrl = 0x76637472ULL;
inline constexpr std::uint64_t simulate = 0x73696d75ULL;
}  // namespace stream_tag

/// Brownian increments dbeta_s(t_j) ~ N(0, dt); row j is one time step.
struct IncrementTable {
  RowMatrix dbeta;
  double dt = 0.0;
  StreamKey key;

  int steps() const noexcept { return static_cast<int>(dbeta.rows()); }
  std::span<const double> row(int j) const {
    return {dbeta.data() + static_cast<std::ptrdiff_t>(j) * dbeta.cols(), static_cast<std::size_t>(dbeta.cols())};
  }
};

IncrementTable sample_increments(const StreamKey& key, int steps, const NoiseModel& model, double dt);
IncrementTable sample_increments(std::uint64_t seed, std::uint64_t rollout_index, int steps,
                                 const NoiseModel& model, double dt);

/// sum_s sqrt(lambda_s) e_s(x_k) dbeta_s with the boundary condition applied.
Field assemble_noise_field(const NoiseModel& model, std::span<const double> dbeta_row);
/// Reference per-node summation against the sampled basis.
Field assemble_noise_field_direct(const NoiseModel& model, std::span<const double> dbeta_row);

/// Allocation-free variant used inside rollouts.
struct NoiseScratch {
  std::vector<double> coeffs;
  std::vector<double> in;
  std::vector<double> out;
  explicit NoiseScratch(const NoiseModel& model);
};
void assemble_noise_into(const NoiseModel& model, std::span<const double> dbeta_row, NoiseScratch& scratch,
                         Eigen::Ref<Eigen::VectorXd> out);

}  // namespace spdectl
