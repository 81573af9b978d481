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

#include "spdectl/noise_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "spdectl/error.hpp"
#include "spdectl/spectral_synth.hpp"

namespace spdectl {

NoiseModel::NoiseModel(const Grid& grid, NoiseKind kind, std::vector<double> eigenvalues)
    : grid_(grid), kind_(kind), eigenvalues_(std::move(eigenvalues)) {
  const int modes = static_cast<int>(eigenvalues_.size());
  if (modes < 1) throw Error(ErrorCode::InvalidArgument, "noise model needs at least one mode");
  if (modes > grid.intervals() - 1) {
    throw Error(ErrorCode::TruncationTooLarge,
                fmt::format("{} modes exceed the J-1={} representable on the grid", modes, grid.intervals() - 1));
  }
  for (double lambda : eigenvalues_) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("eigenvalue {} must be finite and >= 0", lambda));
    }
  }

  const double L = grid.length();
  basis_.resize(grid.size(), modes);
  for (int s = 1; s <= modes; ++s) {
    for (int k = 0; k < grid.size(); ++k) {
      const double xi = (grid.node(k) - grid.a()) / L;
      double v;
      if (grid.bc() == Boundary::DirichletZero) {
        v = std::sqrt(2.0 / L) * std::sin(s * std::numbers::pi * xi);
      } else if (s == 1) {
        v = 1.0 / std::sqrt(L);
      } else {
        v = std::sqrt(2.0 / L) * std::cos((s - 1) * std::numbers::pi * xi);
      }
      basis_(k, s - 1) = v;
    }
  }
  if (grid.bc() == Boundary::DirichletZero) {
    basis_.row(0).setZero();
    basis_.row(grid.intervals()).setZero();
  }
  synth_ = std::make_shared<const SpectralSynth>(grid, modes);
}

Field NoiseModel::eigenfunction(int s) const { return Field(grid_, basis_.col(s)); }

NoiseModel build_eigenbasis(const Grid& grid, int modes) {
  if (modes < 1) throw Error(ErrorCode::InvalidArgument, "noise model needs at least one mode");
  return NoiseModel(grid, NoiseKind::Cylindrical, std::vector<double>(static_cast<std::size_t>(modes), 1.0));
}

NoiseModel build_eigenbasis(const Grid& grid, std::vector<double> eigenvalues) {
  return NoiseModel(grid, NoiseKind::Diagonal, std::move(eigenvalues));
}

StreamKey StreamKey::child(std::uint64_t w) const {
  StreamKey k = *this;
  k.words.push_back(w);
  return k;
}

namespace {

std::mt19937_64 make_engine(const StreamKey& key) {
  std::vector<std::uint32_t> material;
  material.reserve(2 * key.words.size() + 1);
  material.push_back(static_cast<std::uint32_t>(key.words.size()));
  for (std::uint64_t w : key.words) {
    material.push_back(static_cast<std::uint32_t>(w & 0xffffffffULL));
    material.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(material.begin(), material.end());
  return std::mt19937_64(seq);
}

void check_row(const NoiseModel& model, std::span<const double> row) {
  if (static_cast<int>(row.size()) != model.modes()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("increment row has {} entries, model has {} modes", row.size(), model.modes()));
  }
}

}  // namespace

IncrementTable sample_increments(const StreamKey& key, int steps, const NoiseModel& model, double dt) {
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "negative step count");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  IncrementTable table;
  table.dt = dt;
  table.key = key;
  table.dbeta.resize(steps, model.modes());
  auto engine = make_engine(key);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  double* p = table.dbeta.data();
  for (Eigen::Index i = 0; i < table.dbeta.size(); ++i) p[i] = normal(engine);
  return table;
}

IncrementTable sample_increments(std::uint64_t seed, std::uint64_t rollout_index, int steps,
                                 const NoiseModel& model, double dt) {
  return sample_increments(StreamKey{seed, rollout_index}, steps, model, dt);
}

NoiseScratch::NoiseScratch(const NoiseModel& model)
    : coeffs(static_cast<std::size_t>(model.modes())),
      in(static_cast<std::size_t>(model.synth().transform_size())),
      out(static_cast<std::size_t>(model.synth().transform_size())) {}

void assemble_noise_into(const NoiseModel& model, std::span<const double> dbeta_row, NoiseScratch& scratch,
                         Eigen::Ref<Eigen::VectorXd> out) {
  check_row(model, dbeta_row);
  for (int s = 0; s < model.modes(); ++s) {
    scratch.coeffs[s] = std::sqrt(model.eigenvalues()[s]) * dbeta_row[s];
  }
  model.synth().synthesize(scratch.coeffs, scratch.in, scratch.out, out);
  apply_bc_inplace(model.grid(), out);
}

Field assemble_noise_field(const NoiseModel& model, std::span<const double> dbeta_row) {
  Field f(model.grid());
  NoiseScratch scratch(model);
  assemble_noise_into(model, dbeta_row, scratch, f.values);
  return f;
}

Field assemble_noise_field_direct(const NoiseModel& model, std::span<const double> dbeta_row) {
  check_row(model, dbeta_row);
  Field f(model.grid());
  const Eigen::MatrixXd& e = model.basis();
  for (Eigen::Index k = 0; k < e.rows(); ++k) {
    double acc = 0.0;
    for (int s = 0; s < model.modes(); ++s) acc += std::sqrt(model.eigenvalues()[s]) * e(k, s) * dbeta_row[s];
    f.values[k] = acc;
  }
  apply_bc_inplace(model.grid(), f.values);
  return f;
}

}  // namespace spdectl
