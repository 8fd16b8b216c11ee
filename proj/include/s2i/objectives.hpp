#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "s2i/encoder.hpp"
#include "s2i/masking.hpp"

namespace s2i {

/// n_patches x patch_dim values, one row per patch in row-major grid order.
/// Inside a patch the layout is (dy, dx, channel), so entries 0..2 are the
/// top-left pixel's (R, G, B).
struct PatchTensor {
  std::size_t n_patches = 0;
  std::size_t patch_dim = 0;
  std::vector<double> values;

  PatchTensor() = default;
  PatchTensor(std::size_t n, std::size_t dim) : n_patches(n), patch_dim(dim), values(n * dim, 0.0) {}

  std::span<double> patch(std::size_t i) { return {values.data() + i * patch_dim, patch_dim}; }
  std::span<const double> patch(std::size_t i) const { return {values.data() + i * patch_dim, patch_dim}; }
};

PatchTensor patchify(const S2IImage& img, const PatchGrid& grid);
S2IImage unpatchify(const PatchTensor& patches, const PatchGrid& grid);

// (1/|M|) * sum over masked patches of the squared L2 norm of pred - target.
double mae_loss(const PatchTensor& pred, const PatchTensor& target, const PatchMask& mask);
// mae_loss / patch_dim: mean squared error per element over masked patches.
double mae_loss_normalized(const PatchTensor& pred, const PatchTensor& target, const PatchMask& mask);

// Mean squared error of a caller-supplied x0 prediction over masked patches.
double diffmae_loss(const PatchTensor& pred_x0, const PatchTensor& true_x0, const PatchMask& mask);

/// Linear beta schedule from 1e-4 to 0.02, each beta raised to `rho`.
/// Arrays are stored 0-based but accessors take the 1-based timestep t.
struct DiffusionSchedule {
  std::size_t steps = 0;
  double rho = 1.0;
  std::vector<double> beta_values;
  std::vector<double> alpha_values;
  std::vector<double> alpha_bar_values;

  double beta(std::size_t t) const { return beta_values.at(t - 1); }
  double alpha(std::size_t t) const { return alpha_values.at(t - 1); }
  double alpha_bar(std::size_t t) const { return alpha_bar_values.at(t - 1); }
};

inline constexpr double kBetaStart = 1e-4;
inline constexpr double kBetaEnd = 0.02;

DiffusionSchedule build_schedule(std::size_t steps = 1000, double rho = 1.0);
std::string schedule_json(const DiffusionSchedule& sched);

// sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps.
PatchTensor forward_diffuse(const PatchTensor& x0, std::size_t t, const PatchTensor& eps,
                            const DiffusionSchedule& sched);

inline constexpr double kProbabilityFloor = 1e-12;

// -log(probs[label]) with probs[label] floored at 1e-12.
double cross_entropy(std::span<const double> probs, std::size_t label);

}  // namespace s2i
