#include "s2i/objectives.hpp"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "s2i/error.hpp"

namespace s2i {

namespace {

void check_grid_matches(const PatchGrid& grid, std::size_t h, std::size_t w) {
  if (grid.patch_size == 0 || grid.grid_h * grid.patch_size != h || grid.grid_w * grid.patch_size != w)
    throw ValueError(fmt::format("patch grid {}x{} of size {} does not tile a {}x{} image", grid.grid_h,
                                 grid.grid_w, grid.patch_size, h, w));
}

void check_pair(const PatchTensor& a, const PatchTensor& b, const PatchMask& mask) {
  if (a.n_patches != b.n_patches || a.patch_dim != b.patch_dim)
    throw ValueError("prediction and target shapes differ");
  if (mask.masked.size() != a.n_patches)
    throw ValueError(fmt::format("mask covers {} patches, tensors have {}", mask.masked.size(), a.n_patches));
}

double masked_sum_sq(const PatchTensor& pred, const PatchTensor& target, const PatchMask& mask,
                     std::size_t& masked) {
  check_pair(pred, target, mask);
  double total = 0.0;
  masked = 0;
  for (std::size_t i = 0; i < pred.n_patches; ++i) {
    if (!mask.masked[i]) continue;
    ++masked;
    const auto p = pred.patch(i);
    const auto q = target.patch(i);
    for (std::size_t k = 0; k < pred.patch_dim; ++k) {
      const double d = p[k] - q[k];
      total += d * d;
    }
  }
  if (masked == 0) throw ValueError("loss over an empty mask is undefined");
  return total;
}

}  // namespace

PatchTensor patchify(const S2IImage& img, const PatchGrid& grid) {
  check_grid_matches(grid, img.height(), img.width());
  const std::size_t p = grid.patch_size;
  PatchTensor out(grid.n_patches(), p * p * 3);
  for (std::size_t pr = 0; pr < grid.grid_h; ++pr)
    for (std::size_t pc = 0; pc < grid.grid_w; ++pc) {
      auto dst = out.patch(grid.index(pr, pc));
      for (std::size_t dy = 0; dy < p; ++dy)
        for (std::size_t dx = 0; dx < p; ++dx)
          for (std::size_t c = 0; c < 3; ++c)
            dst[(dy * p + dx) * 3 + c] = img.at(pr * p + dy, pc * p + dx, c);
    }
  return out;
}

S2IImage unpatchify(const PatchTensor& patches, const PatchGrid& grid) {
  const std::size_t p = grid.patch_size;
  if (patches.n_patches != grid.n_patches() || patches.patch_dim != p * p * 3)
    throw ValueError("patch tensor does not match the grid");
  S2IImage img(grid.grid_h * p, grid.grid_w * p);
  for (std::size_t pr = 0; pr < grid.grid_h; ++pr)
    for (std::size_t pc = 0; pc < grid.grid_w; ++pc) {
      auto src = patches.patch(grid.index(pr, pc));
      for (std::size_t dy = 0; dy < p; ++dy)
        for (std::size_t dx = 0; dx < p; ++dx)
          for (std::size_t c = 0; c < 3; ++c)
            img.at(pr * p + dy, pc * p + dx, c) = static_cast<float>(src[(dy * p + dx) * 3 + c]);
    }
  return img;
}

double mae_loss(const PatchTensor& pred, const PatchTensor& target, const PatchMask& mask) {
  std::size_t masked = 0;
  const double total = masked_sum_sq(pred, target, mask, masked);
  return total / static_cast<double>(masked);
}

double mae_loss_normalized(const PatchTensor& pred, const PatchTensor& target, const PatchMask& mask) {
  return mae_loss(pred, target, mask) / static_cast<double>(pred.patch_dim);
}

double diffmae_loss(const PatchTensor& pred_x0, const PatchTensor& true_x0, const PatchMask& mask) {
  std::size_t masked = 0;
  const double total = masked_sum_sq(pred_x0, true_x0, mask, masked);
  return total / static_cast<double>(masked * pred_x0.patch_dim);
}

DiffusionSchedule build_schedule(std::size_t steps, double rho) {
  if (steps == 0) throw ValueError("diffusion schedule needs at least one step");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ValueError("rho must be a positive finite number");
  DiffusionSchedule s;
  s.steps = steps;
  s.rho = rho;
  s.beta_values.resize(steps);
  s.alpha_values.resize(steps);
  s.alpha_bar_values.resize(steps);
  double running = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    const double linear = kBetaStart + (kBetaEnd - kBetaStart) * frac;
    s.beta_values[i] = std::pow(linear, rho);
    s.alpha_values[i] = 1.0 - s.beta_values[i];
    running *= s.alpha_values[i];
    s.alpha_bar_values[i] = running;
  }
  return s;
}

std::string schedule_json(const DiffusionSchedule& sched) {
  nlohmann::ordered_json doc;
  doc["T"] = sched.steps;
  doc["rho"] = sched.rho;
  doc["t_base"] = 1;
  doc["beta"] = sched.beta_values;
  doc["alpha"] = sched.alpha_values;
  doc["alpha_bar"] = sched.alpha_bar_values;
  return doc.dump() + "\n";
}

PatchTensor forward_diffuse(const PatchTensor& x0, std::size_t t, const PatchTensor& eps,
                            const DiffusionSchedule& sched) {
  if (t < 1 || t > sched.steps)
    throw ValueError(fmt::format("timestep {} outside [1, {}]", t, sched.steps));
  if (x0.n_patches != eps.n_patches || x0.patch_dim != eps.patch_dim)
    throw ValueError("x0 and noise shapes differ");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double b = std::sqrt(1.0 - sched.alpha_bar(t));
  PatchTensor out(x0.n_patches, x0.patch_dim);
  for (std::size_t k = 0; k < x0.values.size(); ++k) out.values[k] = a * x0.values[k] + b * eps.values[k];
  return out;
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  if (probs.empty()) throw ValueError("probability vector is empty");
  if (label >= probs.size())
    throw ValueError(fmt::format("label {} out of range for {} classes", label, probs.size()));
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValueError("probabilities must be finite and non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ValueError(fmt::format("probabilities sum to {}, not 1", sum));
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

}  // namespace s2i
