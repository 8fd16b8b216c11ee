#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace s2i {

struct PatchGrid {
  std::size_t patch_size = 16;
  std::size_t grid_h = 14;
  std::size_t grid_w = 14;

  std::size_t n_patches() const noexcept { return grid_h * grid_w; }
  std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * grid_w + col; }

  // Throws ValueError unless patch_size divides both image axes.
  static PatchGrid for_image(std::size_t height, std::size_t width, std::size_t patch_size = 16);

  bool operator==(const PatchGrid&) const = default;
};

enum class MaskStrategy { Random, Block, Joint, Temporal };

std::string_view strategy_name(MaskStrategy s);
// Accepts "group" as an alias of "block".
MaskStrategy parse_strategy(std::string_view name);

// Square block of side `side` with top-left patch (row, col).
struct PlacedBlock {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t side = 0;

  bool operator==(const PlacedBlock&) const = default;
};

struct PatchMask {
  PatchGrid grid;
  std::vector<bool> masked;  // row-major, n_patches entries
  MaskStrategy strategy = MaskStrategy::Random;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<PlacedBlock> blocks;  // block strategy only: every masked patch lies in one

  std::size_t count() const noexcept;
  bool operator==(const PatchMask&) const = default;
};

// floor(ratio * n) patches, uniformly without replacement.
PatchMask random_mask(const PatchGrid& grid, double ratio, std::uint64_t seed);

// Squares placed until at least floor(ratio * n) patches are masked. Each
// square grows from side 1 until it covers the remaining deficit (capped by
// the grid) and is placed fully inside the grid at a uniform position.
PatchMask block_mask(const PatchGrid& grid, double ratio, std::uint64_t seed);

// round-half-even(ratio * grid_w) whole columns (the joint axis).
PatchMask joint_mask(const PatchGrid& grid, double ratio, std::uint64_t seed);

// round-half-even(ratio * grid_h) whole rows (the time axis).
PatchMask temporal_mask(const PatchGrid& grid, double ratio, std::uint64_t seed);

PatchMask make_mask(MaskStrategy strategy, const PatchGrid& grid, double ratio, std::uint64_t seed);

// Target count used by the strategy for (grid, ratio).
std::size_t mask_target(MaskStrategy strategy, const PatchGrid& grid, double ratio);

// JSON header plus base64 bitset (row-major, MSB first within each byte).
std::string serialize_mask(const PatchMask& mask);
PatchMask parse_mask(std::string_view document);

// Structural violations of the strategy contract; empty when valid.
std::vector<std::string> check_mask(const PatchMask& mask);

}  // namespace s2i
