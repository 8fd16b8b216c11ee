#include "s2i/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "s2i/base64.hpp"
#include "s2i/error.hpp"
#include "s2i/rng.hpp"

namespace s2i {

namespace {

void check_ratio(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw ValueError(fmt::format("mask ratio {} is outside [0, 1]", ratio));
}

void check_grid(const PatchGrid& grid) {
  if (grid.grid_h == 0 || grid.grid_w == 0) throw ValueError("patch grid must be non-empty");
}

// First k entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::size_t round_half_even(double v) { return static_cast<std::size_t>(std::nearbyint(v)); }

PatchMask empty_mask(const PatchGrid& grid, MaskStrategy s, double ratio, std::uint64_t seed) {
  check_grid(grid);
  check_ratio(ratio);
  PatchMask m;
  m.grid = grid;
  m.masked.assign(grid.n_patches(), false);
  m.strategy = s;
  m.ratio = ratio;
  m.seed = seed;
  return m;
}

}  // namespace

PatchGrid PatchGrid::for_image(std::size_t height, std::size_t width, std::size_t patch_size) {
  if (patch_size == 0 || height % patch_size != 0 || width % patch_size != 0)
    throw ValueError(fmt::format("patch size {} does not divide image {}x{}", patch_size, height, width));
  return {patch_size, height / patch_size, width / patch_size};
}

std::string_view strategy_name(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::Random: return "random";
    case MaskStrategy::Block: return "block";
    case MaskStrategy::Joint: return "joint";
    case MaskStrategy::Temporal: return "temporal";
  }
  return "random";
}

MaskStrategy parse_strategy(std::string_view name) {
  if (name == "random") return MaskStrategy::Random;
  if (name == "block" || name == "group") return MaskStrategy::Block;
  if (name == "joint") return MaskStrategy::Joint;
  if (name == "temporal") return MaskStrategy::Temporal;
  throw ValueError(fmt::format("unknown mask strategy '{}'", name));
}

std::size_t PatchMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), true));
}

std::size_t mask_target(MaskStrategy strategy, const PatchGrid& grid, double ratio) {
  switch (strategy) {
    case MaskStrategy::Random:
    case MaskStrategy::Block:
      return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(grid.n_patches())));
    case MaskStrategy::Joint: return round_half_even(ratio * static_cast<double>(grid.grid_w)) * grid.grid_h;
    case MaskStrategy::Temporal: return round_half_even(ratio * static_cast<double>(grid.grid_h)) * grid.grid_w;
  }
  return 0;
}

PatchMask random_mask(const PatchGrid& grid, double ratio, std::uint64_t seed) {
  auto m = empty_mask(grid, MaskStrategy::Random, ratio, seed);
  SplitMix64 rng(seed);
  for (auto i : sample_without_replacement(grid.n_patches(), mask_target(m.strategy, grid, ratio), rng))
    m.masked[i] = true;
  return m;
}

PatchMask block_mask(const PatchGrid& grid, double ratio, std::uint64_t seed) {
  auto m = empty_mask(grid, MaskStrategy::Block, ratio, seed);
  const std::size_t target = mask_target(m.strategy, grid, ratio);
  const std::size_t max_side = std::min(grid.grid_h, grid.grid_w);
  SplitMix64 rng(seed);
  std::size_t count = 0;
  while (count < target) {
    const std::size_t deficit = target - count;
    std::size_t side = 1;
    while (side < max_side && side * side < deficit) ++side;
    PlacedBlock b{static_cast<std::size_t>(rng.bounded(grid.grid_h - side + 1)),
                  static_cast<std::size_t>(rng.bounded(grid.grid_w - side + 1)), side};
    for (std::size_t r = b.row; r < b.row + side; ++r)
      for (std::size_t c = b.col; c < b.col + side; ++c) {
        const std::size_t i = grid.index(r, c);
        if (!m.masked[i]) {
          m.masked[i] = true;
          ++count;
        }
      }
    m.blocks.push_back(b);
  }
  return m;
}

PatchMask joint_mask(const PatchGrid& grid, double ratio, std::uint64_t seed) {
  auto m = empty_mask(grid, MaskStrategy::Joint, ratio, seed);
  SplitMix64 rng(seed);
  const std::size_t k = round_half_even(ratio * static_cast<double>(grid.grid_w));
  for (auto col : sample_without_replacement(grid.grid_w, k, rng))
    for (std::size_t r = 0; r < grid.grid_h; ++r) m.masked[grid.index(r, col)] = true;
  return m;
}

PatchMask temporal_mask(const PatchGrid& grid, double ratio, std::uint64_t seed) {
  auto m = empty_mask(grid, MaskStrategy::Temporal, ratio, seed);
  SplitMix64 rng(seed);
  const std::size_t k = round_half_even(ratio * static_cast<double>(grid.grid_h));
  for (auto row : sample_without_replacement(grid.grid_h, k, rng))
    for (std::size_t c = 0; c < grid.grid_w; ++c) m.masked[grid.index(row, c)] = true;
  return m;
}

PatchMask make_mask(MaskStrategy strategy, const PatchGrid& grid, double ratio, std::uint64_t seed) {
  switch (strategy) {
    case MaskStrategy::Random: return random_mask(grid, ratio, seed);
    case MaskStrategy::Block: return block_mask(grid, ratio, seed);
    case MaskStrategy::Joint: return joint_mask(grid, ratio, seed);
    case MaskStrategy::Temporal: return temporal_mask(grid, ratio, seed);
  }
  return random_mask(grid, ratio, seed);
}

std::string serialize_mask(const PatchMask& mask) {
  std::vector<std::uint8_t> bytes((mask.masked.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < mask.masked.size(); ++i)
    if (mask.masked[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));

  nlohmann::ordered_json doc;
  doc["strategy"] = strategy_name(mask.strategy);
  doc["ratio"] = mask.ratio;
  doc["seed"] = mask.seed;
  doc["grid_h"] = mask.grid.grid_h;
  doc["grid_w"] = mask.grid.grid_w;
  doc["patch_size"] = mask.grid.patch_size;
  doc["rng_id"] = SplitMix64::kId;
  doc["count"] = mask.count();
  if (mask.strategy == MaskStrategy::Block) {
    auto blocks = nlohmann::ordered_json::array();
    for (const auto& b : mask.blocks) blocks.push_back({b.row, b.col, b.side});
    doc["blocks"] = std::move(blocks);
  }
  doc["bits"] = base64_encode(bytes);
  return doc.dump(2) + "\n";
}

PatchMask parse_mask(std::string_view document) {
  PatchMask m;
  try {
    const auto doc = nlohmann::json::parse(document);
    m.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    m.ratio = doc.at("ratio").get<double>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.grid.grid_h = doc.at("grid_h").get<std::size_t>();
    m.grid.grid_w = doc.at("grid_w").get<std::size_t>();
    m.grid.patch_size = doc.value("patch_size", std::size_t{16});
    const auto rng_id = doc.at("rng_id").get<std::string>();
    if (rng_id != SplitMix64::kId)
      throw ParseError(fmt::format("mask was generated by '{}', expected '{}'", rng_id, SplitMix64::kId));
    if (doc.contains("blocks"))
      for (const auto& b : doc["blocks"])
        m.blocks.push_back({b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>(), b.at(2).get<std::size_t>()});
    const auto bytes = base64_decode(doc.at("bits").get<std::string>());
    const std::size_t n = m.grid.n_patches();
    if (bytes.size() != (n + 7) / 8)
      throw ParseError(fmt::format("mask bitset has {} bytes, grid needs {}", bytes.size(), (n + 7) / 8));
    m.masked.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) m.masked[i] = (bytes[i / 8] & (0x80u >> (i % 8))) != 0;
    if (doc.contains("count") && doc["count"].get<std::size_t>() != m.count())
      throw ParseError("mask 'count' does not match the bitset");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid mask file: ") + e.what());
  }
  return m;
}

std::vector<std::string> check_mask(const PatchMask& mask) {
  std::vector<std::string> problems;
  const auto& g = mask.grid;
  if (mask.masked.size() != g.n_patches()) {
    problems.push_back("bitset length does not match the grid");
    return problems;
  }
  const std::size_t count = mask.count();
  const std::size_t target = mask_target(mask.strategy, g, mask.ratio);
  switch (mask.strategy) {
    case MaskStrategy::Random:
      if (count != target) problems.push_back(fmt::format("random mask has {} patches, expected {}", count, target));
      break;
    case MaskStrategy::Joint:
    case MaskStrategy::Temporal: {
      const bool by_col = mask.strategy == MaskStrategy::Joint;
      const std::size_t lines = by_col ? g.grid_w : g.grid_h;
      const std::size_t span = by_col ? g.grid_h : g.grid_w;
      for (std::size_t l = 0; l < lines; ++l) {
        std::size_t n = 0;
        for (std::size_t k = 0; k < span; ++k) n += mask.masked[by_col ? g.index(k, l) : g.index(l, k)];
        if (n != 0 && n != span)
          problems.push_back(fmt::format("{} {} is partially masked", by_col ? "column" : "row", l));
      }
      if (count != target) problems.push_back(fmt::format("mask has {} patches, expected {}", count, target));
      break;
    }
    case MaskStrategy::Block: {
      std::vector<bool> covered(g.n_patches(), false);
      for (const auto& b : mask.blocks) {
        if (b.side == 0 || b.row + b.side > g.grid_h || b.col + b.side > g.grid_w) {
          problems.push_back("placed block lies outside the grid");
          continue;
        }
        for (std::size_t r = b.row; r < b.row + b.side; ++r)
          for (std::size_t c = b.col; c < b.col + b.side; ++c) covered[g.index(r, c)] = true;
      }
      if (covered != mask.masked) problems.push_back("masked set differs from the union of placed blocks");
      if (count < target) problems.push_back(fmt::format("block mask has {} patches, below target {}", count, target));
      if (!mask.blocks.empty() && count >= target + mask.blocks.back().side * mask.blocks.back().side)
        problems.push_back("block mask overshoots the target by a full block");
      break;
    }
  }
  return problems;
}

}  // namespace s2i
