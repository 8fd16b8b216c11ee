#pragma once

// Shared generators and independent oracles for the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "s2i/format_registry.hpp"
#include "s2i/sequence.hpp"

namespace s2i::testing {

inline SkeletonSequence random_sequence(std::mt19937_64& rng, std::size_t frames, std::size_t joints,
                                        const std::string& format_id = "ntu25", double lo = -1.0,
                                        double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  SkeletonSequence seq(format_id, frames, joints);
  for (auto& p : seq.data()) p = {u(rng), u(rng), u(rng)};
  return seq;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random valid format: random recursive tree, random partition into five
// non-empty parts with shuffled intra-part order. Requires joints >= 5.
inline SkeletonFormat random_format(std::mt19937_64& rng, std::size_t joints, const std::string& id = "rand") {
  std::vector<int> labels(joints);
  std::iota(labels.begin(), labels.end(), 0);
  std::shuffle(labels.begin(), labels.end(), rng);
  std::vector<JointDef> defs(joints);
  for (std::size_t k = 0; k < joints; ++k) {
    const int j = labels[k];
    defs[j] = {j, "j" + std::to_string(j), k == 0 ? kRootParent : labels[uniform_index(rng, 0, k - 1)]};
  }
  std::vector<int> order = labels;
  std::shuffle(order.begin(), order.end(), rng);
  // Four distinct cut points in 1..J-1 give five non-empty parts.
  std::vector<std::size_t> cuts(joints - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(4);
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(joints);
  std::vector<PartDef> parts;
  for (std::size_t p = 0; p < 5; ++p)
    parts.push_back({kCanonicalParts[p], std::vector<int>(order.begin() + cuts[p], order.begin() + cuts[p + 1])});
  return SkeletonFormat::create(id, defs, parts, {labels[0], std::nullopt});
}

// Format whose S2I order is the identity, for arbitrary J >= 5.
inline SkeletonFormat chain_format(std::size_t joints, const std::string& id = "chain") {
  std::vector<JointDef> defs;
  for (std::size_t j = 0; j < joints; ++j)
    defs.push_back({static_cast<int>(j), "j" + std::to_string(j), j == 0 ? kRootParent : static_cast<int>(j - 1)});
  std::vector<PartDef> parts;
  const std::size_t base = joints / 5;
  std::size_t start = 0;
  for (std::size_t p = 0; p < 5; ++p) {
    const std::size_t len = p == 4 ? joints - start : base;
    std::vector<int> ids(len);
    std::iota(ids.begin(), ids.end(), static_cast<int>(start));
    parts.push_back({kCanonicalParts[p], ids});
    start += len;
  }
  return SkeletonFormat::create(id, defs, parts, {0, std::nullopt});
}

/// Brute-force align-corners bilinear resize, computed per output pixel from
/// the four surrounding samples with exact integer position arithmetic.
/// Shares no code with the encoder.
inline std::vector<double> bilinear_oracle(const SkeletonSequence& seq, const SkeletonFormat& format,
                                           std::size_t height, std::size_t width) {
  std::vector<int> order;
  for (BodyPart p : kCanonicalParts)
    for (const auto& part : format.parts())
      if (part.part == p) order.insert(order.end(), part.joint_ids.begin(), part.joint_ids.end());

  const std::size_t T = seq.frames(), J = seq.joints();
  auto locate = [](std::size_t i, std::size_t in, std::size_t out, std::size_t& i0, std::size_t& i1, double& f) {
    if (in == 1 || out == 1) {
      i0 = i1 = 0;
      f = 0.0;
      return;
    }
    const std::size_t num = i * (in - 1);
    const std::size_t den = out - 1;
    i0 = num / den;
    const std::size_t rem = num % den;
    i1 = std::min(i0 + 1, in - 1);
    f = static_cast<double>(rem) / static_cast<double>(den);
  };

  std::vector<double> out(height * width * 3);
  for (std::size_t h = 0; h < height; ++h) {
    std::size_t t0, t1;
    double ft;
    locate(h, T, height, t0, t1, ft);
    for (std::size_t w = 0; w < width; ++w) {
      std::size_t c0, c1;
      double fc;
      locate(w, J, width, c0, c1, fc);
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double v00 = seq.at(t0, order[c0])[ch];
        const double v01 = seq.at(t0, order[c1])[ch];
        const double v10 = seq.at(t1, order[c0])[ch];
        const double v11 = seq.at(t1, order[c1])[ch];
        out[(h * width + w) * 3 + ch] = (1 - ft) * (1 - fc) * v00 + (1 - ft) * fc * v01 +
                                        ft * (1 - fc) * v10 + ft * fc * v11;
      }
    }
  }
  return out;
}

inline SkeletonSequence shifted(SkeletonSequence seq, const Vec3& v) {
  for (auto& p : seq.data()) p += v;
  return seq;
}

}  // namespace s2i::testing
