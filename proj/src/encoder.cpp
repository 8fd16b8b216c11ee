#include "s2i/encoder.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "s2i/error.hpp"

namespace s2i {

AxisSampler::AxisSampler(std::size_t in, std::size_t out) : lower(out, 0), weight(out, 0.0) {
  if (in <= 1 || out <= 1) return;
  const double denom = static_cast<double>(out - 1);
  for (std::size_t i = 0; i < out; ++i) {
    // Integer numerator keeps identity-size and endpoint positions exact.
    const double pos = static_cast<double>(i * (in - 1)) / denom;
    auto lo = static_cast<std::size_t>(std::floor(pos));
    lo = std::min(lo, in - 2);
    lower[i] = lo;
    weight[i] = pos - static_cast<double>(lo);
  }
}

namespace {

inline double lerp(double a, double b, double w) { return (1.0 - w) * a + w * b; }

// Resizes a rows x cols x 3 map stored row-major to out_rows x out_cols x 3.
std::vector<double> resize_map(const std::vector<double>& in, std::size_t rows, std::size_t cols,
                               std::size_t out_rows, std::size_t out_cols) {
  const AxisSampler rs(rows, out_rows);
  const AxisSampler cs(cols, out_cols);

  std::vector<double> tmp(out_rows * cols * 3);
  for (std::size_t r = 0; r < out_rows; ++r) {
    const double* a = &in[rs.lower[r] * cols * 3];
    const double* b = rows > 1 ? a + cols * 3 : a;
    const double w = rs.weight[r];
    double* dst = &tmp[r * cols * 3];
    for (std::size_t k = 0; k < cols * 3; ++k) dst[k] = lerp(a[k], b[k], w);
  }

  std::vector<double> out(out_rows * out_cols * 3);
  for (std::size_t r = 0; r < out_rows; ++r) {
    const double* row = &tmp[r * cols * 3];
    double* dst = &out[r * out_cols * 3];
    for (std::size_t c = 0; c < out_cols; ++c) {
      const double* a = row + cs.lower[c] * 3;
      const double* b = cols > 1 ? a + 3 : a;
      const double w = cs.weight[c];
      for (std::size_t ch = 0; ch < 3; ++ch) dst[c * 3 + ch] = lerp(a[ch], b[ch], w);
    }
  }
  return out;
}

}  // namespace

namespace {

S2IImage encode_columns(const SkeletonSequence& seq, const std::vector<int>& order, ImageSize target) {
  const std::size_t frames = seq.frames();
  const std::size_t joints = seq.joints();
  if (frames == 0 || joints == 0) throw ValueError("cannot encode an empty sequence");
  if (target.height == 0 || target.width == 0) throw ValueError("target size must be positive");

  std::vector<double> map(frames * joints * 3);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t w = 0; w < joints; ++w) {
      const Vec3& p = seq.at(t, static_cast<std::size_t>(order[w]));
      double* dst = &map[(t * joints + w) * 3];
      dst[0] = p.x;
      dst[1] = p.y;
      dst[2] = p.z;
    }

  const auto resized = resize_map(map, frames, joints, target.height, target.width);
  S2IImage img(target.height, target.width);
  std::transform(resized.begin(), resized.end(), img.pixels().begin(),
                 [](double v) { return static_cast<float>(v); });

  img.meta.sample_id = seq.sample_id();
  img.meta.format_id = seq.format_id();
  img.meta.original_frames = frames;
  img.meta.original_joints = joints;
  img.meta.joint_order = order;
  return img;
}

}  // namespace

S2IImage encode_ordered(const SkeletonSequence& seq, ImageSize target) {
  std::vector<int> order(seq.joints());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  return encode_columns(seq, order, target);
}

S2IImage encode(const SkeletonSequence& seq, const SkeletonFormat& format, ImageSize target) {
  if (seq.joints() != format.joint_count())
    throw ValueError(fmt::format("sequence has {} joints, format '{}' has {}", seq.joints(), format.id(),
                                 format.joint_count()));
  auto img = encode_columns(seq, s2i_joint_order(format), target);
  img.meta.format_id = format.id();
  return img;
}

SkeletonSequence decode(const S2IImage& img, std::size_t frames, std::size_t joints) {
  if (frames == 0 || joints == 0) throw ValueError("decode target must be at least 1x1");
  if (img.height() == 0 || img.width() == 0) throw ValueError("cannot decode an empty image");

  std::vector<double> map(img.pixels().begin(), img.pixels().end());
  const auto resized = resize_map(map, img.height(), img.width(), frames, joints);

  std::vector<int> order = img.meta.joint_order;
  if (order.size() != joints) {
    order.resize(joints);
    for (std::size_t j = 0; j < joints; ++j) order[j] = static_cast<int>(j);
  }

  SkeletonSequence seq(img.meta.format_id, frames, joints);
  seq.set_sample_id(img.meta.sample_id);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t w = 0; w < joints; ++w) {
      const double* src = &resized[(t * joints + w) * 3];
      seq.at(t, static_cast<std::size_t>(order[w])) = {src[0], src[1], src[2]};
    }
  return seq;
}

std::vector<std::string> validate_image(const S2IImage& img) {
  std::vector<std::string> problems;
  const auto& m = img.meta;
  if (img.height() == 0 || img.width() == 0) problems.push_back("image has an empty axis");
  if (img.pixels().size() != img.height() * img.width() * 3)
    problems.push_back("pixel buffer does not match H x W x 3");
  if (std::any_of(img.pixels().begin(), img.pixels().end(), [](float v) { return !std::isfinite(v); }))
    problems.push_back("pixels contain non-finite values");
  if (m.original_frames == 0) problems.push_back("original_T must be >= 1");
  if (m.original_joints == 0) problems.push_back("original_J must be >= 1");
  if (m.joint_order.size() != m.original_joints) {
    problems.push_back(fmt::format("joint_order has {} entries but original_J is {}",
                                   m.joint_order.size(), m.original_joints));
  } else {
    std::vector<int> sorted = m.joint_order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != static_cast<int>(i)) {
        problems.push_back("joint_order is not a permutation of 0..J-1");
        break;
      }
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& a = m.channel_affine[c];
    if (!std::isfinite(a.scale) || !std::isfinite(a.offset) || a.scale < 0)
      problems.push_back(fmt::format("channel {} affine is invalid", c));
  }
  if (m.normalization)
    for (std::size_t c = 0; c < 3; ++c)
      if (!(m.normalization->std[c] > 0) || !std::isfinite(m.normalization->mean[c]))
        problems.push_back(fmt::format("channel {} normalization is invalid", c));
  return problems;
}

}  // namespace s2i
