#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "s2i/format_registry.hpp"
#include "s2i/sequence.hpp"

namespace s2i {

struct ImageSize {
  std::size_t height = 224;
  std::size_t width = 224;

  bool operator==(const ImageSize&) const = default;
};

// Stored value = scale * byte + offset for integer exports; identity otherwise.
struct ChannelAffine {
  double scale = 1.0;
  double offset = 0.0;

  bool operator==(const ChannelAffine&) const = default;
};

// Per-channel statistics applied by `normalize`, recorded so decode can undo it.
struct Normalization {
  std::array<double, 3> mean{};
  std::array<double, 3> std{};

  bool operator==(const Normalization&) const = default;
};

struct ImageMeta {
  std::string sample_id;
  std::string format_id;
  std::string stream = "joint";
  std::size_t original_frames = 0;
  std::size_t original_joints = 0;
  std::array<ChannelAffine, 3> channel_affine{};
  std::vector<int> joint_order;  // column w holds joint joint_order[w] (before resizing)
  std::optional<Normalization> normalization;

  bool operator==(const ImageMeta&) const = default;
};

/// H x W x 3 real-valued image. Rows are time, columns are joints in S2I
/// order, channels are (x, y, z) -> (R, G, B). Pixels are interleaved
/// row-major, the same layout as the f32raw payload.
class S2IImage {
 public:
  S2IImage() = default;
  S2IImage(std::size_t height, std::size_t width)
      : height_(height), width_(width), pixels_(height * width * 3, 0.0f) {}

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  ImageSize size() const noexcept { return {height_, width_}; }

  float& at(std::size_t h, std::size_t w, std::size_t c) { return pixels_[(h * width_ + w) * 3 + c]; }
  float at(std::size_t h, std::size_t w, std::size_t c) const {
    return pixels_[(h * width_ + w) * 3 + c];
  }
  std::vector<float>& pixels() noexcept { return pixels_; }
  const std::vector<float>& pixels() const noexcept { return pixels_; }

  ImageMeta meta;

  bool operator==(const S2IImage&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> pixels_;
};

// Align-corners linear sampling positions for resizing an axis of `in` samples
// to `out` samples. A single input sample is extended as a constant.
struct AxisSampler {
  std::vector<std::size_t> lower;
  std::vector<double> weight;  // weight of lower + 1

  AxisSampler(std::size_t in, std::size_t out);
};

// Stacks frames as rows and resizes a sequence whose joint axis is already in
// column order. Meta records the identity permutation.
S2IImage encode_ordered(const SkeletonSequence& seq, ImageSize target = {});

// Reorders joints into S2I order, stacks frames as rows and resizes both
// axes by separable align-corners linear interpolation.
S2IImage encode(const SkeletonSequence& seq, const SkeletonFormat& format, ImageSize target = {});

// Resamples the image back to frames x joints and undoes the joint permutation.
// Does not undo any normalization; see `denormalize`.
SkeletonSequence decode(const S2IImage& img, std::size_t frames, std::size_t joints);

// Structural check of meta against the pixel grid. Returns problems found.
std::vector<std::string> validate_image(const S2IImage& img);

}  // namespace s2i
