#pragma once

#include <array>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s2i/format_registry.hpp"
#include "s2i/sequence.hpp"

namespace s2i {

// One joint line of an NTU `.skeleton` file. Only `position` feeds the
// pipeline; the rest is carried through untouched.
struct RawJoint {
  Vec3 position;
  std::array<double, 2> depth{};
  std::array<double, 2> color{};
  std::array<double, 4> orientation{};  // w x y z
  int tracking_state = 0;
};

struct RawBodyFrame {
  std::string body_id;
  std::array<double, 9> body_info{};  // clipped edges, hand states, restricted, lean, tracking
  std::vector<RawJoint> joints;
};

using RawFrame = std::vector<RawBodyFrame>;

// Parses the NTU RGB+D `.skeleton` text layout. Throws ParseError carrying the
// offending line on truncation, count mismatch or a non-numeric token.
std::vector<RawFrame> parse_ntu_skeleton(std::istream& in);
std::vector<RawFrame> parse_ntu_skeleton_file(const std::string& path);

// Generic interchange document: {sample_id, format_id, frames[T][J][3], bodies?}.
SkeletonSequence parse_generic_json(std::string_view document, const SkeletonFormat& format);
std::string serialize_generic_json(const SkeletonSequence& seq);

// Flattens multi-body frames into one single-body sequence. A two-body frame
// becomes two consecutive frames in ascending body-id order; frames without a
// body contribute nothing. More than two bodies is an error.
SkeletonSequence split_bodies(std::span<const RawFrame> frames, const SkeletonFormat& format);

// Removes frames whose coordinates are all exactly zero.
SkeletonSequence drop_zero_frames(const SkeletonSequence& seq);

Vec3 reference_position(std::span<const Vec3> frame, const SkeletonFormat& format);

// Subtracts frame 0's reference position from every joint of every frame.
SkeletonSequence translate_by_first_frame(const SkeletonSequence& seq, const SkeletonFormat& format);

// Orders body ids numerically when both parse as unsigned integers.
bool body_id_less(std::string_view a, std::string_view b);

}  // namespace s2i
