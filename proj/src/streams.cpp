#include "s2i/streams.hpp"

#include <fmt/format.h>

#include "s2i/error.hpp"

namespace s2i {

std::string_view stream_name(Stream s) {
  switch (s) {
    case Stream::Joint: return "joint";
    case Stream::Bone: return "bone";
    case Stream::Motion: return "motion";
  }
  return "joint";
}

Stream parse_stream(std::string_view name) {
  if (name == "joint") return Stream::Joint;
  if (name == "bone") return Stream::Bone;
  if (name == "motion") return Stream::Motion;
  throw ValueError(fmt::format("unknown stream '{}' (expected joint, bone or motion)", name));
}

SkeletonSequence bone_stream(const SkeletonSequence& seq, const SkeletonFormat& format) {
  if (seq.joints() != format.joint_count())
    throw ValueError(fmt::format("sequence has {} joints, format '{}' has {}", seq.joints(),
                                 format.id(), format.joint_count()));
  SkeletonSequence out = seq;
  for (std::size_t t = 0; t < seq.frames(); ++t)
    for (const auto& joint : format.joints())
      out.at(t, joint.id) = joint.parent == kRootParent
                                ? Vec3{}
                                : seq.at(t, joint.id) - seq.at(t, static_cast<std::size_t>(joint.parent));
  return out;
}

SkeletonSequence motion_stream(const SkeletonSequence& seq) {
  SkeletonSequence out = seq;
  if (seq.frames() == 0) return out;
  for (std::size_t j = 0; j < seq.joints(); ++j) out.at(0, j) = {};
  for (std::size_t t = 1; t < seq.frames(); ++t)
    for (std::size_t j = 0; j < seq.joints(); ++j) out.at(t, j) = seq.at(t, j) - seq.at(t - 1, j);
  return out;
}

SkeletonSequence derive_stream(const SkeletonSequence& seq, const SkeletonFormat& format, Stream s) {
  switch (s) {
    case Stream::Joint: return seq;
    case Stream::Bone: return bone_stream(seq, format);
    case Stream::Motion: return motion_stream(seq);
  }
  return seq;
}

}  // namespace s2i
