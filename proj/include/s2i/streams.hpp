#pragma once

#include <string_view>

#include "s2i/format_registry.hpp"
#include "s2i/sequence.hpp"

namespace s2i {

enum class Stream { Joint, Bone, Motion };

std::string_view stream_name(Stream s);
Stream parse_stream(std::string_view name);

// joint - parent(joint) per frame; the root's bone is zero.
SkeletonSequence bone_stream(const SkeletonSequence& seq, const SkeletonFormat& format);

// frame t - frame t-1; frame 0 is zero so T is preserved.
SkeletonSequence motion_stream(const SkeletonSequence& seq);

SkeletonSequence derive_stream(const SkeletonSequence& seq, const SkeletonFormat& format, Stream s);

}  // namespace s2i
