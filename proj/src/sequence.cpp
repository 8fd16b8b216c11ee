#include "s2i/sequence.hpp"

#include <cmath>

#include <fmt/format.h>

#include "s2i/error.hpp"

namespace s2i {

SkeletonSequence::SkeletonSequence(std::string format_id, std::size_t frames, std::size_t joints)
    : format_id_(std::move(format_id)),
      joints_(joints),
      data_(frames * joints),
      body_track_(joints == 0 ? 0 : frames) {}

void SkeletonSequence::append_frame(std::span<const Vec3> joints, std::string body) {
  if (joints_ == 0 && data_.empty()) joints_ = joints.size();
  if (joints.size() != joints_)
    throw ValueError(fmt::format("frame has {} joints, sequence has {}", joints.size(), joints_));
  data_.insert(data_.end(), joints.begin(), joints.end());
  body_track_.push_back(std::move(body));
}

void SkeletonSequence::validate() const {
  if (joints_ == 0) throw ValueError("sequence has no joints");
  if (data_.empty()) throw ValueError("sequence has no frames");
  for (std::size_t t = 0; t < frames(); ++t)
    for (std::size_t j = 0; j < joints_; ++j) {
      const auto& p = at(t, j);
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw ValueError(fmt::format("frame {} joint {}: non-finite coordinate", t, j));
    }
}

}  // namespace s2i
