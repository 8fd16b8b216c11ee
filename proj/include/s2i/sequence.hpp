#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace s2i {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](std::size_t c) const { return c == 0 ? x : (c == 1 ? y : z); }
  double& operator[](std::size_t c) { return c == 0 ? x : (c == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  bool operator==(const Vec3&) const = default;
};

/// T frames x J joints x 3 coordinates, stored frame-major.
class SkeletonSequence {
 public:
  SkeletonSequence() = default;
  SkeletonSequence(std::string format_id, std::size_t frames, std::size_t joints);

  const std::string& format_id() const noexcept { return format_id_; }
  void set_format_id(std::string id) { format_id_ = std::move(id); }
  const std::string& sample_id() const noexcept { return sample_id_; }
  void set_sample_id(std::string id) { sample_id_ = std::move(id); }

  std::size_t frames() const noexcept { return joints_ == 0 ? 0 : data_.size() / joints_; }
  std::size_t joints() const noexcept { return joints_; }
  bool empty() const noexcept { return data_.empty(); }

  Vec3& at(std::size_t t, std::size_t j) { return data_[t * joints_ + j]; }
  const Vec3& at(std::size_t t, std::size_t j) const { return data_[t * joints_ + j]; }
  std::span<Vec3> frame(std::size_t t) { return {data_.data() + t * joints_, joints_}; }
  std::span<const Vec3> frame(std::size_t t) const { return {data_.data() + t * joints_, joints_}; }
  std::span<const Vec3> data() const noexcept { return data_; }
  std::span<Vec3> data() noexcept { return data_; }

  // Per-frame source-body label; empty string when unknown.
  const std::vector<std::string>& body_track() const noexcept { return body_track_; }
  const std::string& body(std::size_t t) const { return body_track_.at(t); }
  void set_body(std::size_t t, std::string label) { body_track_.at(t) = std::move(label); }

  void append_frame(std::span<const Vec3> joints, std::string body = {});

  // Throws ValueError unless T >= 1, J >= 1 and every coordinate is finite.
  void validate() const;

  bool operator==(const SkeletonSequence&) const = default;

 private:
  std::string format_id_;
  std::string sample_id_;
  std::size_t joints_ = 0;
  std::vector<Vec3> data_;
  std::vector<std::string> body_track_;
};

}  // namespace s2i
