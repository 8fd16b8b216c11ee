#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace s2i {

enum class BodyPart { Spine, LeftArm, RightArm, LeftLeg, RightLeg };

// Canonical part order; also the S2I column order.
inline constexpr std::array<BodyPart, 5> kCanonicalParts = {
    BodyPart::Spine, BodyPart::LeftArm, BodyPart::RightArm, BodyPart::LeftLeg, BodyPart::RightLeg};

std::string_view part_name(BodyPart part);
std::optional<BodyPart> parse_part_name(std::string_view name);

inline constexpr int kRootParent = -1;

struct JointDef {
  int id = 0;
  std::string name;
  int parent = kRootParent;

  bool operator==(const JointDef&) const = default;
};

struct PartDef {
  BodyPart part = BodyPart::Spine;
  std::vector<int> joint_ids;  // torso-outward (Spine: head first)

  bool operator==(const PartDef&) const = default;
};

// A single joint, or the midpoint of two joints when `second` is set.
struct ReferenceJoint {
  int first = 0;
  std::optional<int> second;

  bool operator==(const ReferenceJoint&) const = default;
};

/// Named joint layout with kinematic tree, five-part partition and a
/// reference joint used for first-frame translation.
///
/// Instances are immutable and always valid: construction goes through
/// `create`, which enforces that joint ids are 0..J-1, that the parent map is
/// a single-rooted tree, and that the five parts partition the joint set.
class SkeletonFormat {
 public:
  static SkeletonFormat create(std::string format_id, std::vector<JointDef> joints,
                               std::vector<PartDef> parts, ReferenceJoint reference);

  const std::string& id() const noexcept { return id_; }
  const std::vector<JointDef>& joints() const noexcept { return joints_; }
  const std::vector<PartDef>& parts() const noexcept { return parts_; }
  const ReferenceJoint& reference() const noexcept { return reference_; }

  std::size_t joint_count() const noexcept { return joints_.size(); }
  int parent(int joint) const { return joints_.at(static_cast<std::size_t>(joint)).parent; }
  int root() const noexcept { return root_; }
  const PartDef& part(BodyPart p) const { return parts_.at(static_cast<std::size_t>(p)); }
  std::optional<int> find_joint(std::string_view name) const;

  bool operator==(const SkeletonFormat&) const = default;

 private:
  SkeletonFormat() = default;

  std::string id_;
  std::vector<JointDef> joints_;
  std::vector<PartDef> parts_;
  ReferenceJoint reference_;
  int root_ = 0;
};

enum class BuiltinFormat { Ntu25, Ucla20, Toyota13 };

std::optional<BuiltinFormat> parse_builtin_name(std::string_view name);
std::string_view builtin_name(BuiltinFormat f);

const SkeletonFormat& builtin_format(BuiltinFormat f);

// Parses and validates a JSON format-description document.
SkeletonFormat load_format(std::string_view document);
SkeletonFormat load_format_file(const std::string& path);
std::string dump_format(const SkeletonFormat& format);

// Concatenation of the five parts in canonical order; a permutation of 0..J-1.
std::vector<int> s2i_joint_order(const SkeletonFormat& format);

// Built-ins plus user formats, looked up by id.
class FormatRegistry {
 public:
  FormatRegistry();

  const SkeletonFormat& add(SkeletonFormat format);
  const SkeletonFormat* find(std::string_view id) const;
  const SkeletonFormat& get(std::string_view id) const;

  // `spec` is a registered id or a path to a format document.
  const SkeletonFormat& resolve(const std::string& spec);

  std::vector<std::string> ids() const;

 private:
  std::map<std::string, SkeletonFormat, std::less<>> formats_;
};

}  // namespace s2i
