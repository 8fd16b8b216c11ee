#include "s2i/format_registry.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "s2i/error.hpp"

namespace s2i {

namespace {

constexpr std::array<std::string_view, 5> kPartNames = {"Spine", "LeftArm", "RightArm", "LeftLeg",
                                                        "RightLeg"};

struct BuiltinJoint {
  std::string_view name;
  int parent;
};

SkeletonFormat make_builtin(std::string id, std::initializer_list<BuiltinJoint> joints,
                            std::array<std::vector<int>, 5> parts, ReferenceJoint reference) {
  std::vector<JointDef> defs;
  int index = 0;
  for (const auto& j : joints) defs.push_back({index++, std::string(j.name), j.parent});
  std::vector<PartDef> part_defs;
  for (std::size_t p = 0; p < parts.size(); ++p) part_defs.push_back({kCanonicalParts[p], parts[p]});
  return SkeletonFormat::create(std::move(id), std::move(defs), std::move(part_defs), reference);
}

// Kinect v2 indexing as shipped in NTU RGB+D / PKU-MMD files. "spine" is the
// SDK's SpineShoulder. Hand tip and thumb both hang off the hand.
SkeletonFormat make_ntu25() {
  return make_builtin("ntu25",
                      {
                          {"base of spine", kRootParent},  // 0
                          {"middle of spine", 0},          // 1
                          {"neck", 20},                    // 2
                          {"head", 2},                     // 3
                          {"left shoulder", 20},           // 4
                          {"left elbow", 4},               // 5
                          {"left wrist", 5},               // 6
                          {"left hand", 6},                // 7
                          {"right shoulder", 20},          // 8
                          {"right elbow", 8},              // 9
                          {"right wrist", 9},              // 10
                          {"right hand", 10},              // 11
                          {"left hip", 0},                 // 12
                          {"left knee", 12},               // 13
                          {"left ankle", 13},              // 14
                          {"left foot", 14},               // 15
                          {"right hip", 0},                // 16
                          {"right knee", 16},              // 17
                          {"right ankle", 17},             // 18
                          {"right foot", 18},              // 19
                          {"spine", 1},                    // 20
                          {"tip of left hand", 7},         // 21
                          {"left thumb", 7},               // 22
                          {"tip of right hand", 11},       // 23
                          {"right thumb", 11},             // 24
                      },
                      {{{3, 2, 20, 1, 0},
                        {4, 5, 6, 7, 22, 21},
                        {8, 9, 10, 11, 24, 23},
                        {12, 13, 14, 15},
                        {16, 17, 18, 19}}},
                      {0, std::nullopt});
}

// Kinect v1 indexing used by NW-UCLA: HipCenter, Spine, ShoulderCenter, Head, ...
SkeletonFormat make_ucla20() {
  return make_builtin("ucla20",
                      {
                          {"base of spine", kRootParent},  // 0 HipCenter
                          {"middle of spine", 0},          // 1 Spine
                          {"spine", 1},                    // 2 ShoulderCenter
                          {"head", 2},                     // 3
                          {"left shoulder", 2},            // 4
                          {"left elbow", 4},               // 5
                          {"left wrist", 5},               // 6
                          {"left hand", 6},                // 7
                          {"right shoulder", 2},           // 8
                          {"right elbow", 8},              // 9
                          {"right wrist", 9},              // 10
                          {"right hand", 10},              // 11
                          {"left hip", 0},                 // 12
                          {"left knee", 12},               // 13
                          {"left ankle", 13},              // 14
                          {"left foot", 14},               // 15
                          {"right hip", 0},                // 16
                          {"right knee", 16},              // 17
                          {"right ankle", 17},             // 18
                          {"right foot", 18},              // 19
                      },
                      {{{3, 2, 1, 0}, {4, 5, 6, 7}, {8, 9, 10, 11}, {12, 13, 14, 15}, {16, 17, 18, 19}}},
                      {0, std::nullopt});
}

// LCR-Net 13-joint order used by Toyota Smarthome. No pelvis joint: the tree
// is rooted at the head and the reference is the hip midpoint.
SkeletonFormat make_toyota13() {
  return make_builtin("toyota13",
                      {
                          {"right ankle", 2},      // 0
                          {"left ankle", 3},       // 1
                          {"right knee", 4},       // 2
                          {"left knee", 5},        // 3
                          {"right hip", 10},       // 4
                          {"left hip", 11},        // 5
                          {"right wrist", 8},      // 6
                          {"left wrist", 9},       // 7
                          {"right elbow", 10},     // 8
                          {"left elbow", 11},      // 9
                          {"right shoulder", 12},  // 10
                          {"left shoulder", 12},   // 11
                          {"head", kRootParent},   // 12
                      },
                      {{{12}, {11, 9, 7}, {10, 8, 6}, {5, 3, 1}, {4, 2, 0}}},
                      {5, 4});
}

[[noreturn]] void schema_error(const std::string& what) {
  throw FormatError("format document: " + what);
}

int joint_by_name(const std::map<std::string, int, std::less<>>& names, const nlohmann::json& v,
                  std::string_view context) {
  if (!v.is_string()) schema_error(fmt::format("{} must be a joint name", context));
  auto it = names.find(v.get<std::string>());
  if (it == names.end())
    schema_error(fmt::format("{} names unknown joint '{}'", context, v.get<std::string>()));
  return it->second;
}

}  // namespace

std::string_view part_name(BodyPart part) { return kPartNames.at(static_cast<std::size_t>(part)); }

std::optional<BodyPart> parse_part_name(std::string_view name) {
  for (std::size_t i = 0; i < kPartNames.size(); ++i)
    if (kPartNames[i] == name) return kCanonicalParts[i];
  return std::nullopt;
}

SkeletonFormat SkeletonFormat::create(std::string format_id, std::vector<JointDef> joints,
                                      std::vector<PartDef> parts, ReferenceJoint reference) {
  if (format_id.empty()) throw FormatError("format id must not be empty");
  const int count = static_cast<int>(joints.size());
  if (count == 0) throw FormatError(fmt::format("format '{}' has no joints", format_id));

  std::sort(joints.begin(), joints.end(),
            [](const JointDef& a, const JointDef& b) { return a.id < b.id; });
  for (int i = 0; i < count; ++i) {
    if (joints[i].id != i)
      throw FormatError(fmt::format("format '{}': joint ids must be exactly 0..{}", format_id,
                                    count - 1));
    if (joints[i].name.empty())
      throw FormatError(fmt::format("format '{}': joint {} has no name", format_id, i));
  }
  for (int i = 0; i < count; ++i)
    for (int k = i + 1; k < count; ++k)
      if (joints[i].name == joints[k].name)
        throw FormatError(
            fmt::format("format '{}': duplicate joint name '{}'", format_id, joints[i].name));

  // Parent map: exactly one root, every chain reaches it.
  int root = -1;
  for (const auto& j : joints) {
    if (j.parent == kRootParent || j.parent == j.id) {
      if (root >= 0)
        throw FormatError(fmt::format("format '{}': more than one root ('{}' and '{}')", format_id,
                                      joints[root].name, j.name));
      root = j.id;
    } else if (j.parent < 0 || j.parent >= count) {
      throw FormatError(
          fmt::format("format '{}': joint '{}' has invalid parent {}", format_id, j.name, j.parent));
    }
  }
  if (root < 0) throw FormatError(fmt::format("format '{}': parent map has a cycle (no root)", format_id));
  for (auto& j : joints)
    if (j.id == root) j.parent = kRootParent;
  for (const auto& j : joints) {
    int cur = j.id;
    for (int steps = 0; cur != root; ++steps) {
      if (steps > count)
        throw FormatError(
            fmt::format("format '{}': parent map has a cycle through '{}'", format_id, j.name));
      cur = joints[cur].parent;
    }
  }

  // Partition: five parts in canonical order covering every joint once.
  if (parts.size() != kCanonicalParts.size())
    throw FormatError(fmt::format("format '{}': expected 5 body parts, got {}", format_id, parts.size()));
  std::vector<int> owner(count, -1);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].part != kCanonicalParts[p])
      throw FormatError(fmt::format("format '{}': part {} must be {}", format_id, p,
                                    part_name(kCanonicalParts[p])));
    if (parts[p].joint_ids.empty())
      throw FormatError(
          fmt::format("format '{}': part {} is empty", format_id, part_name(parts[p].part)));
    for (int id : parts[p].joint_ids) {
      if (id < 0 || id >= count)
        throw FormatError(fmt::format("format '{}': part {} lists unknown joint {}", format_id,
                                      part_name(parts[p].part), id));
      if (owner[id] >= 0)
        throw FormatError(fmt::format("format '{}': joint '{}' appears in more than one part slot",
                                      format_id, joints[id].name));
      owner[id] = static_cast<int>(p);
    }
  }
  for (int i = 0; i < count; ++i)
    if (owner[i] < 0)
      throw FormatError(
          fmt::format("format '{}': joint '{}' is not in any body part", format_id, joints[i].name));

  auto check_ref = [&](int id) {
    if (id < 0 || id >= count)
      throw FormatError(fmt::format("format '{}': reference joint {} out of range", format_id, id));
  };
  check_ref(reference.first);
  if (reference.second) check_ref(*reference.second);

  SkeletonFormat f;
  f.id_ = std::move(format_id);
  f.joints_ = std::move(joints);
  f.parts_ = std::move(parts);
  f.reference_ = reference;
  f.root_ = root;
  return f;
}

std::optional<int> SkeletonFormat::find_joint(std::string_view name) const {
  for (const auto& j : joints_)
    if (j.name == name) return j.id;
  return std::nullopt;
}

std::optional<BuiltinFormat> parse_builtin_name(std::string_view name) {
  if (name == "ntu25") return BuiltinFormat::Ntu25;
  if (name == "ucla20") return BuiltinFormat::Ucla20;
  if (name == "toyota13") return BuiltinFormat::Toyota13;
  return std::nullopt;
}

std::string_view builtin_name(BuiltinFormat f) {
  switch (f) {
    case BuiltinFormat::Ntu25: return "ntu25";
    case BuiltinFormat::Ucla20: return "ucla20";
    case BuiltinFormat::Toyota13: return "toyota13";
  }
  return "";
}

const SkeletonFormat& builtin_format(BuiltinFormat f) {
  static const SkeletonFormat ntu = make_ntu25();
  static const SkeletonFormat ucla = make_ucla20();
  static const SkeletonFormat toyota = make_toyota13();
  switch (f) {
    case BuiltinFormat::Ntu25: return ntu;
    case BuiltinFormat::Ucla20: return ucla;
    case BuiltinFormat::Toyota13: return toyota;
  }
  return ntu;
}

SkeletonFormat load_format(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    schema_error(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("top level must be an object");
  for (const char* key : {"format_id", "joints", "parts", "reference"})
    if (!doc.contains(key)) schema_error(fmt::format("missing field '{}'", key));
  if (!doc["format_id"].is_string()) schema_error("'format_id' must be a string");
  if (!doc["joints"].is_array()) schema_error("'joints' must be an array");

  std::vector<JointDef> joints;
  std::map<std::string, int, std::less<>> names;
  for (const auto& j : doc["joints"]) {
    if (!j.is_object() || !j.contains("id") || !j.contains("name") || !j.contains("parent"))
      schema_error("each joint needs 'id', 'name' and 'parent'");
    if (!j["id"].is_number_integer()) schema_error("joint 'id' must be an integer");
    if (!j["name"].is_string()) schema_error("joint 'name' must be a string");
    const auto& parent = j["parent"];
    if (!parent.is_null() && !parent.is_number_integer())
      schema_error("joint 'parent' must be an integer id or null");
    JointDef def{j["id"].get<int>(), j["name"].get<std::string>(),
                 parent.is_null() ? kRootParent : parent.get<int>()};
    names.emplace(def.name, def.id);
    joints.push_back(std::move(def));
  }

  const auto& parts_doc = doc["parts"];
  if (!parts_doc.is_object()) schema_error("'parts' must be an object");
  for (const auto& [key, _] : parts_doc.items())
    if (!parse_part_name(key)) schema_error(fmt::format("unknown body part '{}'", key));
  std::vector<PartDef> parts;
  for (BodyPart p : kCanonicalParts) {
    const std::string key(part_name(p));
    if (!parts_doc.contains(key)) schema_error(fmt::format("missing body part '{}'", key));
    if (!parts_doc[key].is_array()) schema_error(fmt::format("part '{}' must be an array", key));
    PartDef def{p, {}};
    for (const auto& name : parts_doc[key])
      def.joint_ids.push_back(joint_by_name(names, name, "part '" + key + "'"));
    parts.push_back(std::move(def));
  }

  ReferenceJoint reference;
  const auto& ref = doc["reference"];
  if (ref.is_array()) {
    if (ref.size() != 2) schema_error("'reference' pair must have exactly two joint names");
    reference = {joint_by_name(names, ref[0], "reference"), joint_by_name(names, ref[1], "reference")};
  } else {
    reference = {joint_by_name(names, ref, "reference"), std::nullopt};
  }

  return SkeletonFormat::create(doc["format_id"].get<std::string>(), std::move(joints),
                                std::move(parts), reference);
}

SkeletonFormat load_format_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open format document " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_format(ss.str());
}

std::string dump_format(const SkeletonFormat& format) {
  nlohmann::ordered_json doc;
  doc["format_id"] = format.id();
  doc["joints"] = nlohmann::ordered_json::array();
  for (const auto& j : format.joints()) {
    nlohmann::ordered_json e;
    e["id"] = j.id;
    e["name"] = j.name;
    e["parent"] = j.parent == kRootParent ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(j.parent);
    doc["joints"].push_back(std::move(e));
  }
  nlohmann::ordered_json parts = nlohmann::ordered_json::object();
  for (const auto& p : format.parts()) {
    auto names = nlohmann::ordered_json::array();
    for (int id : p.joint_ids) names.push_back(format.joints()[id].name);
    parts[std::string(part_name(p.part))] = std::move(names);
  }
  doc["parts"] = std::move(parts);
  const auto& ref = format.reference();
  if (ref.second)
    doc["reference"] = {format.joints()[ref.first].name, format.joints()[*ref.second].name};
  else
    doc["reference"] = format.joints()[ref.first].name;
  return doc.dump(2) + "\n";
}

std::vector<int> s2i_joint_order(const SkeletonFormat& format) {
  std::vector<int> order;
  order.reserve(format.joint_count());
  for (const auto& p : format.parts()) order.insert(order.end(), p.joint_ids.begin(), p.joint_ids.end());
  return order;
}

FormatRegistry::FormatRegistry() {
  for (auto f : {BuiltinFormat::Ntu25, BuiltinFormat::Ucla20, BuiltinFormat::Toyota13})
    formats_.emplace(std::string(builtin_name(f)), builtin_format(f));
}

const SkeletonFormat& FormatRegistry::add(SkeletonFormat format) {
  if (auto it = formats_.find(format.id()); it != formats_.end()) {
    if (!(it->second == format))
      throw FormatError("format id '" + format.id() + "' is already registered with a different layout");
    return it->second;
  }
  auto id = format.id();
  return formats_.emplace(std::move(id), std::move(format)).first->second;
}

const SkeletonFormat* FormatRegistry::find(std::string_view id) const {
  auto it = formats_.find(id);
  return it == formats_.end() ? nullptr : &it->second;
}

const SkeletonFormat& FormatRegistry::get(std::string_view id) const {
  if (const auto* f = find(id)) return *f;
  throw FormatError(fmt::format("unknown skeleton format '{}'", id));
}

const SkeletonFormat& FormatRegistry::resolve(const std::string& spec) {
  if (const auto* f = find(spec)) return *f;
  std::ifstream probe(spec);
  if (!probe) throw FormatError(fmt::format("unknown skeleton format '{}'", spec));
  return add(load_format_file(spec));
}

std::vector<std::string> FormatRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : formats_) out.push_back(id);
  return out;
}

}  // namespace s2i
