#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "s2i/error.hpp"
#include "s2i/format_registry.hpp"
#include "support.hpp"

using namespace s2i;

namespace {

std::vector<std::size_t> part_sizes(const SkeletonFormat& f) {
  std::vector<std::size_t> out;
  for (const auto& p : f.parts()) out.push_back(p.joint_ids.size());
  return out;
}

std::vector<std::string> names_of(const SkeletonFormat& f, BodyPart p) {
  std::vector<std::string> out;
  for (int id : f.part(p).joint_ids) out.push_back(f.joints()[id].name);
  return out;
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(S2I_SOURCE_DIR) + "/docs/formats/" + name + ".json");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("format_registry") {
  TEST_CASE("built-in part sizes follow the partition table") {
    CHECK(part_sizes(builtin_format(BuiltinFormat::Ntu25)) == std::vector<std::size_t>{5, 6, 6, 4, 4});
    CHECK(part_sizes(builtin_format(BuiltinFormat::Ucla20)) == std::vector<std::size_t>{4, 4, 4, 4, 4});
    CHECK(part_sizes(builtin_format(BuiltinFormat::Toyota13)) == std::vector<std::size_t>{1, 3, 3, 3, 3});
    CHECK(builtin_format(BuiltinFormat::Ntu25).joint_count() == 25);
    CHECK(builtin_format(BuiltinFormat::Ucla20).joint_count() == 20);
    CHECK(builtin_format(BuiltinFormat::Toyota13).joint_count() == 13);
  }

  TEST_CASE("ntu25 part membership and order") {
    const auto& f = builtin_format(BuiltinFormat::Ntu25);
    CHECK(names_of(f, BodyPart::Spine) ==
          std::vector<std::string>{"head", "neck", "spine", "middle of spine", "base of spine"});
    CHECK(names_of(f, BodyPart::LeftArm) ==
          std::vector<std::string>{"left shoulder", "left elbow", "left wrist", "left hand", "left thumb",
                                   "tip of left hand"});
    CHECK(names_of(f, BodyPart::RightArm) ==
          std::vector<std::string>{"right shoulder", "right elbow", "right wrist", "right hand", "right thumb",
                                   "tip of right hand"});
    CHECK(names_of(f, BodyPart::LeftLeg) ==
          std::vector<std::string>{"left hip", "left knee", "left ankle", "left foot"});
    CHECK(names_of(f, BodyPart::RightLeg) ==
          std::vector<std::string>{"right hip", "right knee", "right ankle", "right foot"});
    // Kinect v2 file indexing: 0 is the base of the spine, 3 the head.
    CHECK(f.joints()[0].name == "base of spine");
    CHECK(f.joints()[3].name == "head");
    CHECK(f.root() == 0);
    CHECK(f.reference() == ReferenceJoint{0, std::nullopt});
  }

  TEST_CASE("ucla20 and toyota13 membership") {
    const auto& u = builtin_format(BuiltinFormat::Ucla20);
    CHECK(names_of(u, BodyPart::Spine) ==
          std::vector<std::string>{"head", "spine", "middle of spine", "base of spine"});
    CHECK(names_of(u, BodyPart::LeftArm) ==
          std::vector<std::string>{"left shoulder", "left elbow", "left wrist", "left hand"});
    CHECK(u.joints()[u.reference().first].name == "base of spine");

    const auto& t = builtin_format(BuiltinFormat::Toyota13);
    CHECK(names_of(t, BodyPart::Spine) == std::vector<std::string>{"head"});
    CHECK(names_of(t, BodyPart::RightLeg) ==
          std::vector<std::string>{"right hip", "right knee", "right ankle"});
    REQUIRE(t.reference().second.has_value());
    CHECK(t.joints()[t.reference().first].name == "left hip");
    CHECK(t.joints()[*t.reference().second].name == "right hip");
  }

  TEST_CASE("s2i joint order") {
    const auto& ntu = builtin_format(BuiltinFormat::Ntu25);
    const auto order = s2i_joint_order(ntu);
    CHECK(std::vector<int>(order.begin(), order.begin() + 5) == std::vector<int>{3, 2, 20, 1, 0});

    const auto& toyota = builtin_format(BuiltinFormat::Toyota13);
    const auto t = s2i_joint_order(toyota);
    CHECK(toyota.joints()[t[0]].name == "head");
    CHECK(toyota.joints()[t[1]].name == "left shoulder");
    CHECK(toyota.joints()[t[2]].name == "left elbow");
    CHECK(toyota.joints()[t[3]].name == "left wrist");

    for (auto b : {BuiltinFormat::Ntu25, BuiltinFormat::Ucla20, BuiltinFormat::Toyota13}) {
      auto o = s2i_joint_order(builtin_format(b));
      std::sort(o.begin(), o.end());
      std::vector<int> expected(o.size());
      std::iota(expected.begin(), expected.end(), 0);
      CHECK(o == expected);
    }
  }

  TEST_CASE("joint order is a bijection on random formats") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t J = testing::uniform_index(rng, 5, 60);
      const auto f = testing::random_format(rng, J);
      auto o = s2i_joint_order(f);
      REQUIRE(o.size() == J);
      std::sort(o.begin(), o.end());
      for (std::size_t i = 0; i < J; ++i) REQUIRE(o[i] == static_cast<int>(i));
    }
  }

  TEST_CASE("built-ins round-trip through the document loader and match golden files") {
    for (auto b : {BuiltinFormat::Ntu25, BuiltinFormat::Ucla20, BuiltinFormat::Toyota13}) {
      const auto& f = builtin_format(b);
      const auto doc = dump_format(f);
      CHECK(load_format(doc) == f);
      CHECK(doc == golden(std::string(builtin_name(b))));
    }
  }

  TEST_CASE("loader rejects partition and tree violations") {
    auto doc = nlohmann::json::parse(dump_format(builtin_format(BuiltinFormat::Toyota13)));

    SUBCASE("joint missing from every part") {
      doc["parts"]["RightLeg"].erase(doc["parts"]["RightLeg"].size() - 1);
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("joint listed twice") {
      doc["parts"]["Spine"].push_back("left hip");
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("parent cycle") {
      // left ankle -> left knee -> left ankle
      for (auto& j : doc["joints"]) {
        if (j["name"] == "left knee") j["parent"] = 1;
      }
      CHECK_THROWS_WITH_AS(load_format(doc.dump()), doctest::Contains("cycle"), FormatError);
    }
    SUBCASE("two roots") {
      doc["joints"][0]["parent"] = nullptr;
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("unknown part name") {
      doc["parts"]["Torso"] = nlohmann::json::array();
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("missing field") {
      doc.erase("reference");
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("reference names an unknown joint") {
      doc["reference"] = "pelvis";
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("non-contiguous ids") {
      doc["joints"][0]["id"] = 40;
      CHECK_THROWS_AS(load_format(doc.dump()), FormatError);
    }
    SUBCASE("not JSON") { CHECK_THROWS_AS(load_format("{format_id:"), FormatError); }
  }

  TEST_CASE("registry lookup") {
    FormatRegistry reg;
    CHECK(reg.get("ntu25").joint_count() == 25);
    CHECK(reg.find("kinect32") == nullptr);
    CHECK_THROWS_AS(reg.get("kinect32"), FormatError);
    CHECK_THROWS_AS(reg.resolve("/nonexistent/format.json"), FormatError);

    std::mt19937_64 rng(3);
    auto custom = testing::random_format(rng, 9, "custom9");
    reg.add(custom);
    CHECK(reg.get("custom9") == custom);
    CHECK_NOTHROW(reg.add(custom));
    CHECK_THROWS_AS(reg.add(testing::random_format(rng, 10, "custom9")), FormatError);
  }
}
