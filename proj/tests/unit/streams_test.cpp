#include <doctest.h>

#include <cmath>

#include "s2i/error.hpp"
#include "s2i/streams.hpp"
#include "support.hpp"

using namespace s2i;

namespace {
const SkeletonFormat& ntu() { return builtin_format(BuiltinFormat::Ntu25); }
}

TEST_SUITE("streams") {
  TEST_CASE("root bone is zero and children point from their parent") {
    std::mt19937_64 rng(1);
    const auto seq = testing::random_sequence(rng, 6, 25);
    const auto bones = bone_stream(seq, ntu());
    for (std::size_t t = 0; t < 6; ++t) {
      CHECK(bones.at(t, ntu().root()) == Vec3{});
      // head (3) hangs off neck (2)
      CHECK(bones.at(t, 3) == seq.at(t, 3) - seq.at(t, 2));
    }
  }

  TEST_CASE("two-joint chain gives a constant bone") {
    std::mt19937_64 rng(2);
    // chain_format: joint j's parent is j - 1
    const auto f = testing::chain_format(5);
    auto seq = testing::random_sequence(rng, 4, 5, "chain");
    for (std::size_t t = 0; t < 4; ++t) seq.at(t, 1) = seq.at(t, 0) + Vec3{0, 1, 0};
    const auto bones = bone_stream(seq, f);
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(bones.at(t, 1).x == doctest::Approx(0.0));
      CHECK(bones.at(t, 1).y == doctest::Approx(1.0));
      CHECK(bones.at(t, 1).z == doctest::Approx(0.0));
    }
  }

  TEST_CASE("bone stream cancels translation") {
    std::mt19937_64 rng(3);
    const auto seq = testing::random_sequence(rng, 10, 25);
    const Vec3 v{0.3, -7.0, 2.5};
    const auto a = bone_stream(seq, ntu());
    const auto b = bone_stream(testing::shifted(seq, v), ntu());
    for (std::size_t k = 0; k < a.data().size(); ++k)
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(a.data()[k][c] - b.data()[k][c]) <= 1e-9);
  }

  TEST_CASE("motion stream") {
    SUBCASE("constant sequence has no motion") {
      SkeletonSequence seq("ntu25", 5, 25);
      for (auto& p : seq.data()) p = {1, 2, 3};
      const auto motion = motion_stream(seq);
      for (const auto& p : motion.data()) CHECK(p == Vec3{});
    }
    SUBCASE("linear motion") {
      SkeletonSequence seq("ntu25", 6, 25);
      for (std::size_t t = 0; t < 6; ++t)
        for (std::size_t j = 0; j < 25; ++j) seq.at(t, j) = {static_cast<double>(t), 0, 0};
      const auto m = motion_stream(seq);
      for (std::size_t j = 0; j < 25; ++j) {
        CHECK(m.at(0, j) == Vec3{});
        for (std::size_t t = 1; t < 6; ++t) CHECK(m.at(t, j) == Vec3{1, 0, 0});
      }
    }
    SUBCASE("single frame") {
      std::mt19937_64 rng(4);
      const auto m = motion_stream(testing::random_sequence(rng, 1, 25));
      CHECK(m.frames() == 1);
      for (const auto& p : m.data()) CHECK(p == Vec3{});
    }
  }

  TEST_CASE("motion sums telescopically") {
    std::mt19937_64 rng(5);
    const auto seq = testing::random_sequence(rng, 20, 25, "ntu25", -3, 3);
    const auto m = motion_stream(seq);
    for (std::size_t j = 0; j < 25; ++j) {
      Vec3 sum;
      for (std::size_t t = 1; t < 20; ++t) sum += m.at(t, j);
      const Vec3 expected = seq.at(19, j) - seq.at(0, j);
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(sum[c] - expected[c]) <= 1e-9);
    }
  }

  TEST_CASE("stream names") {
    CHECK(parse_stream("bone") == Stream::Bone);
    CHECK(stream_name(Stream::Motion) == "motion");
    CHECK_THROWS_AS(parse_stream("velocity"), ValueError);
    std::mt19937_64 rng(6);
    const auto seq = testing::random_sequence(rng, 3, 25);
    CHECK(derive_stream(seq, ntu(), Stream::Joint) == seq);
    CHECK(derive_stream(seq, ntu(), Stream::Motion).frames() == 3);
  }
}
