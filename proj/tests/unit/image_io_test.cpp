#include <doctest.h>

#include <cmath>
#include <cstring>

#include "s2i/error.hpp"
#include "s2i/image_io.hpp"
#include "support.hpp"

using namespace s2i;

namespace {

S2IImage random_image(std::mt19937_64& rng, std::size_t h, std::size_t w, double lo = -3, double hi = 3) {
  std::uniform_real_distribution<double> u(lo, hi);
  S2IImage img(h, w);
  for (auto& v : img.pixels()) v = static_cast<float>(u(rng));
  img.meta.sample_id = "s";
  img.meta.format_id = "ntu25";
  img.meta.original_frames = 10;
  img.meta.original_joints = 25;
  img.meta.joint_order = s2i_joint_order(builtin_format(BuiltinFormat::Ntu25));
  return img;
}

}  // namespace

TEST_SUITE("image_io") {
  TEST_CASE("f32raw header layout") {
    S2IImage img(2, 3);
    img.at(0, 0, 0) = 1.0f;
    const auto bytes = to_f32raw(img);
    REQUIRE(bytes.size() == 12 + 2 * 3 * 3 * 4);
    CHECK(std::memcmp(bytes.data(), "S2I1", 4) == 0);
    CHECK(bytes[4] == 2);
    CHECK(bytes[8] == 3);
    // 1.0f little-endian
    CHECK(bytes[12] == 0x00);
    CHECK(bytes[15] == 0x3f);
    CHECK(bytes[14] == 0x80);
  }

  TEST_CASE("f32raw export then import is bit-identical") {
    std::mt19937_64 rng(1);
    auto img = random_image(rng, 224, 224);
    img.meta.normalization = Normalization{{0.1, 0.2, 0.3}, {1, 2, 3}};
    const auto out = export_image(img, ExportMode::F32Raw);
    const auto back = import_image(out.payload, out.sidecar);
    CHECK(back == img);
    CHECK(to_f32raw(back) == out.payload);
  }

  TEST_CASE("f32raw rejects bad input") {
    std::vector<std::uint8_t> junk = {'P', 'N', 'G', '!', 0, 0, 0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(from_f32raw(junk), ParseError);
    S2IImage img(2, 2);
    auto bytes = to_f32raw(img);
    bytes.pop_back();
    CHECK_THROWS_AS(from_f32raw(bytes), ParseError);
  }

  TEST_CASE("png8 constant channel maps to 128 with scale 0") {
    S2IImage img(16, 16);
    for (std::size_t i = 0; i < img.pixels().size(); i += 3) {
      img.pixels()[i] = 0.7f;
      img.pixels()[i + 1] = static_cast<float>(i % 7);
      img.pixels()[i + 2] = -2.0f;
    }
    std::array<ChannelAffine, 3> affine;
    const auto png = to_png8(img, affine);
    CHECK(affine[0].scale == 0.0);
    CHECK(affine[2].scale == 0.0);
    CHECK(affine[0].offset == doctest::Approx(0.7));
    const auto back = from_png8(png, affine);
    for (std::size_t i = 0; i < img.pixels().size(); i += 3) {
      CHECK(back.pixels()[i] == 0.7f);
      CHECK(back.pixels()[i + 2] == -2.0f);
    }
    // Raw bytes: decode with a unit affine to see the stored 8-bit values.
    const std::array<ChannelAffine, 3> unit{};
    const auto raw = from_png8(png, unit);
    CHECK(raw.pixels()[0] == 128.0f);
    CHECK(raw.pixels()[2] == 128.0f);
  }

  TEST_CASE("png8 round-trip stays within the quantization bound") {
    std::mt19937_64 rng(2);
    const auto img = random_image(rng, 64, 48);
    const auto out = export_image(img, ExportMode::Png8);
    const auto back = import_image(out.payload, out.sidecar);
    REQUIRE(back.height() == 64);
    for (std::size_t c = 0; c < 3; ++c) {
      float lo = img.pixels()[c], hi = lo;
      for (std::size_t i = c; i < img.pixels().size(); i += 3) {
        lo = std::min(lo, img.pixels()[i]);
        hi = std::max(hi, img.pixels()[i]);
      }
      const double bound = (static_cast<double>(hi) - lo) / 255.0 * 0.5 + 1e-6;
      for (std::size_t i = c; i < img.pixels().size(); i += 3)
        REQUIRE(std::abs(back.pixels()[i] - img.pixels()[i]) <= bound);
    }
    CHECK(back.meta.joint_order == img.meta.joint_order);
  }

  TEST_CASE("corrupt png payload is reported") {
    std::mt19937_64 rng(3);
    const auto img = random_image(rng, 8, 8);
    auto out = export_image(img, ExportMode::Png8);
    out.payload.resize(out.payload.size() / 2);
    CHECK_THROWS_AS(import_image(out.payload, out.sidecar), Error);
  }

  TEST_CASE("sidecar carries meta verbatim") {
    std::mt19937_64 rng(4);
    auto img = random_image(rng, 4, 4);
    img.meta.stream = "bone";
    const auto doc = write_sidecar(img.meta, ExportMode::F32Raw, 4, 4);
    const auto side = read_sidecar(doc);
    CHECK(side.meta == img.meta);
    CHECK(side.height == 4);
    CHECK(side.mode == ExportMode::F32Raw);
    CHECK_THROWS_AS(read_sidecar("{}"), ParseError);
  }
}
