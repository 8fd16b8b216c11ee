#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s2i/encoder.hpp"

namespace s2i {

enum class ExportMode { Png8, F32Raw };

std::string_view export_mode_name(ExportMode mode);
ExportMode parse_export_mode(std::string_view name);

struct ExportedImage {
  std::vector<std::uint8_t> payload;
  std::string sidecar;  // JSON
  ExportMode mode = ExportMode::F32Raw;
};

// f32raw: "S2I1", u32 H, u32 W, then H*W*3 little-endian f32, row-major.
std::vector<std::uint8_t> to_f32raw(const S2IImage& img);
S2IImage from_f32raw(std::span<const std::uint8_t> bytes);

// png8: per-channel min-max quantization; a constant channel maps to 128 with
// scale 0. The affine actually used is returned in `affine`.
std::vector<std::uint8_t> to_png8(const S2IImage& img, std::array<ChannelAffine, 3>& affine);
S2IImage from_png8(std::span<const std::uint8_t> bytes, const std::array<ChannelAffine, 3>& affine);

ExportedImage export_image(const S2IImage& img, ExportMode mode);

// Reads either payload kind; meta comes from the sidecar.
S2IImage import_image(std::span<const std::uint8_t> payload, std::string_view sidecar);

std::string write_sidecar(const ImageMeta& meta, ExportMode mode, std::size_t height, std::size_t width);

struct Sidecar {
  ImageMeta meta;
  ExportMode mode = ExportMode::F32Raw;
  std::size_t height = 0;
  std::size_t width = 0;
};
Sidecar read_sidecar(std::string_view document);

}  // namespace s2i
