#include "s2i/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <png.h>

#include "s2i/error.hpp"

namespace s2i {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'S', '2', 'I', '1'};
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

struct PngWriteBuffer {
  std::vector<std::uint8_t>* out;
};

void png_write_cb(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<PngWriteBuffer*>(png_get_io_ptr(png));
  buf->out->insert(buf->out->end(), data, data + length);
}

struct PngReadBuffer {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_cb(png_structp png, png_bytep data, png_size_t length) {
  auto* buf = static_cast<PngReadBuffer*>(png_get_io_ptr(png));
  if (buf->pos + length > buf->bytes.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(data, buf->bytes.data() + buf->pos, length);
  buf->pos += length;
}

void png_error_cb(png_structp, png_const_charp msg) { throw Error(std::string("png: ") + msg); }
void png_warning_cb(png_structp, png_const_charp) {}

}  // namespace

std::string_view export_mode_name(ExportMode mode) {
  return mode == ExportMode::Png8 ? "png8" : "f32raw";
}

ExportMode parse_export_mode(std::string_view name) {
  if (name == "png8") return ExportMode::Png8;
  if (name == "f32raw") return ExportMode::F32Raw;
  throw ValueError(fmt::format("unknown export mode '{}' (expected png8 or f32raw)", name));
}

std::vector<std::uint8_t> to_f32raw(const S2IImage& img) {
  std::vector<std::uint8_t> out(kHeaderBytes + img.pixels().size() * 4);
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  put_u32(out.data() + 4, static_cast<std::uint32_t>(img.height()));
  put_u32(out.data() + 8, static_cast<std::uint32_t>(img.width()));
  std::uint8_t* p = out.data() + kHeaderBytes;
  for (float v : img.pixels()) {
    put_u32(p, std::bit_cast<std::uint32_t>(v));
    p += 4;
  }
  return out;
}

S2IImage from_f32raw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw ParseError("not an f32raw image (bad magic)");
  const std::size_t h = get_u32(bytes.data() + 4);
  const std::size_t w = get_u32(bytes.data() + 8);
  if (bytes.size() != kHeaderBytes + h * w * 3 * 4)
    throw ParseError(fmt::format("f32raw payload size {} does not match {}x{}x3 header",
                                 bytes.size() - kHeaderBytes, h, w));
  S2IImage img(h, w);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (auto& v : img.pixels()) {
    v = std::bit_cast<float>(get_u32(p));
    p += 4;
  }
  return img;
}

std::vector<std::uint8_t> to_png8(const S2IImage& img, std::array<ChannelAffine, 3>& affine) {
  const std::size_t h = img.height(), w = img.width();
  if (h == 0 || w == 0) throw ValueError("cannot export an empty image");
  for (std::size_t c = 0; c < 3; ++c) {
    float lo = img.pixels()[c], hi = img.pixels()[c];
    for (std::size_t i = c; i < img.pixels().size(); i += 3) {
      lo = std::min(lo, img.pixels()[i]);
      hi = std::max(hi, img.pixels()[i]);
    }
    affine[c] = hi > lo ? ChannelAffine{(static_cast<double>(hi) - lo) / 255.0, lo}
                        : ChannelAffine{0.0, lo};
  }
  std::vector<std::uint8_t> rgb(h * w * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const auto& a = affine[i % 3];
    if (a.scale == 0.0) {
      rgb[i] = 128;
    } else {
      const double q = std::nearbyint((img.pixels()[i] - a.offset) / a.scale);
      rgb[i] = static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
    }
  }

  std::vector<std::uint8_t> out;
  PngWriteBuffer buf{&out};
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb, png_warning_cb);
  if (!png) throw Error("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &buf, png_write_cb, nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < h; ++r) png_write_row(png, &rgb[r * w * 3]);
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

S2IImage from_png8(std::span<const std::uint8_t> bytes, const std::array<ChannelAffine, 3>& affine) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ParseError("not a PNG image");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_cb, png_warning_cb);
  if (!png) throw Error("png: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  PngReadBuffer buf{bytes, 0};
  S2IImage img;
  try {
    png_set_read_fn(png, &buf, png_read_cb);
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_RGB || png_get_bit_depth(png, info) != 8)
      throw ParseError("png8 payload must be 8-bit RGB");
    const std::size_t w = png_get_image_width(png, info);
    const std::size_t h = png_get_image_height(png, info);
    img = S2IImage(h, w);
    std::vector<std::uint8_t> row(w * 3);
    for (std::size_t r = 0; r < h; ++r) {
      png_read_row(png, row.data(), nullptr);
      for (std::size_t k = 0; k < w * 3; ++k) {
        const auto& a = affine[k % 3];
        img.pixels()[r * w * 3 + k] = static_cast<float>(a.scale * row[k] + a.offset);
      }
    }
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

std::string write_sidecar(const ImageMeta& meta, ExportMode mode, std::size_t height, std::size_t width) {
  nlohmann::ordered_json doc;
  doc["sample_id"] = meta.sample_id;
  doc["format_id"] = meta.format_id;
  doc["stream"] = meta.stream;
  doc["encoding"] = export_mode_name(mode);
  doc["height"] = height;
  doc["width"] = width;
  doc["original_T"] = meta.original_frames;
  doc["original_J"] = meta.original_joints;
  auto affine = nlohmann::ordered_json::array();
  for (const auto& a : meta.channel_affine) affine.push_back({{"scale", a.scale}, {"offset", a.offset}});
  doc["channel_affine"] = std::move(affine);
  doc["joint_order"] = meta.joint_order;
  if (meta.normalization)
    doc["normalization"] = {{"mean", meta.normalization->mean}, {"std", meta.normalization->std}};
  return doc.dump(2) + "\n";
}

Sidecar read_sidecar(std::string_view document) {
  Sidecar out;
  try {
    const auto doc = nlohmann::json::parse(document);
    auto& m = out.meta;
    m.sample_id = doc.at("sample_id").get<std::string>();
    m.format_id = doc.at("format_id").get<std::string>();
    m.stream = doc.value("stream", std::string("joint"));
    out.mode = parse_export_mode(doc.at("encoding").get<std::string>());
    out.height = doc.at("height").get<std::size_t>();
    out.width = doc.at("width").get<std::size_t>();
    m.original_frames = doc.at("original_T").get<std::size_t>();
    m.original_joints = doc.at("original_J").get<std::size_t>();
    const auto& affine = doc.at("channel_affine");
    if (!affine.is_array() || affine.size() != 3) throw ParseError("channel_affine needs 3 entries");
    for (std::size_t c = 0; c < 3; ++c)
      m.channel_affine[c] = {affine[c].at("scale").get<double>(), affine[c].at("offset").get<double>()};
    m.joint_order = doc.at("joint_order").get<std::vector<int>>();
    if (doc.contains("normalization") && !doc["normalization"].is_null()) {
      Normalization n;
      n.mean = doc["normalization"].at("mean").get<std::array<double, 3>>();
      n.std = doc["normalization"].at("std").get<std::array<double, 3>>();
      m.normalization = n;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid sidecar: ") + e.what());
  }
  return out;
}

ExportedImage export_image(const S2IImage& img, ExportMode mode) {
  ExportedImage out;
  out.mode = mode;
  ImageMeta meta = img.meta;
  if (mode == ExportMode::F32Raw) {
    out.payload = to_f32raw(img);
    meta.channel_affine = {};
  } else {
    out.payload = to_png8(img, meta.channel_affine);
  }
  out.sidecar = write_sidecar(meta, mode, img.height(), img.width());
  return out;
}

S2IImage import_image(std::span<const std::uint8_t> payload, std::string_view sidecar) {
  auto side = read_sidecar(sidecar);
  S2IImage img = side.mode == ExportMode::F32Raw ? from_f32raw(payload)
                                                 : from_png8(payload, side.meta.channel_affine);
  if (img.height() != side.height || img.width() != side.width)
    throw ParseError(fmt::format("payload is {}x{} but sidecar says {}x{}", img.height(), img.width(),
                                 side.height, side.width));
  if (side.mode == ExportMode::F32Raw) side.meta.channel_affine = {};
  img.meta = std::move(side.meta);
  return img;
}

}  // namespace s2i
