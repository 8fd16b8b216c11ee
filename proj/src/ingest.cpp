#include "s2i/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "s2i/error.hpp"

namespace s2i {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split on whitespace; throws on EOF with `expecting` in the message.
  const std::vector<std::string_view>& next(std::string_view expecting) {
    if (!std::getline(in_, line_))
      throw ParseError(fmt::format("truncated file: expected {}", expecting), line_no_ + 1);
    ++line_no_;
    tokens_.clear();
    std::size_t i = 0;
    while (i < line_.size()) {
      while (i < line_.size() && std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
      std::size_t start = i;
      while (i < line_.size() && !std::isspace(static_cast<unsigned char>(line_[i]))) ++i;
      if (i > start) tokens_.emplace_back(line_.data() + start, i - start);
    }
    return tokens_;
  }

  bool only_blank_lines_remain() {
    std::string rest;
    while (std::getline(in_, rest)) {
      ++line_no_;
      if (rest.find_first_not_of(" \t\r\n") != std::string::npos) return false;
    }
    return true;
  }

  std::size_t line() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  std::size_t line_no_ = 0;
};

double to_real(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(fmt::format("non-numeric token '{}'", tok), line);
  return v;
}

long long to_count(std::string_view tok, std::size_t line, std::string_view what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0)
    throw ParseError(fmt::format("expected a non-negative {} but found '{}'", what, tok), line);
  return v;
}

void expect_fields(const std::vector<std::string_view>& tokens, std::size_t n, std::size_t line,
                   std::string_view what) {
  if (tokens.size() != n)
    throw ParseError(fmt::format("{} line has {} fields, expected {}", what, tokens.size(), n), line);
}

}  // namespace

std::vector<RawFrame> parse_ntu_skeleton(std::istream& in) {
  LineReader reader(in);
  const auto& header = reader.next("frame count");
  expect_fields(header, 1, reader.line(), "frame count");
  const auto frame_count = to_count(header[0], reader.line(), "frame count");

  std::vector<RawFrame> frames;
  frames.reserve(static_cast<std::size_t>(std::min<long long>(frame_count, 1 << 16)));
  for (long long f = 0; f < frame_count; ++f) {
    const auto expecting_frame =
        fmt::format("body count of frame {} (file declares {} frames, found {})", f + 1,
                    frame_count, f);
    const auto& bc = reader.next(expecting_frame);
    expect_fields(bc, 1, reader.line(), "body count");
    const auto body_count = to_count(bc[0], reader.line(), "body count");

    RawFrame frame;
    for (long long b = 0; b < body_count; ++b) {
      RawBodyFrame body;
      const auto& info = reader.next(fmt::format("body info line of frame {} body {}", f + 1, b + 1));
      expect_fields(info, 10, reader.line(), "body info");
      body.body_id = std::string(info[0]);
      for (std::size_t k = 0; k < 9; ++k) body.body_info[k] = to_real(info[k + 1], reader.line());

      const auto& jc = reader.next(fmt::format("joint count of frame {} body {}", f + 1, b + 1));
      expect_fields(jc, 1, reader.line(), "joint count");
      const auto joint_count = to_count(jc[0], reader.line(), "joint count");
      if (joint_count == 0) throw ParseError("body declares zero joints", reader.line());

      body.joints.resize(static_cast<std::size_t>(joint_count));
      for (auto& joint : body.joints) {
        const auto& tok = reader.next(fmt::format("joint line (frame {} body {} declares {} joints)",
                                                  f + 1, b + 1, joint_count));
        expect_fields(tok, 12, reader.line(), "joint");
        const auto line = reader.line();
        joint.position = {to_real(tok[0], line), to_real(tok[1], line), to_real(tok[2], line)};
        joint.depth = {to_real(tok[3], line), to_real(tok[4], line)};
        joint.color = {to_real(tok[5], line), to_real(tok[6], line)};
        joint.orientation = {to_real(tok[7], line), to_real(tok[8], line), to_real(tok[9], line),
                             to_real(tok[10], line)};
        joint.tracking_state = static_cast<int>(to_real(tok[11], line));
      }
      frame.push_back(std::move(body));
    }
    frames.push_back(std::move(frame));
  }
  if (!reader.only_blank_lines_remain())
    throw ParseError(fmt::format("trailing data after the {} declared frames", frame_count),
                     reader.line());
  return frames;
}

std::vector<RawFrame> parse_ntu_skeleton_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_ntu_skeleton(in);
}

SkeletonSequence parse_generic_json(std::string_view document, const SkeletonFormat& format) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sequence document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array())
    throw ParseError("sequence document needs a 'frames' array");
  if (doc.contains("format_id")) {
    if (!doc["format_id"].is_string()) throw ParseError("'format_id' must be a string");
    if (doc["format_id"].get<std::string>() != format.id())
      throw ParseError(fmt::format("document is format '{}' but '{}' was requested",
                                   doc["format_id"].get<std::string>(), format.id()));
  }
  const auto& frames = doc["frames"];
  if (frames.empty()) throw ParseError("sequence document has no frames");
  const std::size_t joints = format.joint_count();

  const nlohmann::json* bodies = nullptr;
  if (doc.contains("bodies") && !doc["bodies"].is_null()) {
    bodies = &doc["bodies"];
    if (!bodies->is_array() || bodies->size() != frames.size())
      throw ParseError("'bodies' must be an array with one label per frame");
  }

  SkeletonSequence seq(format.id(), 0, joints);
  std::vector<Vec3> frame(joints);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& fr = frames[t];
    if (!fr.is_array()) throw ParseError(fmt::format("frame {} must be an array of joints", t));
    if (fr.size() != joints)
      throw ParseError(fmt::format("frame {} has {} joints but format '{}' has {}", t, fr.size(),
                                   format.id(), joints));
    for (std::size_t j = 0; j < joints; ++j) {
      const auto& p = fr[j];
      if (!p.is_array() || p.size() != 3)
        throw ParseError(fmt::format("frame {} joint {}: expected [x, y, z]", t, j));
      for (std::size_t c = 0; c < 3; ++c) {
        if (!p[c].is_number())
          throw ParseError(fmt::format("frame {} joint {}: coordinate {} is not a number", t, j, c));
        const double v = p[c].get<double>();
        if (!std::isfinite(v))
          throw ParseError(fmt::format("frame {} joint {}: coordinate {} is not finite", t, j, c));
        frame[j][c] = v;
      }
    }
    std::string label;
    if (bodies) {
      const auto& b = (*bodies)[t];
      label = b.is_string() ? b.get<std::string>() : b.dump();
    }
    seq.append_frame(frame, std::move(label));
  }
  if (doc.contains("sample_id") && doc["sample_id"].is_string())
    seq.set_sample_id(doc["sample_id"].get<std::string>());
  return seq;
}

std::string serialize_generic_json(const SkeletonSequence& seq) {
  nlohmann::ordered_json doc;
  doc["sample_id"] = seq.sample_id();
  doc["format_id"] = seq.format_id();
  auto frames = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    auto fr = nlohmann::ordered_json::array();
    for (const auto& p : seq.frame(t)) fr.push_back({p.x, p.y, p.z});
    frames.push_back(std::move(fr));
  }
  doc["frames"] = std::move(frames);
  const auto& track = seq.body_track();
  if (std::any_of(track.begin(), track.end(), [](const std::string& s) { return !s.empty(); }))
    doc["bodies"] = track;
  return doc.dump() + "\n";
}

bool body_id_less(std::string_view a, std::string_view b) {
  unsigned long long na = 0, nb = 0;
  auto ra = std::from_chars(a.data(), a.data() + a.size(), na);
  auto rb = std::from_chars(b.data(), b.data() + b.size(), nb);
  const bool numeric = ra.ec == std::errc() && ra.ptr == a.data() + a.size() &&
                       rb.ec == std::errc() && rb.ptr == b.data() + b.size();
  if (numeric) return na < nb;
  return a < b;
}

SkeletonSequence split_bodies(std::span<const RawFrame> frames, const SkeletonFormat& format) {
  const std::size_t joints = format.joint_count();
  SkeletonSequence seq(format.id(), 0, joints);
  std::vector<Vec3> buffer(joints);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& frame = frames[f];
    if (frame.size() > 2)
      throw ValueError(fmt::format("frame {} has {} bodies; at most two are supported", f, frame.size()));
    std::vector<const RawBodyFrame*> bodies;
    for (const auto& b : frame) bodies.push_back(&b);
    std::sort(bodies.begin(), bodies.end(), [](const RawBodyFrame* a, const RawBodyFrame* b) {
      return body_id_less(a->body_id, b->body_id);
    });
    for (const auto* body : bodies) {
      if (body->joints.size() != joints)
        throw ValueError(fmt::format("frame {} body {} has {} joints, format '{}' has {}", f,
                                     body->body_id, body->joints.size(), format.id(), joints));
      for (std::size_t j = 0; j < joints; ++j) buffer[j] = body->joints[j].position;
      seq.append_frame(buffer, body->body_id);
    }
  }
  return seq;
}

SkeletonSequence drop_zero_frames(const SkeletonSequence& seq) {
  SkeletonSequence out(seq.format_id(), 0, seq.joints());
  out.set_sample_id(seq.sample_id());
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    const auto frame = seq.frame(t);
    const bool all_zero = std::all_of(frame.begin(), frame.end(), [](const Vec3& p) {
      return p.x == 0.0 && p.y == 0.0 && p.z == 0.0;
    });
    if (!all_zero) out.append_frame(frame, seq.body(t));
  }
  return out;
}

Vec3 reference_position(std::span<const Vec3> frame, const SkeletonFormat& format) {
  const auto& ref = format.reference();
  const Vec3& a = frame[static_cast<std::size_t>(ref.first)];
  if (!ref.second) return a;
  const Vec3& b = frame[static_cast<std::size_t>(*ref.second)];
  return 0.5 * (a + b);
}

SkeletonSequence translate_by_first_frame(const SkeletonSequence& seq, const SkeletonFormat& format) {
  if (seq.frames() == 0) throw ValueError("cannot translate an empty sequence");
  if (seq.joints() != format.joint_count())
    throw ValueError(fmt::format("sequence has {} joints, format '{}' has {}", seq.joints(),
                                 format.id(), format.joint_count()));
  const Vec3 origin = reference_position(seq.frame(0), format);
  SkeletonSequence out = seq;
  for (auto& p : out.data()) p -= origin;
  return out;
}

}  // namespace s2i
