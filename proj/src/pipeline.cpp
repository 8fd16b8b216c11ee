#include "s2i/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "s2i/error.hpp"
#include "s2i/ingest.hpp"
#include "s2i/parallel.hpp"

namespace fs = std::filesystem;

namespace s2i {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string sample_id_from_path(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  for (std::string_view ext : {".skeleton", ".meta.json", ".json", ".f32", ".png"})
    if (ends_with(name, ext)) return name.substr(0, name.size() - ext.size());
  return fs::path(path).stem().string();
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  template <typename... Args>
  void operator()(fmt::format_string<Args...> f, Args&&... args) {
    if (!out_) return;
    std::lock_guard lock(mutex_);
    *out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

 private:
  std::ostream* out_;
  std::mutex mutex_;
};

std::map<std::string, const SkeletonFormat*> resolve_formats(const std::vector<WorkItem>& items,
                                                             FormatRegistry& registry) {
  std::map<std::string, const SkeletonFormat*> out;
  for (const auto& item : items)
    if (!out.count(item.format)) out[item.format] = &registry.resolve(item.format);
  return out;
}

}  // namespace

std::size_t BatchReport::failures() const {
  return static_cast<std::size_t>(std::count_if(files.begin(), files.end(), [](const FileReport& f) { return !f.ok; }));
}

std::size_t BatchReport::succeeded() const { return files.size() - failures(); }

int BatchReport::exit_code() const { return failures() == 0 ? kExitOk : kExitPartialFailure; }

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const void* data, std::size_t size) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw Error("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move " + tmp + " into place");
  }
}

void write_atomic(const std::string& path, const std::string& text) {
  write_atomic(path, text.data(), text.size());
}

std::string payload_extension(ExportMode mode) { return mode == ExportMode::Png8 ? ".png" : ".f32"; }

std::string sidecar_path_for(const std::string& output_dir, const std::string& sample_id) {
  return (fs::path(output_dir) / (sample_id + ".meta.json")).string();
}

SkeletonSequence preprocess(SkeletonSequence seq, const SkeletonFormat& format,
                            const PreprocessOptions& options) {
  if (!options.keep_zero_frames) seq = drop_zero_frames(seq);
  if (seq.frames() == 0) throw ValueError("sequence has no usable frames");
  if (options.translate) seq = translate_by_first_frame(seq, format);
  seq.validate();
  return seq;
}

SkeletonSequence load_sequence(const std::string& path, const SkeletonFormat& format,
                               const PreprocessOptions& options) {
  SkeletonSequence seq;
  if (ends_with(path, ".json")) {
    seq = parse_generic_json(read_text(path), format);
  } else {
    const auto frames = parse_ntu_skeleton_file(path);
    seq = split_bodies(frames, format);
  }
  if (seq.sample_id().empty()) seq.set_sample_id(sample_id_from_path(path));
  return preprocess(std::move(seq), format, options);
}

S2IImage encode_sample(const SkeletonSequence& seq, const SkeletonFormat& format, Stream stream,
                       ImageSize size, const std::optional<Normalization>& norm) {
  S2IImage img = encode(derive_stream(seq, format, stream), format, size);
  img.meta.stream = std::string(stream_name(stream));
  if (norm) img = normalize(img, *norm);
  return img;
}

std::vector<WorkItem> collect_work(const JobSpec& spec) {
  std::vector<WorkItem> items;
  if (spec.manifest) {
    const auto manifest = load_manifest(*spec.manifest);
    for (const auto& e : manifest.entries)
      items.push_back({e.sample_id, e.path, e.format_id.empty() ? spec.format : e.format_id,
                       parse_stream(e.stream)});
  }
  for (const auto& path : spec.inputs)
    items.push_back({sample_id_from_path(path), path, spec.format, spec.stream});
  return items;
}

BatchReport run_encode(const JobSpec& spec, FormatRegistry& registry, std::ostream* log_stream) {
  if (spec.jobs == 0) throw ValueError("--jobs must be at least 1");
  const auto items = collect_work(spec);
  const auto formats = resolve_formats(items, registry);

  std::optional<Normalization> norm;
  if (spec.normalize_stats) norm = to_normalization(parse_stats(read_text(*spec.normalize_stats)));

  std::error_code ec;
  fs::create_directories(spec.output_dir, ec);
  if (ec) throw Error("cannot create output directory " + spec.output_dir);

  Logger log(log_stream);
  BatchReport report;
  report.files.resize(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    report.files[i].sample_id = items[i].sample_id;
    report.files[i].path = items[i].path;
    report.files[i].skipped = true;
    report.files[i].error = "not processed (batch stopped early)";
  }

  std::atomic<bool> stop{false};
  parallel_for(
      items.size(), spec.jobs,
      [&](std::size_t i) {
        const auto& item = items[i];
        auto& rep = report.files[i];
        rep.skipped = false;
        rep.error.clear();
        try {
          const auto& format = *formats.at(item.format);
          auto seq = load_sequence(item.path, format, spec.preprocess);
          seq.set_sample_id(item.sample_id);
          const auto img = encode_sample(seq, format, item.stream, spec.size, norm);
          const auto exported = export_image(img, spec.mode);
          const auto payload =
              (fs::path(spec.output_dir) / (item.sample_id + payload_extension(spec.mode))).string();
          const auto sidecar = sidecar_path_for(spec.output_dir, item.sample_id);
          write_atomic(payload, exported.payload.data(), exported.payload.size());
          write_atomic(sidecar, exported.sidecar);
          rep.outputs = {payload, sidecar};
          rep.ok = true;
          log("ok    {} -> {}", item.path, payload);
        } catch (const std::exception& e) {
          rep.ok = false;
          rep.error = e.what();
          log("FAIL  {}: {}", item.path, e.what());
          if (spec.fail_fast) stop = true;
        }
      },
      &stop);
  return report;
}

namespace {

bool is_payload(const std::string& path) { return ends_with(path, ".f32") || ends_with(path, ".png"); }

// An encoded payload with its sibling sidecar; f32raw may stand alone.
S2IImage load_payload(const std::string& path) {
  const auto side = sidecar_path_for(fs::path(path).parent_path().string(), sample_id_from_path(path));
  if (fs::exists(side)) return import_image(read_bytes(path), read_text(side));
  if (ends_with(path, ".png")) throw ValueError("png8 payload " + path + " needs its sidecar " + side);
  return from_f32raw(read_bytes(path));
}

}  // namespace

ChannelStats run_stats(const JobSpec& spec, FormatRegistry& registry, BatchReport* report,
                       std::ostream* log_stream) {
  const auto items = collect_work(spec);
  std::vector<WorkItem> encodable;
  for (const auto& item : items)
    if (!is_payload(item.path)) encodable.push_back(item);
  const auto formats = resolve_formats(encodable, registry);

  Logger log(log_stream);
  std::vector<ChannelStats> shards(items.size());
  std::vector<FileReport> files(items.size());
  std::atomic<bool> stop{false};
  parallel_for(
      items.size(), std::max<std::size_t>(1, spec.jobs),
      [&](std::size_t i) {
        const auto& item = items[i];
        files[i].sample_id = item.sample_id;
        files[i].path = item.path;
        try {
          S2IImage img;
          if (is_payload(item.path)) {
            img = load_payload(item.path);
          } else {
            const auto& format = *formats.at(item.format);
            auto seq = load_sequence(item.path, format, spec.preprocess);
            img = encode_sample(seq, format, item.stream, spec.size);
          }
          shards[i].accumulate(img);
          shards[i].add_source(item.sample_id);
          files[i].ok = true;
        } catch (const std::exception& e) {
          files[i].error = e.what();
          log("FAIL  {}: {}", item.path, e.what());
          if (spec.fail_fast) stop = true;
        }
      },
      &stop);

  // Merge in input order so the result does not depend on scheduling.
  ChannelStats total;
  for (const auto& s : shards) total.merge(s);
  if (report) report->files = std::move(files);
  return total;
}

SkeletonSequence run_decode(const std::string& payload_path, const std::string& sidecar_path,
                            std::optional<std::size_t> frames, std::optional<std::size_t> joints) {
  auto img = import_image(read_bytes(payload_path), read_text(sidecar_path));
  const auto problems = validate_image(img);
  if (!problems.empty()) throw ValueError("invalid image metadata: " + problems.front());
  img = denormalize(img);
  return decode(img, frames.value_or(img.meta.original_frames), joints.value_or(img.meta.original_joints));
}

namespace {

void inspect_sidecar(const std::string& path, FormatRegistry& registry, InspectReport& r) {
  r.kind = "sidecar";
  const auto side = read_sidecar(read_text(path));
  const auto& m = side.meta;
  r.info.push_back(fmt::format("sample_id={} format_id={} stream={} encoding={}", m.sample_id, m.format_id,
                               m.stream, export_mode_name(side.mode)));
  r.info.push_back(fmt::format("image={}x{} original_T={} original_J={}", side.height, side.width,
                               m.original_frames, m.original_joints));
  S2IImage probe;
  const std::string dir = fs::path(path).parent_path().string();
  const std::string payload =
      (fs::path(dir) / (sample_id_from_path(path) + payload_extension(side.mode))).string();
  if (fs::exists(payload)) {
    probe = import_image(read_bytes(payload), read_text(path));
    r.info.push_back("payload " + payload + " matches header");
  } else {
    probe = S2IImage(side.height, side.width);
    probe.meta = m;
  }
  for (auto& v : validate_image(probe)) r.violations.push_back(std::move(v));
  if (const auto* f = registry.find(m.format_id); f && f->joint_count() != m.original_joints)
    r.violations.push_back(fmt::format("format '{}' has {} joints but original_J is {}", m.format_id,
                                       f->joint_count(), m.original_joints));
}

}  // namespace

InspectReport run_inspect(const std::string& path, FormatRegistry& registry, const std::string& format_hint) {
  InspectReport r;
  try {
    if (ends_with(path, ".meta.json")) {
      inspect_sidecar(path, registry, r);
    } else if (is_payload(path)) {
      const bool png = ends_with(path, ".png");
      const auto side = sidecar_path_for(fs::path(path).parent_path().string(), sample_id_from_path(path));
      if (fs::exists(side)) {
        inspect_sidecar(side, registry, r);
      } else {
        const auto img = png ? from_png8(read_bytes(path), {}) : from_f32raw(read_bytes(path));
        r.info.push_back(fmt::format("image={}x{}", img.height(), img.width()));
        if (png) r.violations.push_back("no sidecar " + side + "; png8 values cannot be dequantized");
      }
      r.kind = png ? "png8" : "f32raw";
    } else if (ends_with(path, ".skeleton")) {
      r.kind = "ntu-skeleton";
      const auto frames = parse_ntu_skeleton_file(path);
      std::size_t max_bodies = 0, empty = 0;
      for (const auto& f : frames) {
        max_bodies = std::max(max_bodies, f.size());
        empty += f.empty();
      }
      r.info.push_back(fmt::format("frames={} max_bodies={} empty_frames={}", frames.size(), max_bodies, empty));
      const auto& format = registry.resolve(format_hint);
      for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() > 2)
          r.violations.push_back(fmt::format("frame {} has {} bodies", i, frames[i].size()));
        for (const auto& b : frames[i])
          if (b.joints.size() != format.joint_count())
            r.violations.push_back(fmt::format("frame {} body {} has {} joints, format '{}' has {}", i,
                                               b.body_id, b.joints.size(), format.id(), format.joint_count()));
      }
    } else if (ends_with(path, ".jsonl")) {
      r.kind = "manifest";
      const auto m = load_manifest(path);
      r.info.push_back(fmt::format("manifest_id={} entries={}", m.manifest_id, m.entries.size()));
      for (const auto& e : m.entries)
        if (!fs::exists(e.path)) r.violations.push_back("missing file " + e.path);
    } else {
      const std::string text = read_text(path);
      const auto doc = nlohmann::json::parse(text);
      if (doc.contains("strategy") && doc.contains("bits")) {
        r.kind = "mask";
        const auto mask = parse_mask(text);
        r.info.push_back(fmt::format("strategy={} ratio={} seed={} grid={}x{} masked={}", strategy_name(mask.strategy),
                                     mask.ratio, mask.seed, mask.grid.grid_h, mask.grid.grid_w, mask.count()));
        r.violations = check_mask(mask);
      } else if (doc.contains("parts")) {
        r.kind = "format";
        const auto f = load_format(text);
        r.info.push_back(fmt::format("format_id={} joints={}", f.id(), f.joint_count()));
      } else if (doc.contains("frames")) {
        r.kind = "sequence";
        const std::string fid = doc.value("format_id", format_hint);
        const auto seq = parse_generic_json(text, registry.resolve(fid));
        r.info.push_back(fmt::format("sample_id={} format_id={} T={} J={}", seq.sample_id(), seq.format_id(),
                                     seq.frames(), seq.joints()));
      } else if (doc.contains("std") && doc.contains("count")) {
        r.kind = "stats";
        const auto s = parse_stats(text);
        const auto sd = s.stddev();
        r.info.push_back(fmt::format("count={} mean=[{}, {}, {}] std=[{}, {}, {}]", s.count(), s.mean()[0],
                                     s.mean()[1], s.mean()[2], sd[0], sd[1], sd[2]));
      } else {
        r.kind = "unknown";
        r.violations.push_back("unrecognized document");
      }
    }
  } catch (const std::exception& e) {
    if (r.kind.empty()) r.kind = "unreadable";
    r.violations.push_back(e.what());
  }
  return r;
}

}  // namespace s2i
