#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "s2i/encoder.hpp"
#include "s2i/format_registry.hpp"
#include "s2i/image_io.hpp"
#include "s2i/masking.hpp"
#include "s2i/stats.hpp"
#include "s2i/streams.hpp"

namespace s2i {

struct PreprocessOptions {
  bool keep_zero_frames = false;
  bool translate = true;
};

// Batch job shared by the encode and stats commands.
struct JobSpec {
  std::vector<std::string> inputs;
  std::optional<std::string> manifest;
  std::string format = "ntu25";  // registered id or format document path
  Stream stream = Stream::Joint;
  ImageSize size{};
  std::optional<std::string> normalize_stats;
  std::string output_dir = ".";
  ExportMode mode = ExportMode::F32Raw;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
  bool fail_fast = false;
  PreprocessOptions preprocess{};
};

struct WorkItem {
  std::string sample_id;
  std::string path;
  std::string format;
  Stream stream = Stream::Joint;
};

struct FileReport {
  std::string sample_id;
  std::string path;
  bool ok = false;
  bool skipped = false;
  std::string error;
  std::vector<std::string> outputs;
};

struct BatchReport {
  std::vector<FileReport> files;

  std::size_t failures() const;
  std::size_t succeeded() const;
  // 0 all succeeded, 1 at least one file failed or was skipped.
  int exit_code() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitUsage = 2;

// Reads a `.skeleton` (NTU) or `.json` (generic) file and runs body
// splitting, zero-frame removal and first-frame translation.
SkeletonSequence load_sequence(const std::string& path, const SkeletonFormat& format,
                               const PreprocessOptions& options = {});

SkeletonSequence preprocess(SkeletonSequence seq, const SkeletonFormat& format,
                            const PreprocessOptions& options);

// Stream derivation, encoding and optional normalization of one sequence.
S2IImage encode_sample(const SkeletonSequence& seq, const SkeletonFormat& format, Stream stream,
                       ImageSize size, const std::optional<Normalization>& norm = std::nullopt);

std::vector<WorkItem> collect_work(const JobSpec& spec);

BatchReport run_encode(const JobSpec& spec, FormatRegistry& registry, std::ostream* log = nullptr);

ChannelStats run_stats(const JobSpec& spec, FormatRegistry& registry, BatchReport* report = nullptr,
                       std::ostream* log = nullptr);

// f32raw/png8 payload + sidecar -> sequence at the original T x J, with any
// recorded normalization undone.
SkeletonSequence run_decode(const std::string& payload_path, const std::string& sidecar_path,
                            std::optional<std::size_t> frames = std::nullopt,
                            std::optional<std::size_t> joints = std::nullopt);

struct InspectReport {
  std::string kind;
  std::vector<std::string> info;
  std::vector<std::string> violations;
};

InspectReport run_inspect(const std::string& path, FormatRegistry& registry,
                          const std::string& format_hint = "ntu25");

std::vector<std::uint8_t> read_bytes(const std::string& path);
std::string read_text(const std::string& path);
// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::string& path, const void* data, std::size_t size);
void write_atomic(const std::string& path, const std::string& text);

std::string payload_extension(ExportMode mode);
std::string sidecar_path_for(const std::string& output_dir, const std::string& sample_id);

}  // namespace s2i
