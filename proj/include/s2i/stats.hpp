#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s2i/encoder.hpp"

namespace s2i {

/// Streaming per-channel pixel statistics (count, mean, sum of squared
/// deviations). Population variance. Shards accumulate independently and
/// combine with `merge`; the empty value is the identity.
class ChannelStats {
 public:
  std::uint64_t count() const noexcept { return count_; }
  const std::array<double, 3>& mean() const noexcept { return mean_; }
  const std::array<double, 3>& m2() const noexcept { return m2_; }
  std::array<double, 3> stddev() const;
  const std::vector<std::string>& source_ids() const noexcept { return source_ids_; }

  void accumulate(const S2IImage& img);
  void merge(const ChannelStats& other);
  void add_source(std::string id) { source_ids_.push_back(std::move(id)); }

  static ChannelStats from_moments(std::uint64_t count, std::array<double, 3> mean,
                                   std::array<double, 3> m2, std::vector<std::string> sources = {});

 private:
  std::uint64_t count_ = 0;
  std::array<double, 3> mean_{};
  std::array<double, 3> m2_{};
  std::vector<std::string> source_ids_;
};

ChannelStats accumulate(ChannelStats stats, const S2IImage& img);
ChannelStats merge(ChannelStats a, const ChannelStats& b);

// (pixel - mean) / std per channel; records the statistics in meta.
S2IImage normalize(const S2IImage& img, const ChannelStats& stats);
S2IImage normalize(const S2IImage& img, const Normalization& norm);
// Inverse of normalize using the statistics recorded in meta (no-op if none).
S2IImage denormalize(const S2IImage& img);

Normalization to_normalization(const ChannelStats& stats);

// {count, mean[3], std[3], source_ids}
std::string stats_json(const ChannelStats& stats);
ChannelStats parse_stats(std::string_view document);

struct ManifestEntry {
  std::string sample_id;
  std::string path;
  std::string format_id;
  std::string stream = "joint";
  std::optional<std::int64_t> label;
};

struct DatasetManifest {
  std::string manifest_id;
  std::vector<ManifestEntry> entries;
};

// One JSON object per line; blank lines and lines starting with '#' are skipped.
// Relative paths resolve against `base_dir` when given.
DatasetManifest parse_manifest(std::string_view text, std::string manifest_id = {},
                               const std::string& base_dir = {});
DatasetManifest load_manifest(const std::string& path);

}  // namespace s2i
