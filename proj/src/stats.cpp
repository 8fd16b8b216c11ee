#include "s2i/stats.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "s2i/error.hpp"

namespace s2i {

std::array<double, 3> ChannelStats::stddev() const {
  std::array<double, 3> out{};
  if (count_ == 0) return out;
  for (std::size_t c = 0; c < 3; ++c) out[c] = std::sqrt(m2_[c] / static_cast<double>(count_));
  return out;
}

void ChannelStats::accumulate(const S2IImage& img) {
  const auto& px = img.pixels();
  const std::uint64_t n = px.size() / 3;
  if (n == 0) return;
  // Two-pass moments for the image, then a pairwise merge.
  ChannelStats batch;
  batch.count_ = n;
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (std::size_t i = c; i < px.size(); i += 3) sum += px[i];
    const double mean = sum / static_cast<double>(n);
    double m2 = 0.0, comp = 0.0;
    for (std::size_t i = c; i < px.size(); i += 3) {
      const double d = px[i] - mean;
      m2 += d * d;
      comp += d;
    }
    batch.mean_[c] = mean + comp / static_cast<double>(n);
    batch.m2_[c] = std::max(0.0, m2 - comp * comp / static_cast<double>(n));
  }
  merge(batch);
}

void ChannelStats::merge(const ChannelStats& other) {
  source_ids_.insert(source_ids_.end(), other.source_ids_.begin(), other.source_ids_.end());
  if (other.count_ == 0) return;
  if (count_ == 0) {
    count_ = other.count_;
    mean_ = other.mean_;
    m2_ = other.m2_;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t c = 0; c < 3; ++c) {
    const double delta = other.mean_[c] - mean_[c];
    mean_[c] = (na * mean_[c] + nb * other.mean_[c]) / n;
    m2_[c] += other.m2_[c] + delta * delta * (na * nb / n);
  }
  count_ += other.count_;
}

ChannelStats ChannelStats::from_moments(std::uint64_t count, std::array<double, 3> mean,
                                        std::array<double, 3> m2, std::vector<std::string> sources) {
  ChannelStats s;
  s.count_ = count;
  s.mean_ = mean;
  s.m2_ = m2;
  s.source_ids_ = std::move(sources);
  return s;
}

ChannelStats accumulate(ChannelStats stats, const S2IImage& img) {
  stats.accumulate(img);
  return stats;
}

ChannelStats merge(ChannelStats a, const ChannelStats& b) {
  a.merge(b);
  return a;
}

Normalization to_normalization(const ChannelStats& stats) {
  if (stats.count() == 0) throw ValueError("cannot normalize with empty statistics");
  Normalization n{stats.mean(), stats.stddev()};
  for (std::size_t c = 0; c < 3; ++c)
    if (!(n.std[c] > 0.0)) throw ValueError(fmt::format("channel {} has zero standard deviation", c));
  return n;
}

S2IImage normalize(const S2IImage& img, const Normalization& norm) {
  for (std::size_t c = 0; c < 3; ++c)
    if (!(norm.std[c] > 0.0)) throw ValueError(fmt::format("channel {} has zero standard deviation", c));
  S2IImage out = img;
  auto& px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::size_t c = i % 3;
    px[i] = static_cast<float>((static_cast<double>(img.pixels()[i]) - norm.mean[c]) / norm.std[c]);
  }
  out.meta.normalization = norm;
  return out;
}

S2IImage normalize(const S2IImage& img, const ChannelStats& stats) {
  return normalize(img, to_normalization(stats));
}

S2IImage denormalize(const S2IImage& img) {
  if (!img.meta.normalization) return img;
  const auto& norm = *img.meta.normalization;
  S2IImage out = img;
  auto& px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::size_t c = i % 3;
    px[i] = static_cast<float>(static_cast<double>(img.pixels()[i]) * norm.std[c] + norm.mean[c]);
  }
  out.meta.normalization.reset();
  return out;
}

std::string stats_json(const ChannelStats& stats) {
  nlohmann::ordered_json doc;
  doc["count"] = stats.count();
  doc["mean"] = stats.mean();
  doc["std"] = stats.stddev();
  doc["source_ids"] = stats.source_ids();
  return doc.dump(2) + "\n";
}

ChannelStats parse_stats(std::string_view document) {
  try {
    const auto doc = nlohmann::json::parse(document);
    const auto count = doc.at("count").get<std::uint64_t>();
    const auto mean = doc.at("mean").get<std::array<double, 3>>();
    const auto sd = doc.at("std").get<std::array<double, 3>>();
    std::array<double, 3> m2{};
    for (std::size_t c = 0; c < 3; ++c) {
      if (!(sd[c] >= 0.0)) throw ValueError("stats 'std' must be non-negative");
      m2[c] = sd[c] * sd[c] * static_cast<double>(count);
    }
    std::vector<std::string> sources;
    if (doc.contains("source_ids")) sources = doc["source_ids"].get<std::vector<std::string>>();
    return ChannelStats::from_moments(count, mean, m2, std::move(sources));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid stats file: ") + e.what());
  }
}

DatasetManifest parse_manifest(std::string_view text, std::string manifest_id, const std::string& base_dir) {
  DatasetManifest m;
  m.manifest_id = std::move(manifest_id);
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    ManifestEntry e;
    try {
      const auto doc = nlohmann::json::parse(line);
      e.sample_id = doc.at("sample_id").get<std::string>();
      e.path = doc.at("path").get<std::string>();
      e.format_id = doc.value("format_id", std::string());
      e.stream = doc.value("stream", std::string("joint"));
      if (doc.contains("label") && !doc["label"].is_null()) e.label = doc["label"].get<std::int64_t>();
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(std::string("invalid manifest record: ") + ex.what(), line_no);
    }
    if (!seen.insert(e.sample_id).second)
      throw ParseError(fmt::format("duplicate sample_id '{}'", e.sample_id), line_no);
    if (!base_dir.empty() && std::filesystem::path(e.path).is_relative())
      e.path = (std::filesystem::path(base_dir) / e.path).string();
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path p(path);
  return parse_manifest(ss.str(), p.stem().string(), p.parent_path().string());
}

}  // namespace s2i
