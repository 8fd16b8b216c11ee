// s2i: skeleton-to-image batch tool.
//
//   s2i encode   <inputs...> [--manifest m.jsonl] --out DIR
//   s2i mask     --strategy random|block|joint|temporal --ratio 0.75 --seed 0
//   s2i stats    --manifest m.jsonl --out stats.json
//   s2i decode   <payload> [--sidecar f.meta.json] --out seq.json
//   s2i inspect  <file>
//   s2i schedule --t 1000 --rho 1.0
//
// Exit codes: 0 success, 1 partial batch failure or failed inspection,
// 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "s2i/error.hpp"
#include "s2i/ingest.hpp"
#include "s2i/masking.hpp"
#include "s2i/objectives.hpp"
#include "s2i/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

s2i::ImageSize parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      const auto n = std::stoul(text);
      return {n, n};
    }
    return {std::stoul(text.substr(0, x)), std::stoul(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw s2i::ValueError("--size must be N or HxW, got '" + text + "'");
  }
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    s2i::write_atomic(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton-to-image encoding toolkit"};
  app.require_subcommand(1);

  std::string format = "ntu25";
  std::string stream = "joint";
  std::string size = "224";
  std::string normalize_path;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool fail_fast = false, keep_zero = false, no_translate = false;

  app.add_option("--format", format, "Skeleton format id (ntu25, ucla20, toyota13) or format document");
  app.add_option("--stream", stream, "Derived stream: joint, bone or motion")
      ->check(CLI::IsMember({"joint", "bone", "motion"}));
  app.add_option("--size", size, "Target image size, N or HxW");
  app.add_option("--normalize", normalize_path, "Stats file used to normalize encoded images");
  app.add_option("--seed", seed, "Seed for every random choice");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--fail-fast", fail_fast, "Stop the batch at the first failing file");
  app.add_flag("--keep-zero-frames", keep_zero, "Keep frames whose coordinates are all zero");
  app.add_flag("--no-translate", no_translate, "Skip first-frame translation");

  auto* encode = app.add_subcommand("encode", "Encode skeleton files into S2I images");
  encode->fallthrough();
  std::vector<std::string> inputs;
  std::string manifest, out_dir = ".", mode = "f32raw";
  encode->add_option("inputs", inputs, "Input .skeleton or generic .json files");
  encode->add_option("--manifest", manifest, "Line-delimited manifest of inputs");
  encode->add_option("--out", out_dir, "Output directory");
  encode->add_option("--mode", mode, "Export mode")->check(CLI::IsMember({"f32raw", "png8"}));

  auto* mask = app.add_subcommand("mask", "Generate a patch mask file");
  mask->fallthrough();
  std::string strategy = "random", grid = "14x14", mask_out;
  double ratio = 0.75;
  std::size_t patch = 16;
  mask->add_option("--strategy", strategy, "random, block (group), joint or temporal");
  mask->add_option("--ratio", ratio, "Mask ratio in [0, 1]")->check(CLI::Range(0.0, 1.0));
  mask->add_option("--grid", grid, "Patch grid HxW");
  mask->add_option("--patch", patch, "Patch size in pixels");
  mask->add_option("--out", mask_out, "Output file (stdout if omitted)");

  auto* stats = app.add_subcommand("stats", "Per-channel normalization statistics over a corpus");
  stats->fallthrough();
  std::string stats_manifest, stats_out;
  std::vector<std::string> stats_inputs;
  stats->add_option("inputs", stats_inputs, "Input files");
  stats->add_option("--manifest", stats_manifest, "Line-delimited manifest");
  stats->add_option("--out", stats_out, "Output stats file (stdout if omitted)");

  auto* decode = app.add_subcommand("decode", "Reconstruct a generic-JSON sequence from an image");
  decode->fallthrough();
  std::string payload, sidecar, decode_out;
  std::optional<std::size_t> frames, joints;
  decode->add_option("payload", payload, "f32raw or png8 payload")->required();
  decode->add_option("--sidecar", sidecar, "Sidecar document (default: <sample>.meta.json)");
  decode->add_option("--out", decode_out, "Output sequence file (stdout if omitted)");
  decode->add_option("--frames", frames, "Target frame count (default: original)");
  decode->add_option("--joints", joints, "Target joint count (default: original)");

  auto* inspect = app.add_subcommand("inspect", "Print headers and validate a file");
  inspect->fallthrough();
  std::string inspect_path;
  inspect->add_option("path", inspect_path, "File to inspect")->required();

  auto* schedule = app.add_subcommand("schedule", "Dump the diffusion variance schedule");
  schedule->fallthrough();
  std::size_t steps = 1000;
  double rho = 1.0;
  std::string schedule_out;
  schedule->add_option("--t", steps, "Number of diffusion steps")->check(CLI::PositiveNumber);
  schedule->add_option("--rho", rho, "Exponent applied to each beta");
  schedule->add_option("--out", schedule_out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? s2i::kExitOk : s2i::kExitUsage;
  }

  s2i::FormatRegistry registry;
  try {
    s2i::JobSpec spec;
    spec.format = format;
    spec.stream = s2i::parse_stream(stream);
    spec.size = parse_size(size);
    if (!normalize_path.empty()) spec.normalize_stats = normalize_path;
    spec.jobs = jobs;
    spec.seed = seed;
    spec.fail_fast = fail_fast;
    spec.preprocess = {keep_zero, !no_translate};

    if (*encode) {
      if (inputs.empty() && manifest.empty()) throw s2i::ValueError("encode needs input files or --manifest");
      spec.inputs = inputs;
      if (!manifest.empty()) spec.manifest = manifest;
      spec.output_dir = out_dir;
      spec.mode = s2i::parse_export_mode(mode);
      const auto report = s2i::run_encode(spec, registry, &std::cerr);
      std::cerr << fmt::format("{} encoded, {} failed\n", report.succeeded(), report.failures());
      for (const auto& f : report.files)
        if (!f.ok) std::cerr << fmt::format("  {}: {}\n", f.path, f.error);
      return report.exit_code();
    }
    if (*mask) {
      const auto x = grid.find('x');
      if (x == std::string::npos) throw s2i::ValueError("--grid must be HxW");
      s2i::PatchGrid g{patch, std::stoul(grid.substr(0, x)), std::stoul(grid.substr(x + 1))};
      const auto m = s2i::make_mask(s2i::parse_strategy(strategy), g, ratio, seed);
      emit(mask_out, s2i::serialize_mask(m));
      return s2i::kExitOk;
    }
    if (*stats) {
      if (stats_inputs.empty() && stats_manifest.empty()) throw s2i::ValueError("stats needs inputs or --manifest");
      spec.inputs = stats_inputs;
      if (!stats_manifest.empty()) spec.manifest = stats_manifest;
      s2i::BatchReport report;
      const auto result = s2i::run_stats(spec, registry, &report, &std::cerr);
      emit(stats_out, s2i::stats_json(result));
      return report.exit_code();
    }
    if (*decode) {
      if (sidecar.empty()) {
        const fs::path p(payload);
        sidecar = (p.parent_path() / (p.stem().string() + ".meta.json")).string();
      }
      const auto seq = s2i::run_decode(payload, sidecar, frames, joints);
      emit(decode_out, s2i::serialize_generic_json(seq));
      return s2i::kExitOk;
    }
    if (*inspect) {
      const auto r = s2i::run_inspect(inspect_path, registry, format);
      std::cout << "kind: " << r.kind << '\n';
      for (const auto& line : r.info) std::cout << "  " << line << '\n';
      for (const auto& v : r.violations) std::cout << "  violation: " << v << '\n';
      return r.violations.empty() ? s2i::kExitOk : s2i::kExitPartialFailure;
    }
    if (*schedule) {
      emit(schedule_out, s2i::schedule_json(s2i::build_schedule(steps, rho)));
      return s2i::kExitOk;
    }
  } catch (const s2i::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return s2i::kExitUsage;
  } catch (const s2i::ValueError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return s2i::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return s2i::kExitPartialFailure;
  }
  return s2i::kExitUsage;
}
