#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "s2i/error.hpp"
#include "s2i/format_registry.hpp"
#include "s2i/objectives.hpp"
#include "s2i/pipeline.hpp"

namespace py = pybind11;
using namespace s2i;

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;

FormatRegistry& registry() {
  static FormatRegistry r;
  return r;
}

SkeletonSequence to_sequence(const F64Array& a, const std::string& format_id) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ValueError("expected a (T, J, 3) array");
  SkeletonSequence seq(format_id, a.shape(0), a.shape(1));
  auto in = a.unchecked<3>();
  for (py::ssize_t t = 0; t < a.shape(0); ++t)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) seq.at(t, j) = {in(t, j, 0), in(t, j, 1), in(t, j, 2)};
  return seq;
}

F64Array from_sequence(const SkeletonSequence& seq) {
  F64Array out({seq.frames(), seq.joints(), std::size_t{3}});
  auto o = out.mutable_unchecked<3>();
  for (std::size_t t = 0; t < seq.frames(); ++t)
    for (std::size_t j = 0; j < seq.joints(); ++j)
      for (std::size_t c = 0; c < 3; ++c) o(t, j, c) = seq.at(t, j)[c];
  return out;
}

S2IImage to_image(const F32Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw ValueError("expected an (H, W, 3) array");
  S2IImage img(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), img.pixels().begin());
  return img;
}

F32Array from_image(const S2IImage& img) {
  F32Array out({img.height(), img.width(), std::size_t{3}});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

PatchTensor to_patches(const F64Array& a) {
  if (a.ndim() != 2) throw ValueError("expected an (n_patches, patch_dim) array");
  PatchTensor p(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), p.values.begin());
  return p;
}

F64Array from_patches(const PatchTensor& p) {
  F64Array out({p.n_patches, p.patch_dim});
  std::copy(p.values.begin(), p.values.end(), out.mutable_data());
  return out;
}

PatchMask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a, std::size_t patch) {
  if (a.ndim() != 2) throw ValueError("expected a (grid_h, grid_w) boolean mask");
  PatchMask m;
  m.grid = {patch, static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1))};
  m.masked.assign(a.data(), a.data() + a.size());
  return m;
}

Normalization to_norm(const std::array<double, 3>& mean, const std::array<double, 3>& std) { return {mean, std}; }

}  // namespace

PYBIND11_MODULE(_s2i, m) {
  m.doc() = "Skeleton-to-image encoding core";

  auto base = py::register_exception<Error>(m, "S2IError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValueError>(m, "S2IValueError", base.ptr());

  m.def("formats", [] { return registry().ids(); }, "Registered format ids.");

  m.def(
      "joint_order", [](const std::string& format) { return s2i_joint_order(registry().resolve(format)); },
      py::arg("format"), "Joint ids in image column order.");

  m.def(
      "part_sizes",
      [](const std::string& format) {
        std::vector<std::size_t> sizes;
        for (const auto& p : registry().resolve(format).parts()) sizes.push_back(p.joint_ids.size());
        return sizes;
      },
      py::arg("format"));

  m.def(
      "load_sequence",
      [](const std::string& path, const std::string& format, bool keep_zero_frames, bool translate) {
        return from_sequence(load_sequence(path, registry().resolve(format), {keep_zero_frames, translate}));
      },
      py::arg("path"), py::arg("format") = "ntu25", py::arg("keep_zero_frames") = false, py::arg("translate") = true,
      "Parse and preprocess a .skeleton or generic .json file into a (T, J, 3) array.");

  m.def(
      "encode",
      [](const F64Array& seq, const std::string& format, std::pair<std::size_t, std::size_t> size,
         const std::string& stream) {
        const auto& f = registry().resolve(format);
        return from_image(encode_sample(to_sequence(seq, f.id()), f, parse_stream(stream), {size.first, size.second}));
      },
      py::arg("sequence"), py::arg("format") = "ntu25", py::arg("size") = std::pair<std::size_t, std::size_t>{224, 224},
      py::arg("stream") = "joint", "Encode a (T, J, 3) sequence into an (H, W, 3) float32 image.");

  m.def(
      "decode",
      [](const F32Array& image, std::size_t frames, const std::string& format) {
        auto img = to_image(image);
        const auto order = s2i_joint_order(registry().resolve(format));
        img.meta.joint_order = order;
        return from_sequence(decode(img, frames, order.size()));
      },
      py::arg("image"), py::arg("frames"), py::arg("format") = "ntu25",
      "Resize an image back to (frames, J, 3) in original joint order.");

  m.def(
      "make_mask",
      [](const std::string& strategy, double ratio, std::uint64_t seed, std::pair<std::size_t, std::size_t> grid,
         std::size_t patch) {
        const auto mask = make_mask(parse_strategy(strategy), {patch, grid.first, grid.second}, ratio, seed);
        py::array_t<bool> out({grid.first, grid.second});
        std::copy(mask.masked.begin(), mask.masked.end(), out.mutable_data());
        return out;
      },
      py::arg("strategy") = "random", py::arg("ratio") = 0.75, py::arg("seed") = 0,
      py::arg("grid") = std::pair<std::size_t, std::size_t>{14, 14}, py::arg("patch") = 16);

  m.def(
      "patchify",
      [](const F32Array& image, std::size_t patch) {
        const auto img = to_image(image);
        return from_patches(patchify(img, PatchGrid::for_image(img.height(), img.width(), patch)));
      },
      py::arg("image"), py::arg("patch") = 16);

  m.def(
      "unpatchify",
      [](const F64Array& patches, std::pair<std::size_t, std::size_t> grid, std::size_t patch) {
        return from_image(unpatchify(to_patches(patches), {patch, grid.first, grid.second}));
      },
      py::arg("patches"), py::arg("grid") = std::pair<std::size_t, std::size_t>{14, 14}, py::arg("patch") = 16);

  m.def(
      "mae_loss",
      [](const F64Array& pred, const F64Array& target, const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask,
         bool normalized, std::size_t patch) {
        const auto p = to_patches(pred), t = to_patches(target);
        const auto mk = to_mask(mask, patch);
        return normalized ? mae_loss_normalized(p, t, mk) : mae_loss(p, t, mk);
      },
      py::arg("pred"), py::arg("target"), py::arg("mask"), py::arg("normalized") = false, py::arg("patch") = 16);

  m.def(
      "diffmae_loss",
      [](const F64Array& pred, const F64Array& target, const py::array_t<bool, py::array::c_style | py::array::forcecast>& mask,
         std::size_t patch) { return diffmae_loss(to_patches(pred), to_patches(target), to_mask(mask, patch)); },
      py::arg("pred_x0"), py::arg("true_x0"), py::arg("mask"), py::arg("patch") = 16);

  m.def(
      "schedule",
      [](std::size_t steps, double rho) {
        const auto s = build_schedule(steps, rho);
        py::dict d;
        d["beta"] = py::array_t<double>(s.beta_values.size(), s.beta_values.data());
        d["alpha"] = py::array_t<double>(s.alpha_values.size(), s.alpha_values.data());
        d["alpha_bar"] = py::array_t<double>(s.alpha_bar_values.size(), s.alpha_bar_values.data());
        return d;
      },
      py::arg("steps") = 1000, py::arg("rho") = 1.0, "Arrays indexed from 0 for timestep 1.");

  m.def(
      "forward_diffuse",
      [](const F64Array& x0, std::size_t t, const F64Array& eps, std::size_t steps, double rho) {
        return from_patches(forward_diffuse(to_patches(x0), t, to_patches(eps), build_schedule(steps, rho)));
      },
      py::arg("x0"), py::arg("t"), py::arg("eps"), py::arg("steps") = 1000, py::arg("rho") = 1.0);

  m.def(
      "cross_entropy",
      [](const F64Array& probs, std::size_t label) {
        return cross_entropy(std::span<const double>(probs.data(), probs.size()), label);
      },
      py::arg("probs"), py::arg("label"));

  m.def(
      "channel_stats",
      [](const std::vector<F32Array>& images) {
        ChannelStats s;
        for (const auto& a : images) s.accumulate(to_image(a));
        py::dict d;
        d["count"] = s.count();
        d["mean"] = s.mean();
        d["std"] = s.stddev();
        return d;
      },
      py::arg("images"), "Per-channel mean and population std over all pixels.");

  m.def(
      "normalize",
      [](const F32Array& image, std::array<double, 3> mean, std::array<double, 3> std) {
        return from_image(normalize(to_image(image), to_norm(mean, std)));
      },
      py::arg("image"), py::arg("mean"), py::arg("std"));

  m.def(
      "denormalize",
      [](const F32Array& image, std::array<double, 3> mean, std::array<double, 3> std) {
        auto img = to_image(image);
        img.meta.normalization = to_norm(mean, std);
        return from_image(denormalize(img));
      },
      py::arg("image"), py::arg("mean"), py::arg("std"));
}
