#include <doctest.h>

#include <cmath>
#include <random>

#include "s2i/error.hpp"
#include "s2i/objectives.hpp"
#include "support.hpp"

using namespace s2i;

namespace {

const PatchGrid kGrid{16, 14, 14};

S2IImage random_image(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  S2IImage img(224, 224);
  for (auto& v : img.pixels()) v = static_cast<float>(u(rng));
  return img;
}

PatchMask single_patch_mask(std::size_t index) {
  PatchMask m;
  m.grid = kGrid;
  m.masked.assign(196, false);
  m.masked[index] = true;
  return m;
}

}  // namespace

TEST_SUITE("objectives") {
  TEST_CASE("patchify shape and layout") {
    std::mt19937_64 rng(1);
    const auto img = random_image(rng);
    const auto p = patchify(img, kGrid);
    CHECK(p.n_patches == 196);
    CHECK(p.patch_dim == 768);
    for (std::size_t c = 0; c < 3; ++c) CHECK(p.patch(0)[c] == img.at(0, 0, c));
    // Patch (row 2, col 5), offset (dy 3, dx 7), channel 1.
    CHECK(p.patch(2 * 14 + 5)[(3 * 16 + 7) * 3 + 1] == img.at(2 * 16 + 3, 5 * 16 + 7, 1));
    CHECK(unpatchify(p, kGrid).pixels() == img.pixels());
    CHECK_THROWS_AS(patchify(S2IImage(100, 224), kGrid), ValueError);
  }

  TEST_CASE("mae loss literal and normalized forms") {
    PatchTensor target(196, 768), pred(196, 768);
    const auto mask = single_patch_mask(10);
    CHECK(mae_loss(pred, target, mask) == 0.0);
    for (auto& v : pred.patch(10)) v = 1.0;
    CHECK(mae_loss(pred, target, mask) == doctest::Approx(768.0));
    CHECK(mae_loss_normalized(pred, target, mask) == doctest::Approx(1.0));
    for (auto& v : pred.patch(10)) v = 2.0;
    CHECK(mae_loss(pred, target, mask) == doctest::Approx(4 * 768.0));
  }

  TEST_CASE("mae loss ignores unmasked patches") {
    std::mt19937_64 rng(2);
    const auto target = patchify(random_image(rng), kGrid);
    auto pred = patchify(random_image(rng), kGrid);
    const auto mask = random_mask(kGrid, 0.75, 3);
    const double before = mae_loss(pred, target, mask);
    for (std::size_t i = 0; i < 196; ++i)
      if (!mask.masked[i])
        for (auto& v : pred.patch(i)) v += 100.0;
    CHECK(mae_loss(pred, target, mask) == before);
    CHECK(before > 0.0);
  }

  TEST_CASE("empty mask and shape mismatch are errors") {
    PatchTensor a(196, 768), b(196, 768);
    CHECK_THROWS_AS(mae_loss(a, b, random_mask(kGrid, 0.0, 1)), ValueError);
    CHECK_THROWS_AS(mae_loss(a, PatchTensor(196, 767), random_mask(kGrid, 0.5, 1)), ValueError);
    CHECK_THROWS_AS(diffmae_loss(a, b, random_mask(kGrid, 0.0, 1)), ValueError);
  }

  TEST_CASE("diffmae loss") {
    std::mt19937_64 rng(4);
    const auto x = patchify(random_image(rng), kGrid);
    const auto y = patchify(random_image(rng), kGrid);
    const auto mask = random_mask(kGrid, 0.5, 4);
    CHECK(diffmae_loss(x, x, mask) == 0.0);
    CHECK(diffmae_loss(x, y, mask) == doctest::Approx(mae_loss_normalized(x, y, mask)));
    PatchTensor target(196, 768), pred(196, 768);
    for (auto& v : pred.patch(7)) v = 0.3;
    CHECK(diffmae_loss(pred, target, single_patch_mask(7)) == doctest::Approx(0.09));
  }

  TEST_CASE("schedule endpoints and monotonicity") {
    const auto s = build_schedule(1000, 1.0);
    CHECK(s.beta(1) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(s.beta(1000) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(std::abs(s.alpha_bar(1) - 0.9999) <= 1e-12);
    CHECK(s.alpha_bar(1000) < 0.01);
    long double product = 1.0L;
    for (std::size_t t = 1; t <= 1000; ++t) {
      const long double beta = 1e-4L + (0.02L - 1e-4L) * (t - 1) / 999.0L;
      product *= 1.0L - beta;
      REQUIRE(std::abs(static_cast<double>(product) - s.alpha_bar(t)) <= 1e-12);
      if (t > 1) {
        REQUIRE(s.alpha_bar(t) < s.alpha_bar(t - 1));
        REQUIRE(s.beta(t) > s.beta(t - 1));
      }
      REQUIRE(s.alpha(t) == 1.0 - s.beta(t));
    }
    CHECK_THROWS(s.beta(0));
  }

  TEST_CASE("rho exponentiates each beta") {
    const auto base = build_schedule(100, 1.0);
    const auto s = build_schedule(100, 0.5);
    for (std::size_t t = 1; t <= 100; ++t) CHECK(s.beta(t) == doctest::Approx(std::sqrt(base.beta(t))));
    CHECK_THROWS_AS(build_schedule(0, 1.0), ValueError);
    CHECK_THROWS_AS(build_schedule(10, 0.0), ValueError);
    CHECK(build_schedule(1, 1.0).beta(1) == kBetaStart);
  }

  TEST_CASE("forward diffusion limits") {
    std::mt19937_64 rng(5);
    const auto s = build_schedule();
    const auto x0 = patchify(random_image(rng), kGrid);
    const auto eps = patchify(random_image(rng), kGrid);
    const PatchTensor zeros(196, 768);
    const auto a = forward_diffuse(x0, 250, zeros, s);
    const auto b = forward_diffuse(zeros, 250, eps, s);
    for (std::size_t k = 0; k < x0.values.size(); k += 97) {
      CHECK(a.values[k] == doctest::Approx(std::sqrt(s.alpha_bar(250)) * x0.values[k]));
      CHECK(b.values[k] == doctest::Approx(std::sqrt(1 - s.alpha_bar(250)) * eps.values[k]));
    }
    CHECK_THROWS_AS(forward_diffuse(x0, 0, eps, s), ValueError);
    CHECK_THROWS_AS(forward_diffuse(x0, 1001, eps, s), ValueError);
  }

  TEST_CASE("forward diffusion preserves unit variance") {
    const auto s = build_schedule();
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n01;
    const std::size_t draws = 100000;
    PatchTensor x0(draws, 1), eps(draws, 1);
    for (std::size_t i = 0; i < draws; ++i) {
      x0.values[i] = n01(rng);
      eps.values[i] = n01(rng);
    }
    for (std::size_t t : {1u, 100u, 500u, 1000u}) {
      const auto xt = forward_diffuse(x0, t, eps, s);
      double mean = 0, m2 = 0;
      for (double v : xt.values) mean += v;
      mean /= draws;
      for (double v : xt.values) m2 += (v - mean) * (v - mean);
      const double var = m2 / (draws - 1);
      CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / (draws - 1)));
    }
  }

  TEST_CASE("cross entropy") {
    std::vector<double> onehot(60, 0.0);
    onehot[7] = 1.0;
    CHECK(cross_entropy(onehot, 7) == 0.0);
    std::vector<double> uniform(60, 1.0 / 60.0);
    CHECK(std::abs(cross_entropy(uniform, 13) - std::log(60.0)) <= 1e-9);
    CHECK(cross_entropy(onehot, 8) == doctest::Approx(27.631021115928547));
    CHECK_THROWS_AS(cross_entropy(uniform, 60), ValueError);
    CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.4}, 0), ValueError);
    CHECK_THROWS_AS(cross_entropy(std::vector<double>{1.5, -0.5}, 0), ValueError);
  }

  TEST_CASE("cross entropy is convex in the distribution") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    auto simplex = [&](std::size_t n) {
      std::vector<double> p(n);
      double sum = 0;
      for (auto& v : p) sum += (v = u(rng));
      for (auto& v : p) v /= sum;
      return p;
    };
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = simplex(10), q = simplex(10), r = simplex(10);
      std::vector<double> avg(10);
      for (std::size_t i = 0; i < 10; ++i) avg[i] = (p[i] + q[i] + r[i]) / 3.0;
      const std::size_t label = testing::uniform_index(rng, 0, 9);
      const double lhs = cross_entropy(avg, label);
      const double rhs = (cross_entropy(p, label) + cross_entropy(q, label) + cross_entropy(r, label)) / 3.0;
      REQUIRE(lhs <= rhs + 1e-12);
    }
  }
}
