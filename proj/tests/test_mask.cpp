#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "core/archspec.hpp"
#include "core/mask.hpp"

using namespace snntopo;

namespace {

ArchitectureSpec tiny_arch() {
  // 1x1x2 input, conv 2->2 k1, linear 2->2: two layers of 4 weights each
  ArchitectureSpec s;
  s.name = "tiny";
  s.input = Shape{1, 1, 2};
  LayerSpec c;
  c.kind = LayerKind::Conv;
  c.c_in = 2;
  c.c_out = 2;
  c.kh = c.kw = 1;
  s.layers.push_back(c);
  LayerSpec fc;
  fc.kind = LayerKind::Linear;
  fc.n_in = 2;
  fc.n_out = 2;
  s.layers.push_back(fc);
  validate_architecture(s);
  return s;
}

}  // namespace

TEST_CASE("uniform keeps exactly round((1-s)*size) per layer") {
  auto spec = builtin_architecture("conv6", 32, 32, 10);
  for (double s : {0.6, 0.9, 0.98}) {
    auto mask = generate_uniform(spec, s, 7);
    validate_mask(mask, spec);
    REQUIRE(mask.layers.size() == spec.weighted.size());
    for (const auto& l : mask.layers) {
      u64 expect = static_cast<u64>(std::llround((1.0 - s) * static_cast<double>(l.size())));
      CHECK(l.nnz() == expect);
    }
  }
}

TEST_CASE("same seed reproduces the same mask, different seed does not") {
  auto spec = builtin_architecture("conv6", 16, 16, 10);
  auto a = generate_erk(spec, 0.9, 42);
  auto b = generate_erk(spec, 0.9, 42);
  auto c = generate_erk(spec, 0.9, 43);
  REQUIRE(a.layers.size() == b.layers.size());
  bool identical = true, differs = false;
  for (size_t i = 0; i < a.layers.size(); ++i) {
    identical = identical && a.layers[i].indices == b.layers[i].indices;
    differs = differs || a.layers[i].indices != c.layers[i].indices;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("er and erk hit the global budget exactly") {
  auto spec = builtin_architecture("conv6", 32, 32, 10);
  u64 total = 0;
  for (u32 li : spec.weighted) total += layer_param_count(spec.layers[li]);
  for (double s : {0.6, 0.8, 0.9, 0.95, 0.98}) {
    for (u64 seed : {1ull, 9ull}) {
      for (auto method : {"er", "erk"}) {
        auto mask = generate_mask(spec, method, s, seed);
        validate_mask(mask, spec);
        u64 expect = static_cast<u64>(std::llround((1.0 - s) * static_cast<double>(total)));
        CHECK(mask.total_nnz() == expect);
        for (const auto& l : mask.layers) CHECK(l.nnz() <= l.size());
      }
    }
  }
}

TEST_CASE("erk saturates small early layers before large ones") {
  auto spec = builtin_architecture("conv6", 32, 32, 10);
  auto mask = generate_erk(spec, 0.9, 3);
  // first conv (73 scale units over 1728 weights) caps at density 1
  CHECK(mask.layers[0].density() == 1.0);
  // the big mid convs stay sparse, and smaller layers stay denser
  CHECK(mask.layers[5].density() < 0.2);
  CHECK(mask.layers[1].density() > mask.layers[5].density());
}

TEST_CASE("frozen layers stay dense and the budget still lands") {
  auto spec = builtin_architecture("conv6", 16, 16, 10);
  MaskGenOptions opt;
  opt.frozen_layers = {0};
  u64 total = 0;
  for (u32 li : spec.weighted) total += layer_param_count(spec.layers[li]);
  auto mask = generate_er(spec, 0.8, 5, opt);
  CHECK(mask.layers[0].density() == 1.0);
  CHECK(mask.total_nnz() ==
        static_cast<u64>(std::llround(0.2 * static_cast<double>(total))));
}

TEST_CASE("empty layers are permitted but reported") {
  auto spec = tiny_arch();
  auto mask = generate_uniform(spec, 0.9, 1);
  CHECK(mask.total_nnz() == 0);
  auto report = density_report(mask, spec);
  CHECK(report.find("zero surviving weights") != std::string::npos);
}

TEST_CASE("sparsity outside [0,1) is rejected") {
  auto spec = tiny_arch();
  CHECK_THROWS_AS(generate_uniform(spec, 1.0, 1), Error);
  CHECK_THROWS_AS(generate_erk(spec, 1.5, 1), Error);
  CHECK_THROWS_AS(generate_er(spec, -0.1, 1), Error);
}

TEST_CASE("attached weights are finite, nonzero, and fan-in scaled") {
  auto spec = builtin_architecture("conv6", 32, 32, 10);
  auto mask = generate_uniform(spec, 0.2, 11);
  attach_weights(mask, spec, WeightInit::GaussianFanIn, 13);
  CHECK(mask.has_weights());
  CHECK_THROWS_AS(attach_weights(mask, spec, WeightInit::GaussianFanIn, 13), Error);

  const auto& l = mask.layers[1];  // conv 64->64 3x3, fan_in 576
  double mean = 0, var = 0;
  for (double w : l.weights) mean += w;
  mean /= static_cast<double>(l.weights.size());
  for (double w : l.weights) var += (w - mean) * (w - mean);
  var /= static_cast<double>(l.weights.size());
  double expect_std = std::sqrt(2.0 / 576.0);
  CHECK(std::abs(std::sqrt(var) - expect_std) / expect_std < 0.1);

  auto unit = generate_uniform(spec, 0.9, 11);
  attach_weights(unit, spec, WeightInit::UnitMagnitude, 1);
  for (const auto& ml : unit.layers) {
    for (double w : ml.weights) CHECK(w == 1.0);
  }
}

TEST_CASE("mask container round trips exactly") {
  auto spec = builtin_architecture("resnet20", 16, 16, 10);
  auto mask = generate_erk(spec, 0.9, 21);
  attach_weights(mask, spec, WeightInit::GaussianFanIn, 22);
  std::string path = "roundtrip.snnmask";
  save_mask(mask, path);
  auto back = load_mask(path);
  CHECK(back.arch_name == mask.arch_name);
  CHECK(back.method == mask.method);
  CHECK(back.sparsity == mask.sparsity);
  CHECK(back.seed == mask.seed);
  REQUIRE(back.layers.size() == mask.layers.size());
  for (size_t i = 0; i < mask.layers.size(); ++i) {
    CHECK(back.layers[i].layer_index == mask.layers[i].layer_index);
    CHECK(back.layers[i].dims == mask.layers[i].dims);
    CHECK(back.layers[i].indices == mask.layers[i].indices);
    CHECK(back.layers[i].weights == mask.layers[i].weights);
  }
  validate_mask(back, spec);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("mask validation catches structural violations") {
  auto spec = tiny_arch();
  auto mask = generate_uniform(spec, 0.0, 1);
  SUBCASE("unsorted indices") {
    std::swap(mask.layers[0].indices[0], mask.layers[0].indices[1]);
    CHECK_THROWS_AS(validate_mask(mask, spec), Error);
  }
  SUBCASE("index out of range") {
    mask.layers[0].indices.back() = 99;
    CHECK_THROWS_AS(validate_mask(mask, spec), Error);
  }
  SUBCASE("layer count mismatch") {
    mask.layers.pop_back();
    CHECK_THROWS_AS(validate_mask(mask, spec), Error);
  }
  SUBCASE("zero weight") {
    mask.layers[0].weights.assign(mask.layers[0].indices.size(), 0.0);
    CHECK_THROWS_AS(validate_mask(mask, spec), Error);
  }
}
