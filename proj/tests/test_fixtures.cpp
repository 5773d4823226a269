#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "core/archspec.hpp"
#include "core/fixtures.hpp"
#include "core/ranking.hpp"

using namespace snntopo;

namespace {

const AccuracyRecord& find_row(const std::vector<AccuracyRecord>& rows, const std::string& arch,
                               const std::string& dataset, const std::string& algo,
                               double sparsity) {
  for (const auto& r : rows) {
    if (r.architecture == arch && r.dataset == dataset && r.algorithm == algo &&
        r.sparsity == sparsity)
      return r;
  }
  throw std::runtime_error("row not found");
}

}  // namespace

TEST_CASE("bundled accuracy table shape and spot values") {
  auto rows = fixture_accuracy();
  // one blank cell in the source tables
  CHECK(rows.size() == 7u * 4u * 5u * 3u - 1u);

  const auto& grasp = find_row(rows, "conv6", "cifar10", "grasp", 0.9);
  CHECK(grasp.acc == 90.7);
  CHECK(grasp.acc_std == 0.1);
  CHECK(grasp.has_std);
  CHECK(grasp.acc_dense == 93.2);

  const auto& erk_tiny = find_row(rows, "wide-resnet-28-2", "tiny-imagenet", "erk", 0.98);
  CHECK(erk_tiny.acc == 31.6);
  CHECK(erk_tiny.acc_std == 0.5);

  const auto& erk_c100 = find_row(rows, "resnet20", "cifar100", "erk", 0.6);
  CHECK(erk_c100.acc == 65.4);

  CHECK(fixture_dense_accuracy("resnet32", "cifar100") == 68.0);
  CHECK(fixture_dense_accuracy("conv6", "cifar10") == 93.2);
  CHECK_THROWS_AS(fixture_dense_accuracy("conv7", "cifar10"), Error);

  bool has_blank = std::any_of(rows.begin(), rows.end(), [](const AccuracyRecord& r) {
    return r.architecture == "resnet32" && r.dataset == "tiny-imagenet" &&
           r.algorithm == "prospr" && r.sparsity == 0.98;
  });
  CHECK_FALSE(has_blank);

  for (const auto& r : rows) {
    CHECK(r.acc > 0.0);
    CHECK(r.acc <= 100.0);
    CHECK(r.acc_std >= 0.0);
    CHECK(r.run == 0);
  }
}

TEST_CASE("bundled csv round-trips exactly") {
  auto rows = fixture_accuracy();
  auto text = fixture_accuracy_csv();
  CHECK(text.rfind("architecture,dataset,algorithm,sparsity,run,acc,acc_dense,acc_std\n", 0) ==
        0);
  auto back = parse_accuracy_csv(text);
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].architecture == rows[i].architecture);
    CHECK(back[i].dataset == rows[i].dataset);
    CHECK(back[i].algorithm == rows[i].algorithm);
    CHECK(back[i].sparsity == rows[i].sparsity);
    CHECK(back[i].acc == rows[i].acc);
    CHECK(back[i].acc_dense == rows[i].acc_dense);
    CHECK(back[i].acc_std == rows[i].acc_std);
    CHECK(back[i].has_std);
  }
}

TEST_CASE("bundled architecture configs parse and validate") {
  for (const auto& name : builtin_architecture_names()) {
    auto spec = load_architecture(fixture_architecture_json(name));
    CHECK(spec.name == name);
    CHECK(spec.input.h == 32);
    CHECK(spec.input.w == 32);
    CHECK_FALSE(spec.weighted.empty());
  }
}

TEST_CASE("bundled table feeds the ranking pipeline") {
  auto rows = fixture_accuracy();
  auto truth = ground_truth_ranking(rows, "conv6", 0.9, "cifar10");
  CHECK(truth.size() == 7);
  CHECK(truth.front() == "synflow");  // 91.3 leads that column
  auto algs = fixture_algorithms();
  std::sort(truth.begin(), truth.end());
  std::sort(algs.begin(), algs.end());
  CHECK(truth == algs);
}
