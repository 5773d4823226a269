#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "snntopo.h"

namespace {

// takes ownership of the C string
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  snn_string_free(s);
  return out;
}

bool contains(const std::string& hay, const char* needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("library identity and error text") {
  CHECK(snn_version() != nullptr);
  CHECK(std::strlen(snn_version()) > 0);

  snn_arch* a = nullptr;
  CHECK(snn_arch_builtin("no-such-net", 32, 32, 10, &a) == SNN_E_INVALID);
  CHECK(a == nullptr);
  CHECK(std::strlen(snn_last_error()) > 0);

  CHECK(snn_arch_builtin(nullptr, 32, 32, 10, &a) == SNN_E_INVALID);
  CHECK(snn_arch_load("/nonexistent/arch.json", &a) != SNN_OK);

  snn_string_free(nullptr);
  snn_arch_free(nullptr);
  snn_mask_free(nullptr);
  snn_graph_free(nullptr);
}

TEST_CASE("architecture handles round-trip through json") {
  snn_arch* a = nullptr;
  REQUIRE(snn_arch_builtin("conv6", 16, 16, 10, &a) == SNN_OK);

  auto text = take([&] { char* s = nullptr; CHECK(snn_arch_json(a, &s) == SNN_OK); return s; }());
  CHECK(contains(text, "conv6"));

  snn_arch* b = nullptr;
  REQUIRE(snn_arch_from_json(text.c_str(), &b) == SNN_OK);
  auto info = take([&] { char* s = nullptr; CHECK(snn_arch_info_json(b, &s) == SNN_OK); return s; }());
  CHECK(contains(info, "total_params"));

  char* names = nullptr;
  REQUIRE(snn_builtin_names_json(&names) == SNN_OK);
  auto list = take(names);
  CHECK(contains(list, "resnet20"));
  CHECK(contains(list, "wide-resnet-28-2"));

  snn_arch_free(a);
  snn_arch_free(b);
}

TEST_CASE("masks generate, persist, and validate") {
  snn_arch* a = nullptr;
  REQUIRE(snn_arch_builtin("conv6", 16, 16, 10, &a) == SNN_OK);

  snn_mask* m = nullptr;
  REQUIRE(snn_mask_generate(a, "erk", 0.9, 7, &m) == SNN_OK);
  CHECK(snn_mask_generate(a, "lottery", 0.9, 7, &m) == SNN_E_INVALID);

  char* dens = nullptr;
  REQUIRE(snn_mask_density_json(m, a, &dens) == SNN_OK);
  CHECK(contains(take(dens), "density"));

  REQUIRE(snn_mask_attach_weights(m, a, "gaussian-fan-in", 11) == SNN_OK);
  CHECK(snn_mask_attach_weights(m, a, "gaussian-fan-in", 11) != SNN_OK);

  const char* path = "capi_mask.bin";
  REQUIRE(snn_mask_save(m, path) == SNN_OK);
  snn_mask* back = nullptr;
  REQUIRE(snn_mask_load(path, a, &back) == SNN_OK);
  std::remove(path);
  std::remove((std::string(path) + ".json").c_str());

  snn_mask_free(m);
  snn_mask_free(back);
  snn_arch_free(a);
}

TEST_CASE("graphs encode, report, and persist") {
  snn_arch* a = nullptr;
  REQUIRE(snn_arch_builtin("conv6", 8, 8, 10, &a) == SNN_OK);
  snn_mask* m = nullptr;
  REQUIRE(snn_mask_generate(a, "erk", 0.9, 3, &m) == SNN_OK);

  snn_graph* g = nullptr;
  REQUIRE(snn_encode_network(a, m, 0, &g) == SNN_OK);
  char* info = nullptr;
  REQUIRE(snn_graph_info_json(g, &info) == SNN_OK);
  auto info_text = take(info);
  CHECK(contains(info_text, "partitions"));

  const char* path = "capi_graph.bin";
  REQUIRE(snn_graph_save(g, path, "csr") == SNN_OK);
  snn_graph* back = nullptr;
  REQUIRE(snn_graph_load(path, &back) == SNN_OK);
  char* info2 = nullptr;
  REQUIRE(snn_graph_info_json(back, &info2) == SNN_OK);
  CHECK(take(info2) == info_text);
  std::remove(path);

  snn_graph* layer = nullptr;
  REQUIRE(snn_encode_layer(a, m, "rolled", 1, 0, &layer) == SNN_OK);
  CHECK(snn_encode_layer(a, m, "origami", 1, 0, &layer) == SNN_E_INVALID);

  char* metrics = nullptr;
  REQUIRE(snn_topometrics_json(layer, "local,global", 0, 1, 2, &metrics) == SNN_OK);
  auto mtext = take(metrics);
  CHECK(contains(mtext, "components"));

  char* row = nullptr;
  REQUIRE(snn_topometrics_csv(layer, "layer1", nullptr, 0, 1, 2, &row) == SNN_OK);
  auto rtext = take(row);
  CHECK(contains(rtext, "label,"));
  CHECK(contains(rtext, "layer1,"));

  snn_graph_free(g);
  snn_graph_free(back);
  snn_graph_free(layer);
  snn_mask_free(m);
  snn_arch_free(a);
}

TEST_CASE("expander report flows through the c surface") {
  snn_arch* a = nullptr;
  REQUIRE(snn_arch_builtin("conv6", 8, 8, 10, &a) == SNN_OK);
  snn_mask* m = nullptr;
  REQUIRE(snn_mask_generate(a, "erk", 0.9, 5, &m) == SNN_OK);

  char* rep = nullptr;
  REQUIRE(snn_ramanujan_json(a, m, "rolled", 42, 2, &rep) == SNN_OK);
  auto text = take(rep);
  CHECK(contains(text, "delta_r"));
  CHECK(contains(text, "layers"));

  char* csv = nullptr;
  char* js = nullptr;
  REQUIRE(snn_density_study(a, m, "rolled", 42, 2, &csv, &js) == SNN_OK);
  CHECK(contains(take(csv), "position,density"));
  CHECK(contains(take(js), "pearson"));

  snn_mask_free(m);
  snn_arch_free(a);
}

TEST_CASE("regression and ranking round-trip through text") {
  char* acc_csv = nullptr;
  REQUIRE(snn_fixture_accuracy_csv(&acc_csv) == SNN_OK);
  std::string acc = take(acc_csv);

  // synthetic feature table covering every <arch, algorithm, sparsity> cell
  std::string features = "architecture,algorithm,sparsity,f_a,f_b,f_c\n";
  const char* archs[4] = {"conv6", "resnet20", "resnet32", "wide-resnet-28-2"};
  const char* algos[7] = {"snip", "grasp", "synflow", "prospr", "uniform", "er", "erk"};
  const char* sp[5] = {"0.6", "0.8", "0.9", "0.95", "0.98"};
  int t = 0;
  for (auto* ar : archs)
    for (auto* al : algos)
      for (auto* s : sp) {
        ++t;
        features += std::string(ar) + ',' + al + ',' + s + ',' +
                    std::to_string(0.01 * (t % 97)) + ',' + std::to_string(0.02 * (t % 53)) +
                    ',' + std::to_string(0.03 * (t % 31)) + '\n';
      }

  char* rep = nullptr;
  char* imp = nullptr;
  REQUIRE(snn_regression_run(acc.c_str(), features.c_str(), "sparsity:0.9", 5, 3, 1, 2, 0, &rep,
                             &imp) == SNN_OK);
  auto rep_text = take(rep);
  CHECK(contains(rep_text, "least-squares"));
  CHECK(contains(rep_text, "importance"));
  CHECK(contains(take(imp), "feature,importance"));
  CHECK(snn_regression_run(acc.c_str(), features.c_str(), "flavor:mint", 5, 3, 1, 2, 0, &rep,
                           &imp) != SNN_OK);

  const char* rank_req = R"({
    "algorithms": [
      {"name": "a1", "topometrics": [0.1, 0.9]},
      {"name": "a2", "topometrics": [0.4, 0.2]},
      {"name": "a3", "topometrics": [0.8, 0.4]}
    ],
    "importance_model": [0.7, 0.3],
    "importance_sparsity": [0.5, 0.5]
  })";
  char* ranking = nullptr;
  REQUIRE(snn_rank_json(rank_req, &ranking) == SNN_OK);
  auto rank_text = take(ranking);
  CHECK(contains(rank_text, "a1"));
  CHECK(contains(rank_text, "coefficient"));
  CHECK(snn_rank_json("{]", &ranking) == SNN_E_PARSE);
  CHECK(snn_rank_json("{\"algorithms\": 3}", &ranking) == SNN_E_PARSE);

  const char* strategies = R"([
    {"name": "alphabetical", "cells": [
      {"architecture": "conv6", "sparsity": 0.9,
       "ranking": ["er", "erk", "grasp", "prospr", "snip", "synflow", "uniform"]}
    ]}
  ])";
  char* eval_csv_text = nullptr;
  char* eval_json_text = nullptr;
  REQUIRE(snn_rank_eval(acc.c_str(), strategies, &eval_csv_text, &eval_json_text) == SNN_OK);
  CHECK(contains(take(eval_csv_text), "strategy,architecture,sparsity,rbo_mean,n_datasets"));
  CHECK(contains(take(eval_json_text), "alphabetical"));

  char* arch_json = nullptr;
  REQUIRE(snn_fixture_architecture_json("resnet20", &arch_json) == SNN_OK);
  snn_arch* a = nullptr;
  auto arch_text = take(arch_json);
  REQUIRE(snn_arch_from_json(arch_text.c_str(), &a) == SNN_OK);
  snn_arch_free(a);
}
