#include "snntopo.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/archspec.hpp"
#include "core/encoder.hpp"
#include "core/fixtures.hpp"
#include "core/graph.hpp"
#include "core/mask.hpp"
#include "core/ramanujan.hpp"
#include "core/ranking.hpp"
#include "core/topometrics.hpp"
#include "json.hpp"

using namespace snntopo;
using nlohmann::json;

struct snn_arch {
  ArchitectureSpec v;
};
struct snn_mask {
  SparseMask v;
};
struct snn_graph {
  MultipartiteGraph v;
};

namespace {

thread_local std::string t_last_error;

snn_status map_code(errc c) {
  switch (c) {
    case errc::invalid_argument: return SNN_E_INVALID;
    case errc::parse_error: return SNN_E_PARSE;
    case errc::io_error: return SNN_E_IO;
    case errc::shape_mismatch: return SNN_E_SHAPE;
    case errc::state_error: return SNN_E_STATE;
    case errc::numeric_error: return SNN_E_NUMERIC;
    case errc::unsupported: return SNN_E_UNSUPPORTED;
  }
  return SNN_E_INTERNAL;
}

snn_status fail(snn_status code, const std::string& msg) {
  t_last_error = msg;
  return code;
}

template <class F>
snn_status guarded(F&& f) {
  try {
    f();
    return SNN_OK;
  } catch (const Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(SNN_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SNN_E_INTERNAL, "unknown failure");
  }
}

void set_out(char** out, const std::string& s) {
  if (out == nullptr) return;
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  *out = p;
}

const char* need(const char* s, const char* what) {
  if (s == nullptr) throw Error(errc::invalid_argument, std::string(what) + " must not be null");
  return s;
}

template <class T>
const T* need_handle(const T* h, const char* what) {
  if (h == nullptr) throw Error(errc::invalid_argument, std::string(what) + " handle is null");
  return h;
}

u32 parse_groups_csv(const char* groups_csv) {
  if (groups_csv == nullptr || *groups_csv == '\0')
    return static_cast<u32>(MetricGroup::All);
  std::vector<std::string> names;
  std::string cur;
  for (const char* p = groups_csv;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
      if (*p == '\0') break;
    } else if (*p != ' ') {
      cur += *p;
    }
  }
  return parse_metric_groups(names);
}

WeightInit parse_weight_init(const std::string& name) {
  if (name == "gaussian-fan-in") return WeightInit::GaussianFanIn;
  if (name == "unit-magnitude") return WeightInit::UnitMagnitude;
  throw Error(errc::invalid_argument, "unknown weight init '" + name + "'");
}

std::vector<double> json_doubles(const json& j, const char* what) {
  if (!j.is_array()) throw Error(errc::parse_error, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(errc::parse_error, std::string(what) + " must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

json parse_json(const char* text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(errc::parse_error, std::string("malformed ") + what);
  return j;
}

MetricsConfig metrics_config(const char* groups_csv, int exclude_padding, uint64_t seed,
                             uint32_t workers) {
  MetricsConfig cfg;
  cfg.groups = parse_groups_csv(groups_csv);
  cfg.exclude_padding = exclude_padding != 0;
  cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

extern "C" {

const char* snn_version(void) {
  return "0.1.0";
}

const char* snn_last_error(void) {
  return t_last_error.c_str();
}

void snn_string_free(char* s) {
  std::free(s);
}

snn_status snn_arch_builtin(const char* name, uint32_t input_h, uint32_t input_w,
                            uint32_t num_classes, snn_arch** out) {
  return guarded([&] {
    need(name, "name");
    need_handle(out, "out");
    *out = new snn_arch{builtin_architecture(name, input_h, input_w, num_classes)};
  });
}

snn_status snn_arch_from_json(const char* json_text, snn_arch** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need_handle(out, "out");
    *out = new snn_arch{load_architecture(json_text)};
  });
}

snn_status snn_arch_load(const char* path, snn_arch** out) {
  return guarded([&] {
    need(path, "path");
    need_handle(out, "out");
    *out = new snn_arch{load_architecture_file(path)};
  });
}

snn_status snn_arch_json(const snn_arch* a, char** out) {
  return guarded([&] { set_out(out, architecture_to_json(need_handle(a, "arch")->v)); });
}

snn_status snn_arch_info_json(const snn_arch* a, char** out) {
  return guarded([&] { set_out(out, architecture_info_json(need_handle(a, "arch")->v)); });
}

snn_status snn_builtin_names_json(char** out) {
  return guarded([&] { set_out(out, json(builtin_architecture_names()).dump()); });
}

void snn_arch_free(snn_arch* a) {
  delete a;
}

snn_status snn_mask_generate(const snn_arch* a, const char* method, double sparsity,
                             uint64_t seed, snn_mask** out) {
  return guarded([&] {
    need_handle(a, "arch");
    need(method, "method");
    need_handle(out, "out");
    *out = new snn_mask{generate_mask(a->v, method, sparsity, seed)};
  });
}

snn_status snn_mask_attach_weights(snn_mask* m, const snn_arch* a, const char* init,
                                   uint64_t seed) {
  return guarded([&] {
    need_handle(m, "mask");
    need_handle(a, "arch");
    attach_weights(m->v, a->v, parse_weight_init(need(init, "init")), seed);
  });
}

snn_status snn_mask_save(const snn_mask* m, const char* path) {
  return guarded([&] { save_mask(need_handle(m, "mask")->v, need(path, "path")); });
}

snn_status snn_mask_load(const char* path, const snn_arch* a, snn_mask** out) {
  return guarded([&] {
    need(path, "path");
    need_handle(out, "out");
    SparseMask m = load_mask(path);
    if (a != nullptr) validate_mask(m, a->v);
    *out = new snn_mask{std::move(m)};
  });
}

snn_status snn_mask_density_json(const snn_mask* m, const snn_arch* a, char** out) {
  return guarded([&] {
    set_out(out, density_report(need_handle(m, "mask")->v, need_handle(a, "arch")->v));
  });
}

void snn_mask_free(snn_mask* m) {
  delete m;
}

snn_status snn_encode_network(const snn_arch* a, const snn_mask* m, int weighted,
                              snn_graph** out) {
  return guarded([&] {
    need_handle(a, "arch");
    need_handle(m, "mask");
    need_handle(out, "out");
    *out = new snn_graph{build_mge(a->v, m->v, weighted != 0)};
  });
}

snn_status snn_encode_layer(const snn_arch* a, const snn_mask* m, const char* encoding,
                            size_t weighted_pos, int weighted, snn_graph** out) {
  return guarded([&] {
    need_handle(a, "arch");
    need_handle(m, "mask");
    need_handle(out, "out");
    Encoding enc = encoding_from_name(need(encoding, "encoding"));
    *out = new snn_graph{encode_layer_graph(a->v, m->v, weighted_pos, enc, weighted != 0)};
  });
}

snn_status snn_graph_save(const snn_graph* g, const char* path, const char* format) {
  return guarded([&] {
    save_graph(need_handle(g, "graph")->v, need(path, "path"), need(format, "format"));
  });
}

snn_status snn_graph_load(const char* path, snn_graph** out) {
  return guarded([&] {
    need(path, "path");
    need_handle(out, "out");
    *out = new snn_graph{load_graph(path)};
  });
}

snn_status snn_graph_info_json(const snn_graph* g, char** out) {
  return guarded([&] {
    const MultipartiteGraph& v = need_handle(g, "graph")->v;
    json parts = json::array();
    for (const auto& p : v.partitions)
      parts.push_back({{"core", p.core}, {"pad", p.pad}});
    json groups = json::array();
    for (const auto& r : v.residual_groups)
      groups.push_back(
          {{"from", r.from_partition}, {"to", r.to_partition}, {"edges", r.edges}});
    json j{{"nodes", v.n_nodes},
           {"edges", v.n_edges},
           {"weighted", v.weighted},
           {"partitions", parts},
           {"residual_groups", groups}};
    set_out(out, j.dump(2));
  });
}

void snn_graph_free(snn_graph* g) {
  delete g;
}

snn_status snn_topometrics_json(const snn_graph* g, const char* groups_csv, int exclude_padding,
                                uint64_t seed, uint32_t workers, char** out) {
  return guarded([&] {
    auto v = compute_topometrics(need_handle(g, "graph")->v,
                                 metrics_config(groups_csv, exclude_padding, seed, workers));
    set_out(out, topometrics_json(v));
  });
}

snn_status snn_topometrics_csv(const snn_graph* g, const char* label, const char* groups_csv,
                               int exclude_padding, uint64_t seed, uint32_t workers, char** out) {
  return guarded([&] {
    auto v = compute_topometrics(need_handle(g, "graph")->v,
                                 metrics_config(groups_csv, exclude_padding, seed, workers));
    set_out(out, topometrics_csv_header() + '\n' +
                     topometrics_csv_row(label ? label : "graph", v) + '\n');
  });
}

snn_status snn_ramanujan_json(const snn_arch* a, const snn_mask* m, const char* encoding,
                              uint64_t seed, uint32_t workers, char** out) {
  return guarded([&] {
    need_handle(a, "arch");
    need_handle(m, "mask");
    RamanujanOptions opt;
    opt.seed = seed;
    auto rep = ramanujan_report(a->v, m->v, encoding_from_name(need(encoding, "encoding")), opt,
                                workers);
    set_out(out, ramanujan_json(rep));
  });
}

snn_status snn_density_study(const snn_arch* a, const snn_mask* m, const char* encoding,
                             uint64_t seed, uint32_t workers, char** out_csv, char** out_json) {
  return guarded([&] {
    need_handle(a, "arch");
    need_handle(m, "mask");
    RamanujanOptions opt;
    opt.seed = seed;
    auto rep = density_correlation_study(
        a->v, m->v, encoding_from_name(need(encoding, "encoding")), opt, workers);
    set_out(out_csv, correlation_csv(rep));
    set_out(out_json, correlation_json(rep));
  });
}

snn_status snn_regression_run(const char* accuracy_csv_text, const char* features_csv_text,
                              const char* scenario, uint32_t k_folds, uint32_t runs,
                              uint64_t seed, uint32_t workers, int include_bayesian,
                              char** out_json, char** out_importance_csv) {
  return guarded([&] {
    auto acc = parse_accuracy_csv(need(accuracy_csv_text, "accuracy csv"));
    auto table = parse_feature_csv(need(features_csv_text, "features csv"));
    auto records = join_records(acc, table);
    AnalysisConfig cfg;
    cfg.k_folds = k_folds;
    cfg.runs = runs;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.include_bayesian = include_bayesian != 0;
    auto report =
        run_regression(records, parse_scenario(need(scenario, "scenario")), cfg,
                       table.feature_names);
    set_out(out_json, analysis_json(report));
    set_out(out_importance_csv, importance_csv(report));
  });
}

snn_status snn_rank_json(const char* request_json, char** out) {
  return guarded([&] {
    json req = parse_json(need(request_json, "request"), "ranking request");
    if (!req.contains("algorithms"))
      throw Error(errc::parse_error, "ranking request lacks 'algorithms'");
    std::vector<RankingInput> inputs;
    for (const auto& a : req["algorithms"]) {
      RankingInput in;
      if (!a.contains("name") || !a["name"].is_string())
        throw Error(errc::parse_error, "algorithm entry lacks a string 'name'");
      in.name = a["name"].get<std::string>();
      in.topometrics = json_doubles(a.value("topometrics", json::array()), "topometrics");
      inputs.push_back(std::move(in));
    }
    auto wm = json_doubles(req.value("importance_model", json::array()), "importance_model");
    auto ws =
        json_doubles(req.value("importance_sparsity", json::array()), "importance_sparsity");
    if (req.value("normalize", true)) minmax_normalize(inputs);
    set_out(out, ranking_json(rank_algorithms(inputs, wm, ws)));
  });
}

snn_status snn_rank_eval(const char* accuracy_csv_text, const char* strategies_json,
                         char** out_csv, char** out_json) {
  return guarded([&] {
    auto records = parse_accuracy_csv(need(accuracy_csv_text, "accuracy csv"));
    json js = parse_json(need(strategies_json, "strategies"), "strategies json");
    if (!js.is_array()) throw Error(errc::parse_error, "strategies json must be an array");
    std::vector<StrategyRankings> strategies;
    for (const auto& s : js) {
      StrategyRankings sr;
      if (!s.contains("name") || !s["name"].is_string())
        throw Error(errc::parse_error, "strategy entry lacks a string 'name'");
      sr.name = s["name"].get<std::string>();
      for (const auto& c : s.value("cells", json::array())) {
        StrategyCellList cell;
        cell.architecture = c.value("architecture", std::string());
        if (!c.contains("sparsity") || !c["sparsity"].is_number())
          throw Error(errc::parse_error, "strategy cell lacks a numeric 'sparsity'");
        cell.sparsity = c["sparsity"].get<double>();
        for (const auto& n : c.value("ranking", json::array())) {
          if (!n.is_string())
            throw Error(errc::parse_error, "strategy ranking entries must be strings");
          cell.ranking.push_back(n.get<std::string>());
        }
        sr.cells.push_back(std::move(cell));
      }
      strategies.push_back(std::move(sr));
    }
    auto table = evaluate_strategies(records, strategies);
    set_out(out_csv, eval_csv(table));
    set_out(out_json, eval_json(table));
  });
}

snn_status snn_fixture_accuracy_csv(char** out) {
  return guarded([&] { set_out(out, fixture_accuracy_csv()); });
}

snn_status snn_fixture_architecture_json(const char* name, char** out) {
  return guarded([&] { set_out(out, fixture_architecture_json(need(name, "name"))); });
}

}  // extern "C"
