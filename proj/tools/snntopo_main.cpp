// Command-line front end. Talks to the library exclusively through the C API;
// JSON plumbing (manifests, rank requests) happens on this side of the fence.

#include <sys/resource.h>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "snntopo.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct StageError {
  std::string stage;
  std::string message;
};

[[noreturn]] void bail(const std::string& stage, const std::string& message) {
  throw StageError{stage, message};
}

void check(snn_status st, const std::string& stage) {
  if (st != SNN_OK) bail(stage, snn_last_error());
}

std::string take(char* s) {
  std::string out = s == nullptr ? std::string() : std::string(s);
  snn_string_free(s);
  return out;
}

struct Arch {
  snn_arch* p = nullptr;
  ~Arch() { snn_arch_free(p); }
};
struct Mask {
  snn_mask* p = nullptr;
  ~Mask() { snn_mask_free(p); }
};
struct Graph {
  snn_graph* p = nullptr;
  ~Graph() { snn_graph_free(p); }
};

// files created by the current command; removed if a later stage fails
std::vector<fs::path> g_created;

void forget_outputs() {
  g_created.clear();
}

void remove_partial_outputs() {
  for (const auto& p : g_created) {
    std::error_code ec;
    fs::remove(p, ec);
  }
  g_created.clear();
}

fs::path resolve_out(const std::string& path) {
  const char* root = std::getenv("SNNTOPO_OUT");
  fs::path p(path);
  if (root != nullptr && *root != '\0' && p.is_relative()) return fs::path(root) / p;
  return p;
}

std::string read_file(const fs::path& path, const std::string& stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bail(stage, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& data, const std::string& stage) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bail(stage, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) bail(stage, "short write on " + path.string());
  g_created.push_back(path);
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_digest(const fs::path& path, const std::string& stage) {
  return hex64(fnv1a64(read_file(path, stage)));
}

struct GlobalOpts {
  uint64_t seed = 1;
  uint32_t workers = 0;
  std::vector<uint32_t> input_size{32, 32};
  uint32_t classes = 10;
};

struct ArchChoice {
  std::string name;
  std::string file;
};

Arch load_arch(const ArchChoice& c, const GlobalOpts& g, const std::string& stage) {
  if (c.name.empty() == c.file.empty())
    bail(stage, "exactly one of --arch and --arch-file is required");
  Arch a;
  if (!c.name.empty()) {
    check(snn_arch_builtin(c.name.c_str(), g.input_size[0], g.input_size[1], g.classes, &a.p),
          stage);
  } else {
    check(snn_arch_load(c.file.c_str(), &a.p), stage);
  }
  return a;
}

void add_arch_options(CLI::App* cmd, ArchChoice& c) {
  cmd->add_option("--arch", c.name, "builtin architecture name");
  cmd->add_option("--arch-file", c.file, "architecture config JSON");
}

// flattens {"f":1.5e-3,...} rendering differences away for the human summary
std::string brief_density(const std::string& density_json) {
  json j = json::parse(density_json, nullptr, false);
  if (j.is_discarded()) return "";
  std::ostringstream ss;
  ss << j.value("surviving_weights", 0ull) << "/" << j.value("total_weights", 0ull)
     << " weights kept (density " << j.value("overall_density", 0.0) << ")";
  auto warn = j.value("warnings", std::vector<std::string>{});
  for (const auto& w : warn) ss << "\n  warning: " << w;
  return ss.str();
}

std::vector<double> parse_number_list(const std::string& text, const fs::path& path,
                                      const std::string& stage) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    try {
      size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      bail(stage, "bad number '" + token + "' in " + path.string());
    }
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r')
      flush();
    else
      token += ch;
  }
  flush();
  return out;
}

struct MaskSpec {
  ArchChoice arch;
  std::string method = "erk";
  double sparsity = 0.9;
  std::string weights;  // empty: binary mask
};

Mask make_mask(const Arch& a, const MaskSpec& spec, const GlobalOpts& g,
               const std::string& stage) {
  Mask m;
  check(snn_mask_generate(a.p, spec.method.c_str(), spec.sparsity, g.seed, &m.p), stage);
  if (!spec.weights.empty())
    check(snn_mask_attach_weights(m.p, a.p, spec.weights.c_str(), g.seed), stage);
  return m;
}

long peak_rss_kb() {
  struct rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

// ---- subcommands ----

struct MaskCmd {
  MaskSpec spec;
  std::string out;
  std::string density_json;
};

void run_mask(const MaskCmd& c, const GlobalOpts& g) {
  const std::string stage = "mask";
  Arch a = load_arch(c.spec.arch, g, stage);
  Mask m = make_mask(a, c.spec, g, stage);
  fs::path out = resolve_out(c.out);
  if (out.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out.parent_path(), ec);
  }
  check(snn_mask_save(m.p, out.string().c_str()), stage);
  g_created.push_back(out);
  g_created.push_back(out.string() + ".json");
  char* dens = nullptr;
  check(snn_mask_density_json(m.p, a.p, &dens), stage);
  std::string density = take(dens);
  if (!c.density_json.empty()) write_file(resolve_out(c.density_json), density, stage);
  std::cout << "mask: " << c.spec.method << " s=" << c.spec.sparsity << ", "
            << brief_density(density) << "\n  -> " << out.string() << "\n";
}

struct EncodeCmd {
  ArchChoice arch;
  std::string mask;
  std::string encoding = "unrolled";
  int layer = -1;  // -1: whole network
  bool weighted = false;
  std::string format = "csr";
  std::string out;
  std::string info_json;
};

void run_encode(const EncodeCmd& c, const GlobalOpts& g) {
  const std::string stage = "encode";
  Arch a = load_arch(c.arch, g, stage);
  Mask m;
  check(snn_mask_load(resolve_out(c.mask).string().c_str(), a.p, &m.p), stage);
  Graph gr;
  if (c.layer < 0) {
    if (c.encoding != "unrolled")
      bail(stage, "whole-network graphs are unrolled; pass --layer for " + c.encoding);
    check(snn_encode_network(a.p, m.p, c.weighted ? 1 : 0, &gr.p), stage);
  } else {
    check(snn_encode_layer(a.p, m.p, c.encoding.c_str(), static_cast<size_t>(c.layer),
                           c.weighted ? 1 : 0, &gr.p),
          stage);
  }
  fs::path out = resolve_out(c.out);
  if (out.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out.parent_path(), ec);
  }
  check(snn_graph_save(gr.p, out.string().c_str(), c.format.c_str()), stage);
  g_created.push_back(out);
  char* info = nullptr;
  check(snn_graph_info_json(gr.p, &info), stage);
  std::string info_text = take(info);
  if (!c.info_json.empty()) write_file(resolve_out(c.info_json), info_text, stage);
  json j = json::parse(info_text);
  std::cout << "encode: " << (c.layer < 0 ? std::string("network") : "layer " + std::to_string(c.layer))
            << " " << c.encoding << ", " << j.value("nodes", 0ull) << " nodes, "
            << j.value("edges", 0ull) << " edges\n  -> " << out.string() << "\n";
}

struct MetricsCmd {
  std::string graph;
  std::string groups;
  bool exclude_padding = false;
  std::string label;
  std::string out;
  std::string json_out;
};

void run_metrics(const MetricsCmd& c, const GlobalOpts& g) {
  const std::string stage = "metrics";
  Graph gr;
  fs::path gpath = resolve_out(c.graph);
  check(snn_graph_load(gpath.string().c_str(), &gr.p), stage);
  std::string label = c.label.empty() ? gpath.stem().string() : c.label;
  char* csv = nullptr;
  check(snn_topometrics_csv(gr.p, label.c_str(), c.groups.c_str(),
                            c.exclude_padding ? 1 : 0, g.seed, g.workers, &csv),
        stage);
  write_file(resolve_out(c.out), take(csv), stage);
  if (!c.json_out.empty()) {
    char* js = nullptr;
    check(snn_topometrics_json(gr.p, c.groups.c_str(), c.exclude_padding ? 1 : 0, g.seed,
                               g.workers, &js),
          stage);
    write_file(resolve_out(c.json_out), take(js), stage);
  }
  std::cout << "metrics: " << label << " -> " << resolve_out(c.out).string() << "\n";
}

struct RamanujanCmd {
  ArchChoice arch;
  std::string mask;
  std::string encoding = "rolled";
  std::string out;
  std::string correlation_csv;
  std::string correlation_json;
};

void run_ramanujan(const RamanujanCmd& c, const GlobalOpts& g) {
  const std::string stage = "ramanujan";
  Arch a = load_arch(c.arch, g, stage);
  Mask m;
  check(snn_mask_load(resolve_out(c.mask).string().c_str(), a.p, &m.p), stage);
  char* rep = nullptr;
  check(snn_ramanujan_json(a.p, m.p, c.encoding.c_str(), g.seed, g.workers, &rep), stage);
  write_file(resolve_out(c.out), take(rep), stage);
  if (!c.correlation_csv.empty() || !c.correlation_json.empty()) {
    char* csv = nullptr;
    char* js = nullptr;
    check(snn_density_study(a.p, m.p, c.encoding.c_str(), g.seed, g.workers, &csv, &js), stage);
    std::string csv_text = take(csv), js_text = take(js);
    if (!c.correlation_csv.empty()) write_file(resolve_out(c.correlation_csv), csv_text, stage);
    if (!c.correlation_json.empty()) write_file(resolve_out(c.correlation_json), js_text, stage);
  }
  std::cout << "ramanujan: " << c.encoding << " report -> " << resolve_out(c.out).string()
            << "\n";
}

struct RegressCmd {
  std::string records;
  std::string features;
  std::string scenario;
  uint32_t k_folds = 5;
  uint32_t runs = 100;
  bool include_bayesian = false;
  std::string out;
  std::string importance;
};

void run_regress(const RegressCmd& c, const GlobalOpts& g) {
  const std::string stage = "analyze";
  std::string acc = read_file(resolve_out(c.records), stage);
  std::string feats = read_file(resolve_out(c.features), stage);
  char* rep = nullptr;
  char* imp = nullptr;
  check(snn_regression_run(acc.c_str(), feats.c_str(), c.scenario.c_str(), c.k_folds, c.runs,
                           g.seed, g.workers, c.include_bayesian ? 1 : 0, &rep, &imp),
        stage);
  write_file(resolve_out(c.out), take(rep), stage);
  std::string imp_text = take(imp);
  if (!c.importance.empty()) write_file(resolve_out(c.importance), imp_text, stage);
  std::cout << "analyze: " << c.scenario << ", " << c.runs << " runs -> "
            << resolve_out(c.out).string() << "\n";
}

struct RankCmd {
  std::string topometrics;
  std::string importance_arch;
  std::string importance_sparsity;
  bool no_normalize = false;
  std::string out;
};

void run_rank(const RankCmd& c, const GlobalOpts&) {
  const std::string stage = "rank";
  if (c.topometrics.empty() || c.importance_arch.empty() || c.importance_sparsity.empty() ||
      c.out.empty())
    bail(stage, "--topometrics, --importance-arch, --importance-sparsity, --out are required");

  // topometrics CSV: header row, then one row per algorithm (name first)
  std::string text = read_file(resolve_out(c.topometrics), stage);
  json algorithms = json::array();
  std::istringstream lines(text);
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    json entry;
    json values = json::array();
    bool first = true;
    while (std::getline(fields, field, ',')) {
      if (first) {
        entry["name"] = field;
        first = false;
        continue;
      }
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        bail(stage, "bad number '" + field + "' in " + c.topometrics);
      }
    }
    entry["topometrics"] = values;
    algorithms.push_back(entry);
  }

  json req;
  req["algorithms"] = algorithms;
  req["importance_model"] = parse_number_list(
      read_file(resolve_out(c.importance_arch), stage), c.importance_arch, stage);
  req["importance_sparsity"] = parse_number_list(
      read_file(resolve_out(c.importance_sparsity), stage), c.importance_sparsity, stage);
  req["normalize"] = !c.no_normalize;

  char* out = nullptr;
  check(snn_rank_json(req.dump().c_str(), &out), stage);
  write_file(resolve_out(c.out), take(out), stage);
  std::cout << "rank: " << algorithms.size() << " algorithms -> " << resolve_out(c.out).string()
            << "\n";
}

struct RankEvalCmd {
  std::string records;
  std::string strategies;
  std::string out;
  std::string json_out;
};

void run_rank_eval(const RankEvalCmd& c, const GlobalOpts&) {
  const std::string stage = "rank-eval";
  std::string acc = read_file(resolve_out(c.records), stage);

  json strategies = json::array();
  fs::path sp = resolve_out(c.strategies);
  auto add_strategy = [&](const fs::path& file) {
    json j = json::parse(read_file(file, stage), nullptr, false);
    if (j.is_discarded()) bail(stage, "malformed strategy json: " + file.string());
    if (j.is_array()) {
      for (auto& s : j) strategies.push_back(std::move(s));
      return;
    }
    if (!j.contains("name")) j["name"] = file.stem().string();
    strategies.push_back(std::move(j));
  };
  if (fs::is_directory(sp)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(sp))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) bail(stage, "no strategy .json files in " + sp.string());
    for (const auto& f : files) add_strategy(f);
  } else {
    add_strategy(sp);
  }

  char* csv = nullptr;
  char* js = nullptr;
  check(snn_rank_eval(acc.c_str(), strategies.dump().c_str(), &csv, &js), stage);
  write_file(resolve_out(c.out), take(csv), stage);
  if (!c.json_out.empty()) write_file(resolve_out(c.json_out), take(js), stage);
  std::cout << "rank eval: " << strategies.size() << " strategies -> "
            << resolve_out(c.out).string() << "\n";
}

struct FixturesCmd {
  std::string out;
};

void run_fixtures(const FixturesCmd& c) {
  const std::string stage = "fixtures";
  fs::path dir = resolve_out(c.out);
  char* acc = nullptr;
  check(snn_fixture_accuracy_csv(&acc), stage);
  std::string acc_text = take(acc);
  write_file(dir / "accuracy.csv", acc_text, stage);
  char* names = nullptr;
  check(snn_builtin_names_json(&names), stage);
  json list = json::parse(take(names));
  for (const auto& n : list) {
    std::string name = n.get<std::string>();
    char* cfg = nullptr;
    check(snn_fixture_architecture_json(name.c_str(), &cfg), stage);
    write_file(dir / (name + ".json"), take(cfg), stage);
  }
  size_t rows = static_cast<size_t>(std::count(acc_text.begin(), acc_text.end(), '\n'));
  std::cout << "fixtures: " << (rows == 0 ? 0 : rows - 1) << " accuracy rows, " << list.size()
            << " architecture configs -> " << dir.string() << "\n";
}

struct PipelineCmd {
  MaskSpec spec;
  std::string groups;
  bool exclude_padding = false;
  std::string format = "csr";
  std::string out;
};

void run_pipeline(const PipelineCmd& c, const GlobalOpts& g, const std::string& command_line) {
  using clock = std::chrono::steady_clock;
  fs::path dir = resolve_out(c.out);
  json manifest;
  manifest["tool"] = "snntopo";
  manifest["version"] = snn_version();
  manifest["command"] = command_line;
  manifest["seed"] = g.seed;
  manifest["workers"] = g.workers;
  json config{{"method", c.spec.method},
              {"sparsity", c.spec.sparsity},
              {"weights", c.spec.weights},
              {"groups", c.groups},
              {"exclude_padding", c.exclude_padding},
              {"format", c.format},
              {"input_size", g.input_size},
              {"classes", g.classes}};
  if (!c.spec.arch.name.empty()) config["arch"] = c.spec.arch.name;
  manifest["config"] = config;
  manifest["inputs"] = json::array();
  if (!c.spec.arch.file.empty()) {
    config["arch_file"] = c.spec.arch.file;
    manifest["inputs"].push_back(
        {{"path", c.spec.arch.file}, {"fnv1a64", file_digest(c.spec.arch.file, "pipeline")}});
    manifest["config"] = config;
  }
  manifest["run_id"] =
      hex64(fnv1a64(config.dump() + "|" + std::to_string(g.seed) + "|" + snn_version()));
  manifest["stages"] = json::array();
  manifest["outputs"] = json::array();

  auto record_output = [&](const fs::path& p, const std::string& stage) {
    manifest["outputs"].push_back(
        {{"path", p.string()}, {"stage", stage}, {"fnv1a64", file_digest(p, stage)}});
  };
  auto timed = [&](const std::string& name, auto&& fn) {
    auto t0 = clock::now();
    fn();
    auto ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    manifest["stages"].push_back({{"name", name}, {"ms", ms}});
  };

  Arch a = load_arch(c.spec.arch, g, "pipeline");
  Mask m;
  Graph gr;
  char sbuf[32];
  std::snprintf(sbuf, sizeof sbuf, "%g", c.spec.sparsity);
  std::string label = (c.spec.arch.name.empty() ? fs::path(c.spec.arch.file).stem().string()
                                               : c.spec.arch.name) +
                      "-" + c.spec.method + "-" + sbuf;

  timed("mask", [&] {
    Mask built = make_mask(a, c.spec, g, "mask");
    m.p = built.p;
    built.p = nullptr;
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path out = dir / "mask.bin";
    check(snn_mask_save(m.p, out.string().c_str()), "mask");
    g_created.push_back(out);
    g_created.push_back(out.string() + ".json");
    record_output(out, "mask");
  });

  timed("encode", [&] {
    check(snn_encode_network(a.p, m.p, c.spec.weights.empty() ? 0 : 1, &gr.p), "encode");
    fs::path out = dir / "graph.bin";
    check(snn_graph_save(gr.p, out.string().c_str(), c.format.c_str()), "encode");
    g_created.push_back(out);
    char* info = nullptr;
    check(snn_graph_info_json(gr.p, &info), "encode");
    json j = json::parse(take(info));
    j["run_id"] = manifest["run_id"];
    write_file(dir / "graph.json", j.dump(2) + "\n", "encode");
    record_output(out, "encode");
    record_output(dir / "graph.json", "encode");
  });

  timed("metrics", [&] {
    char* csv = nullptr;
    check(snn_topometrics_csv(gr.p, label.c_str(), c.groups.c_str(),
                              c.exclude_padding ? 1 : 0, g.seed, g.workers, &csv),
          "metrics");
    write_file(dir / "metrics.csv", take(csv), "metrics");
    char* js = nullptr;
    check(snn_topometrics_json(gr.p, c.groups.c_str(), c.exclude_padding ? 1 : 0, g.seed,
                               g.workers, &js),
          "metrics");
    json j = json::parse(take(js));
    j["run_id"] = manifest["run_id"];
    write_file(dir / "metrics.json", j.dump(2) + "\n", "metrics");
    record_output(dir / "metrics.csv", "metrics");
    record_output(dir / "metrics.json", "metrics");
  });

  manifest["peak_rss_kb"] = peak_rss_kb();
  write_file(dir / "manifest.json", manifest.dump(2) + "\n", "manifest");
  std::cout << "pipeline: " << label << " -> " << dir.string() << " (run "
            << manifest["run_id"].get<std::string>() << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse network topology toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "rng seed shared by all stages")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads (0: hardware)")->capture_default_str();
  app.add_option("--input-size", g.input_size, "input height and width")
      ->expected(2)
      ->capture_default_str();
  app.add_option("--classes", g.classes, "classifier output width")->capture_default_str();

  MaskCmd mask_cmd;
  auto* mask = app.add_subcommand("mask", "generate a sparsity mask");
  add_arch_options(mask, mask_cmd.spec.arch);
  mask->add_option("--method", mask_cmd.spec.method, "uniform | er | erk")->required();
  mask->add_option("--sparsity", mask_cmd.spec.sparsity, "fraction of weights removed")
      ->required();
  mask->add_option("--weights", mask_cmd.spec.weights,
                   "attach weights: gaussian-fan-in | unit-magnitude");
  mask->add_option("--out", mask_cmd.out, "mask container path")->required();
  mask->add_option("--density-json", mask_cmd.density_json, "density report path");

  EncodeCmd encode_cmd;
  auto* encode = app.add_subcommand("encode", "encode a mask as a graph");
  add_arch_options(encode, encode_cmd.arch);
  encode->add_option("--mask", encode_cmd.mask, "mask container")->required();
  encode->add_option("--encoding", encode_cmd.encoding,
                     "unrolled | rolled | rolled-channel (layer graphs)")
      ->capture_default_str();
  encode->add_option("--layer", encode_cmd.layer, "weighted-layer position; omit for the network");
  encode->add_flag("--weighted", encode_cmd.weighted, "carry mask weights onto edges");
  encode->add_option("--format", encode_cmd.format, "csr | edgelist")->capture_default_str();
  encode->add_option("--out", encode_cmd.out, "graph path")->required();
  encode->add_option("--info-json", encode_cmd.info_json, "graph summary path");

  MetricsCmd metrics_cmd;
  auto* metrics = app.add_subcommand("metrics", "topometrics of an encoded graph");
  metrics->add_option("--graph", metrics_cmd.graph, "graph file")->required();
  metrics->add_option("--groups", metrics_cmd.groups,
                      "metric groups: local,neighbor,strength,global,expansion");
  metrics->add_flag("--exclude-padding", metrics_cmd.exclude_padding,
                    "drop padding nodes before measuring");
  metrics->add_option("--label", metrics_cmd.label, "row label (default: graph stem)");
  metrics->add_option("--out", metrics_cmd.out, "metrics CSV path")->required();
  metrics->add_option("--json", metrics_cmd.json_out, "metrics JSON path");

  RamanujanCmd ram_cmd;
  auto* ram = app.add_subcommand("ramanujan", "per-layer expander metrics");
  add_arch_options(ram, ram_cmd.arch);
  ram->add_option("--mask", ram_cmd.mask, "mask container")->required();
  ram->add_option("--encoding", ram_cmd.encoding, "unrolled | rolled | rolled-channel")
      ->capture_default_str();
  ram->add_option("--out", ram_cmd.out, "report JSON path")->required();
  ram->add_option("--correlation-csv", ram_cmd.correlation_csv,
                  "density correlation series CSV");
  ram->add_option("--correlation-json", ram_cmd.correlation_json,
                  "density correlation report JSON");

  RegressCmd regress_cmd;
  auto* analyze = app.add_subcommand("analyze", "accuracy-drop analysis");
  analyze->require_subcommand(1);
  auto* regress = analyze->add_subcommand("regress", "cross-validated regressor suite");
  regress->add_option("--records", regress_cmd.records, "accuracy CSV")->required();
  regress->add_option("--features", regress_cmd.features, "topometric feature CSV")->required();
  regress->add_option("--scenario", regress_cmd.scenario,
                      "sparsity:<value> | architecture:<name>")
      ->required();
  regress->add_option("--k-folds", regress_cmd.k_folds, "folds per run")->capture_default_str();
  regress->add_option("--runs", regress_cmd.runs, "shuffled repetitions")->capture_default_str();
  regress->add_flag("--include-bayesian", regress_cmd.include_bayesian,
                    "add bayesian-ridge and ard to the suite");
  regress->add_option("--out", regress_cmd.out, "report JSON path")->required();
  regress->add_option("--importance", regress_cmd.importance, "feature importance CSV path");

  RankCmd rank_cmd;
  RankEvalCmd rank_eval_cmd;
  auto* rank = app.add_subcommand("rank", "rank algorithms by weighted topometrics");
  rank->add_option("--topometrics", rank_cmd.topometrics,
                   "CSV: name column then feature columns");
  rank->add_option("--importance-arch", rank_cmd.importance_arch,
                   "architecture-scenario importance values");
  rank->add_option("--importance-sparsity", rank_cmd.importance_sparsity,
                   "sparsity-scenario importance values");
  rank->add_flag("--no-normalize", rank_cmd.no_normalize, "skip per-feature min-max scaling");
  rank->add_option("--out", rank_cmd.out, "ranking JSON path");
  auto* rank_eval = rank->add_subcommand("eval", "score strategies against ground truth");
  rank_eval->add_option("--records", rank_eval_cmd.records, "accuracy CSV")->required();
  rank_eval->add_option("--strategies", rank_eval_cmd.strategies,
                        "strategy JSON file or directory")
      ->required();
  rank_eval->add_option("--out", rank_eval_cmd.out, "evaluation CSV path")->required();
  rank_eval->add_option("--json", rank_eval_cmd.json_out, "evaluation JSON path");

  FixturesCmd fixtures_cmd;
  auto* fixtures = app.add_subcommand("fixtures", "install bundled reference data");
  fixtures->add_option("--out", fixtures_cmd.out, "target directory")->required();

  PipelineCmd pipeline_cmd;
  auto* pipeline = app.add_subcommand("pipeline", "mask -> graph -> metrics with a manifest");
  add_arch_options(pipeline, pipeline_cmd.spec.arch);
  pipeline->add_option("--method", pipeline_cmd.spec.method, "uniform | er | erk")->required();
  pipeline->add_option("--sparsity", pipeline_cmd.spec.sparsity, "fraction removed")->required();
  pipeline->add_option("--weights", pipeline_cmd.spec.weights,
                       "attach weights: gaussian-fan-in | unit-magnitude");
  pipeline->add_option("--groups", pipeline_cmd.groups, "metric groups");
  pipeline->add_flag("--exclude-padding", pipeline_cmd.exclude_padding,
                     "drop padding nodes before measuring");
  pipeline->add_option("--format", pipeline_cmd.format, "graph format: csr | edgelist")
      ->capture_default_str();
  pipeline->add_option("--out", pipeline_cmd.out, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  std::string command_line;
  for (int i = 0; i < argc; ++i) {
    if (i) command_line += ' ';
    command_line += argv[i];
  }

  try {
    if (mask->parsed()) run_mask(mask_cmd, g);
    if (encode->parsed()) run_encode(encode_cmd, g);
    if (metrics->parsed()) run_metrics(metrics_cmd, g);
    if (ram->parsed()) run_ramanujan(ram_cmd, g);
    if (analyze->parsed()) run_regress(regress_cmd, g);
    if (rank->parsed()) {
      if (rank_eval->parsed())
        run_rank_eval(rank_eval_cmd, g);
      else
        run_rank(rank_cmd, g);
    }
    if (fixtures->parsed()) run_fixtures(fixtures_cmd);
    if (pipeline->parsed()) run_pipeline(pipeline_cmd, g, command_line);
  } catch (const StageError& e) {
    remove_partial_outputs();
    std::cerr << "error[" << e.stage << "]: " << e.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    remove_partial_outputs();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  forget_outputs();
  return 0;
}
