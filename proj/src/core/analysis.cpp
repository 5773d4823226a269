#include "analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "parallel.hpp"
#include "ramanujan.hpp"  // pearson

namespace snntopo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, u64 line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), errc::parse_error,
          "bad numeric field '" + s + "' on line " + std::to_string(line_no));
  return v;
}

u32 parse_u32(const std::string& s, u64 line_no) {
  u32 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), errc::parse_error,
          "bad integer field '" + s + "' on line " + std::to_string(line_no));
  return v;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string line =
        nl == std::string::npos ? text.substr(start) : text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return lines;
}

constexpr const char* kAccuracyHeader = "architecture,dataset,algorithm,sparsity,run,acc,acc_dense";

}  // namespace

std::vector<AccuracyRecord> parse_accuracy_csv(const std::string& text) {
  auto lines = csv_lines(text);
  require(!lines.empty(), errc::parse_error, "empty accuracy table");
  bool with_std = lines[0] == std::string(kAccuracyHeader) + ",acc_std";
  require(with_std || lines[0] == kAccuracyHeader, errc::parse_error,
          "accuracy table header must be '" + std::string(kAccuracyHeader) + "[,acc_std]'");
  std::vector<AccuracyRecord> out;
  for (u64 i = 1; i < lines.size(); ++i) {
    auto f = split_csv_line(lines[i]);
    require(f.size() == (with_std ? 8u : 7u), errc::parse_error,
            "wrong field count on line " + std::to_string(i + 1));
    AccuracyRecord r;
    r.architecture = f[0];
    r.dataset = f[1];
    r.algorithm = f[2];
    r.sparsity = parse_double(f[3], i + 1);
    r.run = parse_u32(f[4], i + 1);
    r.acc = parse_double(f[5], i + 1);
    r.acc_dense = parse_double(f[6], i + 1);
    if (with_std) {
      r.acc_std = parse_double(f[7], i + 1);
      r.has_std = true;
    }
    require(r.sparsity >= 0.0 && r.sparsity < 1.0, errc::invalid_argument,
            "sparsity out of [0,1) on line " + std::to_string(i + 1));
    require(r.acc >= 0.0 && r.acc <= 100.0 && r.acc_dense >= 0.0 && r.acc_dense <= 100.0,
            errc::invalid_argument, "accuracy out of [0,100] on line " + std::to_string(i + 1));
    out.push_back(std::move(r));
  }
  return out;
}

std::string accuracy_csv(const std::vector<AccuracyRecord>& records) {
  bool with_std = !records.empty() && records[0].has_std;
  std::string s = kAccuracyHeader;
  if (with_std) s += ",acc_std";
  s += '\n';
  for (const auto& r : records) {
    s += r.architecture + ',' + r.dataset + ',' + r.algorithm + ',';
    s += double_repr(r.sparsity) + ',' + std::to_string(r.run) + ',' + double_repr(r.acc) + ',' +
         double_repr(r.acc_dense);
    if (with_std) s += ',' + double_repr(r.acc_std);
    s += '\n';
  }
  return s;
}

double accuracy_drop(double acc_sparse, double acc_dense) {
  require(acc_dense > 0.0, errc::invalid_argument, "dense accuracy must be positive");
  return 1.0 - acc_sparse / acc_dense;
}

FeatureTable parse_feature_csv(const std::string& text) {
  auto lines = csv_lines(text);
  require(!lines.empty(), errc::parse_error, "empty feature table");
  auto head = split_csv_line(lines[0]);
  require(head.size() > 3 && head[0] == "architecture" && head[1] == "algorithm" &&
              head[2] == "sparsity",
          errc::parse_error, "feature table header must start architecture,algorithm,sparsity");
  FeatureTable t;
  t.feature_names.assign(head.begin() + 3, head.end());
  for (u64 i = 1; i < lines.size(); ++i) {
    auto f = split_csv_line(lines[i]);
    require(f.size() == head.size(), errc::parse_error,
            "wrong field count on line " + std::to_string(i + 1));
    t.architecture.push_back(f[0]);
    t.algorithm.push_back(f[1]);
    t.sparsity.push_back(parse_double(f[2], i + 1));
    std::vector<double> vals(f.size() - 3);
    for (size_t j = 3; j < f.size(); ++j) vals[j - 3] = parse_double(f[j], i + 1);
    t.values.push_back(std::move(vals));
  }
  return t;
}

std::vector<AnalysisRecord> join_records(const std::vector<AccuracyRecord>& acc,
                                         const FeatureTable& table) {
  std::map<std::string, std::vector<size_t>> index;
  for (size_t i = 0; i < table.values.size(); ++i) {
    index[table.architecture[i] + '\x1f' + table.algorithm[i]].push_back(i);
  }
  std::vector<AnalysisRecord> out;
  for (const auto& a : acc) {
    auto it = index.find(a.architecture + '\x1f' + a.algorithm);
    size_t found = table.values.size();
    if (it != index.end()) {
      for (size_t i : it->second) {
        if (std::abs(table.sparsity[i] - a.sparsity) <= 1e-9) {
          require(found == table.values.size(), errc::invalid_argument,
                  "duplicate feature row for " + a.architecture + "/" + a.algorithm);
          found = i;
        }
      }
    }
    require(found != table.values.size(), errc::invalid_argument,
            "no feature row for " + a.architecture + "/" + a.algorithm + "/s=" +
                std::to_string(a.sparsity));
    out.push_back({a, table.values[found]});
  }
  return out;
}

Scenario parse_scenario(const std::string& text) {
  size_t colon = text.find(':');
  require(colon != std::string::npos, errc::parse_error,
          "scenario must be sparsity:<value> or architecture:<name>");
  std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
  Scenario s;
  if (kind == "sparsity") {
    s.kind = Scenario::Kind::SparsityFixed;
    s.sparsity = parse_double(arg, 1);
  } else if (kind == "architecture") {
    s.kind = Scenario::Kind::ArchitectureFixed;
    require(!arg.empty(), errc::parse_error, "architecture scenario needs a name");
    s.architecture = arg;
  } else {
    require(false, errc::parse_error, "unknown scenario kind '" + kind + "'");
  }
  return s;
}

std::string scenario_name(const Scenario& s) {
  if (s.kind == Scenario::Kind::SparsityFixed) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "sparsity:%g", s.sparsity);
    return buf;
  }
  return "architecture:" + s.architecture;
}

namespace {

struct RunResult {
  // per regressor
  std::vector<double> r2, adj, mae;
  std::vector<u64> fallbacks;
  // per regressor x feature (original indexing)
  std::vector<std::vector<double>> importance;
  std::vector<std::vector<u8>> importance_defined;
};

// dataset-stratified fold assignment; a rolling counter keeps fold sizes
// within one of each other while every dataset spreads across folds
std::vector<u32> assign_folds(const std::vector<const AnalysisRecord*>& slice, u32 k, Rng& rng) {
  std::map<std::string, std::vector<u32>> groups;
  for (u32 i = 0; i < slice.size(); ++i) groups[slice[i]->acc.dataset].push_back(i);
  std::vector<u32> fold(slice.size(), 0);
  u64 c = 0;
  for (auto& [name, members] : groups) {
    for (size_t i = members.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(rng.below(i));
      std::swap(members[i - 1], members[j]);
    }
    for (u32 idx : members) fold[idx] = static_cast<u32>(c++ % k);
  }
  return fold;
}

}  // namespace

AnalysisReport run_regression(const std::vector<AnalysisRecord>& records, const Scenario& scenario,
                              const AnalysisConfig& cfg,
                              const std::vector<std::string>& feature_names) {
  std::vector<const AnalysisRecord*> slice;
  for (const auto& r : records) {
    bool keep = scenario.kind == Scenario::Kind::SparsityFixed
                    ? std::abs(r.acc.sparsity - scenario.sparsity) <= 1e-9
                    : r.acc.architecture == scenario.architecture;
    if (keep) slice.push_back(&r);
  }
  const u64 n = slice.size();
  require(cfg.k_folds >= 2, errc::invalid_argument, "need at least 2 folds");
  require(n >= cfg.k_folds, errc::invalid_argument,
          "scenario slice has " + std::to_string(n) + " records, fewer than k");
  const u32 p0 = static_cast<u32>(slice[0]->features.size());
  for (const auto* r : slice) {
    require(r->features.size() == p0, errc::invalid_argument, "inconsistent feature counts");
    for (double v : r->features) {
      require(std::isfinite(v), errc::invalid_argument, "non-finite feature value");
    }
  }

  std::vector<double> y(n);
  for (u64 i = 0; i < n; ++i) y[i] = accuracy_drop(slice[i]->acc.acc, slice[i]->acc.acc_dense);
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  double sst = 0.0;
  for (double v : y) sst += (v - y_mean) * (v - y_mean);
  require(sst > 0.0, errc::invalid_argument, "accuracy drop is constant in this slice");

  // constant columns cannot be min-max scaled or fit; drop and flag
  std::vector<u8> dropped(p0, 0);
  std::vector<u32> kept;
  for (u32 j = 0; j < p0; ++j) {
    double lo = slice[0]->features[j], hi = lo;
    for (const auto* r : slice) {
      lo = std::min(lo, r->features[j]);
      hi = std::max(hi, r->features[j]);
    }
    if (hi > lo) {
      kept.push_back(j);
    } else {
      dropped[j] = 1;
    }
  }
  const u32 p = static_cast<u32>(kept.size());
  require(p > 0, errc::invalid_argument, "every feature is constant in this slice");

  auto suite = regressor_suite(cfg.include_bayesian);
  const u32 nreg = static_cast<u32>(suite.size());
  std::vector<double> weights = cfg.regressor_weights;
  if (weights.empty()) weights.assign(nreg, 1.0);
  require(weights.size() == nreg, errc::invalid_argument,
          "regressor_weights must match the suite size");
  double wsum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, errc::invalid_argument, "regressor weights must be nonnegative");
    wsum += w;
  }
  require(wsum > 0.0, errc::invalid_argument, "regressor weights sum to zero");

  const bool adj_defined = n > static_cast<u64>(p) + 1;
  std::vector<RunResult> runs(cfg.runs);

  parallel_for(cfg.runs, cfg.workers, [&](u64 run) {
    Rng rng(splitmix64(cfg.seed ^ splitmix64(run + 0x517)));
    auto fold = assign_folds(slice, cfg.k_folds, rng);
    RunResult res;
    res.r2.assign(nreg, 0.0);
    res.adj.assign(nreg, 0.0);
    res.mae.assign(nreg, 0.0);
    res.fallbacks.assign(nreg, 0);
    res.importance.assign(nreg, std::vector<double>(p0, 0.0));
    res.importance_defined.assign(nreg, std::vector<u8>(p0, 0));
    std::vector<std::vector<double>> pred(nreg, std::vector<double>(n, 0.0));

    for (u32 f = 0; f < cfg.k_folds; ++f) {
      std::vector<u64> train, test;
      for (u64 i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);
      if (test.empty()) continue;
      // min-max on the train fold only
      std::vector<double> lo(p, 0.0), scale(p, 0.0);
      for (u32 j = 0; j < p; ++j) {
        double mn = slice[train[0]]->features[kept[j]], mx = mn;
        for (u64 i : train) {
          mn = std::min(mn, slice[i]->features[kept[j]]);
          mx = std::max(mx, slice[i]->features[kept[j]]);
        }
        lo[j] = mn;
        scale[j] = mx > mn ? 1.0 / (mx - mn) : 0.0;
      }
      auto scaled_row = [&](u64 i, std::vector<double>& out, u64 at) {
        for (u32 j = 0; j < p; ++j) {
          out[at * p + j] = (slice[i]->features[kept[j]] - lo[j]) * scale[j];
        }
      };
      std::vector<double> Xtr(train.size() * p), ytr(train.size());
      for (u64 t = 0; t < train.size(); ++t) {
        scaled_row(train[t], Xtr, t);
        ytr[t] = y[train[t]];
      }
      std::vector<double> Xte(test.size() * p);
      for (u64 t = 0; t < test.size(); ++t) scaled_row(test[t], Xte, t);
      for (u32 r = 0; r < nreg; ++r) {
        auto model = fit_regressor(suite[r], Xtr, ytr, train.size(), p, cfg.reg);
        if (model.ridge_fallback) ++res.fallbacks[r];
        for (u64 t = 0; t < test.size(); ++t) {
          pred[r][test[t]] = predict_one(model, &Xte[t * p], p);
        }
      }
    }

    for (u32 r = 0; r < nreg; ++r) {
      double sse = 0.0, abs_err = 0.0;
      for (u64 i = 0; i < n; ++i) {
        double e = y[i] - pred[r][i];
        sse += e * e;
        abs_err += std::abs(e);
      }
      res.r2[r] = 1.0 - sse / sst;
      res.mae[r] = abs_err / static_cast<double>(n);
      if (adj_defined) {
        res.adj[r] = 1.0 - (1.0 - res.r2[r]) * (static_cast<double>(n) - 1.0) /
                               (static_cast<double>(n) - p - 1.0);
      }
      for (u32 j = 0; j < p0; ++j) {
        if (dropped[j]) continue;
        std::vector<double> feat(n);
        for (u64 i = 0; i < n; ++i) feat[i] = slice[i]->features[j];
        bool defined = false;
        double rho = pearson(feat, pred[r], &defined);
        res.importance[r][j] = defined ? rho : 0.0;
        res.importance_defined[r][j] = defined ? 1 : 0;
      }
    }
    runs[run] = std::move(res);
  });

  AnalysisReport rep;
  rep.scenario = scenario_name(scenario);
  rep.n_records = n;
  rep.n_features = p0;
  rep.n_features_used = p;
  rep.feature_dropped = dropped;
  if (!feature_names.empty()) {
    require(feature_names.size() == p0, errc::invalid_argument,
            "feature_names length mismatch");
    rep.feature_names = feature_names;
  } else {
    for (u32 j = 0; j < p0; ++j) rep.feature_names.push_back("f" + std::to_string(j));
  }

  const double nr = static_cast<double>(cfg.runs);
  for (u32 r = 0; r < nreg; ++r) {
    RegressorSummary s;
    s.name = regressor_name(suite[r]);
    s.adj_r2_defined = adj_defined;
    double adj_sum = 0.0, adj_sq = 0.0;
    for (const auto& run : runs) {
      s.r2_mean += run.r2[r];
      s.mae_mean += run.mae[r];
      s.ridge_fallbacks += run.fallbacks[r];
      adj_sum += run.adj[r];
      adj_sq += run.adj[r] * run.adj[r];
    }
    s.r2_mean /= nr;
    s.mae_mean /= nr;
    if (adj_defined) {
      s.adj_r2_mean = adj_sum / nr;
      if (cfg.runs > 1) {
        double var = (adj_sq - adj_sum * adj_sum / nr) / (nr - 1.0);
        s.adj_r2_std = std::sqrt(std::max(0.0, var));
      }
    }
    rep.regressors.push_back(std::move(s));
  }

  rep.importance.assign(p0, 0.0);
  rep.importance_defined.assign(p0, 0);
  for (u32 j = 0; j < p0; ++j) {
    if (dropped[j]) continue;
    double acc = 0.0;
    bool any = false;
    for (u32 r = 0; r < nreg; ++r) {
      double mean_r = 0.0;
      for (const auto& run : runs) {
        mean_r += run.importance[r][j];
        any = any || run.importance_defined[r][j];
      }
      acc += weights[r] * (mean_r / nr);
    }
    rep.importance[j] = acc / wsum;
    rep.importance_defined[j] = any ? 1 : 0;
  }
  return rep;
}

std::string analysis_json(const AnalysisReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["n_records"] = r.n_records;
  j["n_features"] = r.n_features;
  j["n_features_used"] = r.n_features_used;
  j["regressors"] = nlohmann::json::array();
  for (const auto& s : r.regressors) {
    nlohmann::json e;
    e["name"] = s.name;
    e["r2_mean"] = s.r2_mean;
    if (s.adj_r2_defined) {
      e["adj_r2_mean"] = s.adj_r2_mean;
      e["adj_r2_std"] = s.adj_r2_std;
    } else {
      e["adj_r2_defined"] = false;
    }
    e["mae_mean"] = s.mae_mean;
    e["ridge_fallbacks"] = s.ridge_fallbacks;
    j["regressors"].push_back(std::move(e));
  }
  j["features"] = nlohmann::json::array();
  for (u32 i = 0; i < r.n_features; ++i) {
    j["features"].push_back({{"name", r.feature_names[i]},
                             {"importance", r.importance[i]},
                             {"defined", r.importance_defined[i] != 0},
                             {"dropped", r.feature_dropped[i] != 0}});
  }
  return j.dump(2);
}

std::string importance_csv(const AnalysisReport& r) {
  std::string s = "feature,importance,defined,dropped\n";
  char buf[16];
  for (u32 i = 0; i < r.n_features; ++i) {
    std::snprintf(buf, sizeof buf, ",%d,%d\n", r.importance_defined[i] ? 1 : 0,
                  r.feature_dropped[i] ? 1 : 0);
    s += r.feature_names[i];
    s += ',' + double_repr(r.importance[i]);
    s += buf;
  }
  return s;
}

}  // namespace snntopo
