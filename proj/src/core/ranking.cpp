#include "ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace snntopo {

double ranking_coefficient(const std::vector<double>& x, const std::vector<double>& wm,
                           const std::vector<double>& ws) {
  require(x.size() == wm.size() && x.size() == ws.size(), errc::invalid_argument,
          "ranking vectors must share length");
  double r = 0.0;
  for (size_t i = 0; i < x.size(); ++i) r += x[i] * (wm[i] + ws[i]) / 2.0;
  return r;
}

void minmax_normalize(std::vector<RankingInput>& inputs) {
  if (inputs.empty()) return;
  const size_t p = inputs[0].topometrics.size();
  for (const auto& in : inputs) {
    require(in.topometrics.size() == p, errc::invalid_argument,
            "inconsistent topometric lengths");
  }
  for (size_t j = 0; j < p; ++j) {
    double lo = inputs[0].topometrics[j], hi = lo;
    for (const auto& in : inputs) {
      lo = std::min(lo, in.topometrics[j]);
      hi = std::max(hi, in.topometrics[j]);
    }
    for (auto& in : inputs) {
      in.topometrics[j] = hi > lo ? (in.topometrics[j] - lo) / (hi - lo) : 0.0;
    }
  }
}

RankedList ranked_from_scores(const std::vector<std::string>& names,
                              const std::vector<double>& scores, bool ascending) {
  require(names.size() == scores.size(), errc::invalid_argument, "names/scores length mismatch");
  require(names.size() >= 2, errc::invalid_argument, "need at least two algorithms to rank");
  RankedList out;
  out.entries.resize(names.size());
  for (size_t i = 0; i < names.size(); ++i) out.entries[i] = {names[i], scores[i], false};
  std::sort(out.entries.begin(), out.entries.end(), [&](const RankedEntry& a, const RankedEntry& b) {
    if (a.coefficient != b.coefficient) {
      return ascending ? a.coefficient < b.coefficient : a.coefficient > b.coefficient;
    }
    return a.name < b.name;
  });
  for (size_t i = 0; i + 1 < out.entries.size(); ++i) {
    if (out.entries[i].coefficient == out.entries[i + 1].coefficient) {
      out.entries[i].tied = out.entries[i + 1].tied = true;
      out.any_tie = true;
    }
  }
  return out;
}

RankedList rank_algorithms(const std::vector<RankingInput>& inputs,
                           const std::vector<double>& wm, const std::vector<double>& ws) {
  require(inputs.size() >= 2, errc::invalid_argument, "need at least two algorithms to rank");
  std::vector<std::string> names;
  std::vector<double> scores;
  for (const auto& in : inputs) {
    names.push_back(in.name);
    scores.push_back(ranking_coefficient(in.topometrics, wm, ws));
  }
  return ranked_from_scores(names, scores, /*ascending=*/true);
}

std::vector<std::string> ranked_names(const RankedList& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.name);
  return out;
}

std::string ranking_json(const RankedList& r) {
  nlohmann::json j;
  j["any_tie"] = r.any_tie;
  j["ranking"] = nlohmann::json::array();
  for (const auto& e : r.entries) {
    j["ranking"].push_back({{"name", e.name}, {"coefficient", e.coefficient}, {"tied", e.tied}});
  }
  return j.dump(2);
}

RboResult rbo_truncated(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        double alpha) {
  require(alpha > 0.0 && alpha < 1.0, errc::invalid_argument, "alpha must be in (0,1)");
  auto check_unique = [](const std::vector<std::string>& v) {
    std::set<std::string> seen(v.begin(), v.end());
    require(seen.size() == v.size(), errc::invalid_argument, "ranked list has duplicates");
  };
  check_unique(a);
  check_unique(b);
  const u32 depth = static_cast<u32>(std::min(a.size(), b.size()));
  RboResult res;
  res.depth = depth;
  res.residual = std::pow(alpha, static_cast<double>(depth));
  std::set<std::string> in_a, in_b;
  u32 overlap = 0;
  double weight = 1.0;  // alpha^(d-1)
  for (u32 d = 1; d <= depth; ++d) {
    const std::string& xa = a[d - 1];
    const std::string& xb = b[d - 1];
    if (xa == xb) {
      ++overlap;
    } else {
      if (in_b.count(xa)) ++overlap;
      if (in_a.count(xb)) ++overlap;
      in_a.insert(xa);
      in_b.insert(xb);
    }
    res.value += weight * static_cast<double>(overlap) / d;
    weight *= alpha;
  }
  res.value *= (1.0 - alpha);
  return res;
}

double rbo(const std::vector<std::string>& a, const std::vector<std::string>& b, double alpha) {
  return rbo_truncated(a, b, alpha).value;
}

double rbo_mean(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return (rbo(a, b, 0.25) + rbo(a, b, 0.5) + rbo(a, b, 0.75)) / 3.0;
}

std::vector<std::string> ground_truth_ranking(const std::vector<AccuracyRecord>& records,
                                              const std::string& architecture, double sparsity,
                                              const std::string& dataset) {
  struct Agg {
    double sum = 0.0, sum_sq = 0.0, std_col = 0.0;
    u32 n = 0;
    bool has_std_col = false;
  };
  std::map<std::string, Agg> by_alg;
  for (const auto& r : records) {
    if (r.architecture != architecture || r.dataset != dataset ||
        std::abs(r.sparsity - sparsity) > 1e-9) {
      continue;
    }
    auto& a = by_alg[r.algorithm];
    a.sum += r.acc;
    a.sum_sq += r.acc * r.acc;
    ++a.n;
    if (r.has_std) {
      a.has_std_col = true;
      a.std_col = std::max(a.std_col, r.acc_std);
    }
  }
  require(!by_alg.empty(), errc::invalid_argument,
          "no records for " + architecture + "/" + dataset + "/s=" + std::to_string(sparsity));
  struct Row {
    std::string name;
    double mean, dev;
  };
  std::vector<Row> rows;
  for (auto& [name, a] : by_alg) {
    double mean = a.sum / a.n;
    double dev;
    if (a.has_std_col) {
      dev = a.std_col;  // published spread, single aggregated row
    } else {
      double var = a.n > 1 ? (a.sum_sq - a.sum * a.sum / a.n) / (a.n - 1) : 0.0;
      dev = std::sqrt(std::max(0.0, var));
    }
    rows.push_back({name, mean, dev});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.mean != y.mean) return x.mean > y.mean;
    if (x.dev != y.dev) return x.dev < y.dev;
    return x.name < y.name;
  });
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.name);
  return out;
}

namespace {

std::vector<std::string> intersect_keep_order(const std::vector<std::string>& list,
                                              const std::set<std::string>& universe) {
  std::vector<std::string> out;
  for (const auto& s : list) {
    if (universe.count(s)) out.push_back(s);
  }
  return out;
}

}  // namespace

EvalTable evaluate_strategies(const std::vector<AccuracyRecord>& records,
                              const std::vector<StrategyRankings>& strategies) {
  EvalTable table;
  for (const auto& strat : strategies) {
    for (const auto& cell : strat.cells) {
      std::set<std::string> datasets;
      for (const auto& r : records) {
        if (r.architecture == cell.architecture && std::abs(r.sparsity - cell.sparsity) <= 1e-9) {
          datasets.insert(r.dataset);
        }
      }
      require(!datasets.empty(), errc::invalid_argument,
              "no accuracy records for " + cell.architecture + "/s=" +
                  std::to_string(cell.sparsity));
      double acc = 0.0;
      for (const auto& ds : datasets) {
        auto truth = ground_truth_ranking(records, cell.architecture, cell.sparsity, ds);
        std::set<std::string> in_truth(truth.begin(), truth.end());
        std::set<std::string> in_strategy(cell.ranking.begin(), cell.ranking.end());
        std::set<std::string> common;
        for (const auto& s : in_truth) {
          if (in_strategy.count(s)) common.insert(s);
        }
        require(common.size() >= 2, errc::invalid_argument,
                "fewer than two shared algorithms for " + cell.architecture + "/" + ds);
        auto lhs = intersect_keep_order(cell.ranking, common);
        auto rhs = intersect_keep_order(truth, common);
        acc += rbo_mean(lhs, rhs);
      }
      EvalCell out;
      out.strategy = strat.name;
      out.architecture = cell.architecture;
      out.sparsity = cell.sparsity;
      out.n_datasets = static_cast<u32>(datasets.size());
      out.rbo_mean_value = acc / static_cast<double>(datasets.size());
      table.cells.push_back(std::move(out));
    }
  }
  return table;
}

std::string eval_csv(const EvalTable& t) {
  std::string s = "strategy,architecture,sparsity,rbo_mean,n_datasets\n";
  for (const auto& c : t.cells) {
    s += c.strategy + ',' + c.architecture + ',' + double_repr(c.sparsity) + ',' +
         double_repr(c.rbo_mean_value) + ',' + std::to_string(c.n_datasets) + '\n';
  }
  return s;
}

std::string eval_json(const EvalTable& t) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : t.cells) {
    j.push_back({{"strategy", c.strategy},
                 {"architecture", c.architecture},
                 {"sparsity", c.sparsity},
                 {"rbo_mean", c.rbo_mean_value},
                 {"n_datasets", c.n_datasets}});
  }
  return j.dump(2);
}

}  // namespace snntopo
