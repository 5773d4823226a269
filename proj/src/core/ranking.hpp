#pragma once
// Mixture ranking of pruning algorithms and rank-biased-overlap evaluation
// against accuracy-derived ground truth.

#include <string>
#include <vector>

#include "analysis.hpp"
#include "common.hpp"

namespace snntopo {

// sum of x_i * (wm_i + ws_i) / 2
double ranking_coefficient(const std::vector<double>& x, const std::vector<double>& wm,
                           const std::vector<double>& ws);

struct RankingInput {
  std::string name;
  std::vector<double> topometrics;
};

// Per feature across algorithms, map to [0,1]; constant features go to 0.
void minmax_normalize(std::vector<RankingInput>& inputs);

struct RankedEntry {
  std::string name;
  double coefficient = 0.0;
  bool tied = false;  // equal coefficient with a neighbor, broken by name
};

struct RankedList {
  std::vector<RankedEntry> entries;  // ascending coefficient
  bool any_tie = false;
};

RankedList rank_algorithms(const std::vector<RankingInput>& inputs,
                           const std::vector<double>& wm, const std::vector<double>& ws);

// Generic scalar-score ranking used for the baseline strategies.
RankedList ranked_from_scores(const std::vector<std::string>& names,
                              const std::vector<double>& scores, bool ascending);

std::vector<std::string> ranked_names(const RankedList& r);
std::string ranking_json(const RankedList& r);

// Truncated rank-biased overlap: (1-alpha) * sum_{d=1..D} alpha^(d-1) * |a_d n b_d| / d
// with D = min length. `residual` is the weight alpha^D the truncation leaves out.
struct RboResult {
  double value = 0.0;
  double residual = 0.0;
  u32 depth = 0;
};

RboResult rbo_truncated(const std::vector<std::string>& a, const std::vector<std::string>& b,
                        double alpha);
double rbo(const std::vector<std::string>& a, const std::vector<std::string>& b, double alpha);
double rbo_mean(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Descending mean accuracy over matching records; ties by lower std, then name.
std::vector<std::string> ground_truth_ranking(const std::vector<AccuracyRecord>& records,
                                              const std::string& architecture, double sparsity,
                                              const std::string& dataset);

struct StrategyCellList {
  std::string architecture;
  double sparsity = 0.0;
  std::vector<std::string> ranking;
};

struct StrategyRankings {
  std::string name;
  std::vector<StrategyCellList> cells;
};

struct EvalCell {
  std::string strategy;
  std::string architecture;
  double sparsity = 0.0;
  double rbo_mean_value = 0.0;  // averaged over datasets
  u32 n_datasets = 0;
};

struct EvalTable {
  std::vector<EvalCell> cells;
};

// Scores every strategy cell against the per-dataset accuracy ground truth.
// Lists are intersected onto the common algorithm set before comparison.
EvalTable evaluate_strategies(const std::vector<AccuracyRecord>& records,
                              const std::vector<StrategyRankings>& strategies);

std::string eval_csv(const EvalTable& t);
std::string eval_json(const EvalTable& t);

}  // namespace snntopo
