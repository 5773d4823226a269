#pragma once
// Accuracy-drop regression harness: CSV ingestion, scenario slicing,
// dataset-stratified k-fold CV repeated over seeded runs, and Pearson
// feature-importance extraction from the fitted suite.

#include <string>
#include <vector>

#include "common.hpp"
#include "regress.hpp"

namespace snntopo {

struct AccuracyRecord {
  std::string architecture, dataset, algorithm;
  double sparsity = 0.0;
  u32 run = 0;
  double acc = 0.0;        // percentage
  double acc_dense = 0.0;  // percentage, same (architecture, dataset)
  double acc_std = 0.0;
  bool has_std = false;
};

// header: architecture,dataset,algorithm,sparsity,run,acc,acc_dense[,acc_std]
std::vector<AccuracyRecord> parse_accuracy_csv(const std::string& text);
std::string accuracy_csv(const std::vector<AccuracyRecord>& records);

// 1 - acc_sparse/acc_dense; negative when pruning helps
double accuracy_drop(double acc_sparse, double acc_dense);

struct AnalysisRecord {
  AccuracyRecord acc;
  std::vector<double> features;
};

// feature rows keyed by (architecture, algorithm, sparsity)
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> architecture, algorithm;
  std::vector<double> sparsity;
  std::vector<std::vector<double>> values;
};

// header: architecture,algorithm,sparsity,<feature...>
FeatureTable parse_feature_csv(const std::string& text);
std::vector<AnalysisRecord> join_records(const std::vector<AccuracyRecord>& acc,
                                         const FeatureTable& table);

struct Scenario {
  enum class Kind { SparsityFixed, ArchitectureFixed };
  Kind kind = Kind::SparsityFixed;
  double sparsity = 0.0;
  std::string architecture;
};

Scenario parse_scenario(const std::string& text);  // "sparsity:0.9" | "architecture:conv6"
std::string scenario_name(const Scenario& s);

struct AnalysisConfig {
  u32 k_folds = 5;
  u32 runs = 100;
  u64 seed = 1;
  u32 workers = 0;
  bool include_bayesian = false;
  RegressorConfig reg;
  // importance averaging weights, one per suite member; empty = equal
  std::vector<double> regressor_weights;
};

struct RegressorSummary {
  std::string name;
  double r2_mean = 0.0;
  bool adj_r2_defined = false;  // slice has n > p+1
  double adj_r2_mean = 0.0;
  double adj_r2_std = 0.0;
  double mae_mean = 0.0;
  u64 ridge_fallbacks = 0;  // fold fits that hit a singular system
};

struct AnalysisReport {
  std::string scenario;
  u64 n_records = 0;
  u32 n_features = 0;   // incoming feature count
  u32 n_features_used = 0;  // after constant-column drops
  std::vector<std::string> feature_names;
  std::vector<u8> feature_dropped;  // constant in this slice
  std::vector<RegressorSummary> regressors;
  std::vector<double> importance;     // mean Pearson r(feature, prediction)
  std::vector<u8> importance_defined;
};

AnalysisReport run_regression(const std::vector<AnalysisRecord>& records, const Scenario& scenario,
                              const AnalysisConfig& cfg,
                              const std::vector<std::string>& feature_names = {});

std::string analysis_json(const AnalysisReport& r);
std::string importance_csv(const AnalysisReport& r);

}  // namespace snntopo
