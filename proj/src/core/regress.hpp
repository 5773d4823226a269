#pragma once
// Linear regression suite. Every fit centers the data internally, so the
// intercept never participates in penalties. X is row-major n*p.

#include <string>
#include <vector>

#include "common.hpp"

namespace snntopo {

enum class RegressorKind {
  LeastSquares,
  Ridge,
  Lasso,
  ElasticNet,
  Huber,
  PCR,
  BayesianRidge,
  Ard,
};

const char* regressor_name(RegressorKind k);

// The two evidence-maximization variants are optional extras.
std::vector<RegressorKind> regressor_suite(bool include_bayesian);

struct RegressorConfig {
  double ridge_alpha = 1.0;
  double lasso_alpha = 1e-3;
  double enet_alpha = 1e-3;
  double enet_l1_ratio = 0.5;
  double huber_delta = 1.35;  // in robust-scale units
  u32 pcr_components = 8;     // capped at p
  u32 max_iter = 1000;
  double tol = 1e-8;
};

struct LinearModel {
  std::vector<double> coef;
  double intercept = 0.0;
  bool ridge_fallback = false;  // least-squares system was singular
};

LinearModel fit_regressor(RegressorKind kind, const std::vector<double>& X,
                          const std::vector<double>& y, u64 n, u32 p,
                          const RegressorConfig& cfg);

double predict_one(const LinearModel& m, const double* x, u32 p);
void predict(const LinearModel& m, const std::vector<double>& X, u64 n, u32 p,
             std::vector<double>& out);

}  // namespace snntopo
