#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "json.hpp"

#include "core/analysis.hpp"
#include "core/ramanujan.hpp"

using namespace snntopo;

namespace {

const char* kDatasets[3] = {"c10", "c100", "tiny"};

// target must land in [0,1) so it can be encoded as an accuracy pair
AnalysisRecord make_record(u32 i, std::vector<double> features, double drop) {
  AnalysisRecord r;
  r.acc.architecture = "synth";
  r.acc.dataset = kDatasets[i % 3];
  r.acc.algorithm = "alg" + std::to_string(i);
  r.acc.sparsity = 0.9;
  r.acc.run = i;
  r.acc.acc_dense = 100.0;
  r.acc.acc = 100.0 * (1.0 - drop);
  r.features = std::move(features);
  return r;
}

Scenario at_sparsity(double s) {
  Scenario sc;
  sc.kind = Scenario::Kind::SparsityFixed;
  sc.sparsity = s;
  return sc;
}

const RegressorSummary& row(const AnalysisReport& rep, const std::string& name) {
  for (const auto& r : rep.regressors) {
    if (r.name == name) return r;
  }
  REQUIRE(false);
  return rep.regressors.front();
}

}  // namespace

TEST_CASE("accuracy drop endpoints") {
  CHECK(accuracy_drop(93.2, 93.2) == 0.0);
  CHECK(accuracy_drop(0.0, 70.0) == 1.0);
  CHECK(accuracy_drop(83.8, 93.2) == doctest::Approx(0.10086).epsilon(1e-4));
  CHECK(accuracy_drop(95.0, 90.0) < 0.0);
  CHECK_THROWS_AS(accuracy_drop(50.0, 0.0), Error);
}

TEST_CASE("least squares and ridge match normal-equations oracles") {
  Rng rng(0x1234ull);
  const u64 n = 60;
  const u32 p = 4;
  std::vector<double> X(n * p), y(n);
  for (u64 i = 0; i < n; ++i) {
    for (u32 j = 0; j < p; ++j) X[i * p + j] = rng.uniform() * (j + 1.0);
    y[i] = rng.gaussian();
  }
  RegressorConfig cfg;
  auto ols = fit_regressor(RegressorKind::LeastSquares, X, y, n, p, cfg);
  CHECK_FALSE(ols.ridge_fallback);

  Eigen::MatrixXd A(n, p + 1);
  Eigen::VectorXd b(n);
  for (u64 i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (u32 j = 0; j < p; ++j) A(i, j + 1) = X[i * p + j];
    b(i) = y[i];
  }
  Eigen::VectorXd sol = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  CHECK(std::abs(ols.intercept - sol(0)) < 1e-8);
  for (u32 j = 0; j < p; ++j) CHECK(std::abs(ols.coef[j] - sol(j + 1)) < 1e-8);

  // ridge on centered data, penalty off the intercept
  auto ridge = fit_regressor(RegressorKind::Ridge, X, y, n, p, cfg);
  Eigen::MatrixXd Xc(n, p);
  Eigen::VectorXd yc(n), xm(p);
  double ym = b.mean();
  for (u32 j = 0; j < p; ++j) xm(j) = A.col(j + 1).mean();
  for (u64 i = 0; i < n; ++i) {
    yc(i) = y[i] - ym;
    for (u32 j = 0; j < p; ++j) Xc(i, j) = X[i * p + j] - xm(j);
  }
  Eigen::MatrixXd G = Xc.transpose() * Xc + cfg.ridge_alpha * Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd rsol = G.ldlt().solve(Xc.transpose() * yc);
  for (u32 j = 0; j < p; ++j) CHECK(std::abs(ridge.coef[j] - rsol(j)) < 1e-8);
  CHECK(std::abs(ridge.intercept - (ym - rsol.dot(xm))) < 1e-8);
}

TEST_CASE("near-exact linear target clears the harness bar") {
  Rng rng(0x4242ull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 200; ++i) {
    double x1 = rng.uniform() * 0.1, x2 = rng.uniform() * 0.1;
    double drop = 2.0 * x1 + 3.0 * x2 + 1e-6 * rng.gaussian();
    records.push_back(make_record(i, {x1, x2}, drop));
  }
  AnalysisConfig cfg;
  cfg.runs = 100;
  cfg.seed = 9;
  auto rep = run_regression(records, at_sparsity(0.9), cfg);
  CHECK(rep.n_records == 200);
  CHECK(rep.regressors.size() == 6);
  const auto& ols = row(rep, "least-squares");
  REQUIRE(ols.adj_r2_defined);
  CHECK(ols.adj_r2_mean >= 0.99);
  CHECK(ols.mae_mean <= 1e-3);
  for (const auto& s : rep.regressors) {
    CHECK(s.adj_r2_mean >= 0.9);
    CHECK(s.adj_r2_mean <= s.r2_mean + 1e-12);
    CHECK(s.adj_r2_mean <= 1.0 + 1e-12);
  }
  // both features drive the target upward
  CHECK(rep.importance[0] > 0.5);
  CHECK(rep.importance[1] > 0.5);
}

TEST_CASE("noise target scores at zero") {
  Rng rng(0x999ull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 200; ++i) {
    std::vector<double> f(16);
    for (double& v : f) v = rng.uniform();
    records.push_back(make_record(i, std::move(f), 0.3 + 0.4 * rng.uniform()));
  }
  AnalysisConfig cfg;
  cfg.runs = 100;
  cfg.seed = 17;
  auto rep = run_regression(records, at_sparsity(0.9), cfg);
  for (const auto& s : rep.regressors) {
    REQUIRE(s.adj_r2_defined);
    CHECK(s.adj_r2_mean <= 0.05);
    CHECK(s.adj_r2_mean <= s.r2_mean);
    CHECK(s.mae_mean >= 0.0);
  }
}

TEST_CASE("reports are byte-identical under a fixed seed") {
  Rng rng(0x31ull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 40; ++i) {
    double x1 = rng.uniform(), x2 = rng.uniform();
    records.push_back(make_record(i, {x1, x2}, 0.2 + 0.3 * x1 + 0.1 * x2));
  }
  AnalysisConfig cfg;
  cfg.runs = 20;
  cfg.seed = 5;
  auto a = analysis_json(run_regression(records, at_sparsity(0.9), cfg));
  auto b = analysis_json(run_regression(records, at_sparsity(0.9), cfg));
  CHECK(a == b);
  cfg.seed = 6;
  auto c = analysis_json(run_regression(records, at_sparsity(0.9), cfg));
  CHECK(a != c);
  cfg.workers = 3;
  cfg.seed = 5;
  auto d = analysis_json(run_regression(records, at_sparsity(0.9), cfg));
  CHECK(a == d);
}

TEST_CASE("constant columns are dropped and flagged") {
  Rng rng(0x55ull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 50; ++i) {
    double x = rng.uniform();
    records.push_back(make_record(i, {x, 5.0, rng.uniform()}, 0.1 + 0.4 * x));
  }
  AnalysisConfig cfg;
  cfg.runs = 5;
  auto rep = run_regression(records, at_sparsity(0.9), cfg, {"a", "konst", "c"});
  CHECK(rep.n_features == 3);
  CHECK(rep.n_features_used == 2);
  CHECK(rep.feature_dropped[1] == 1);
  CHECK(rep.importance[1] == 0.0);
  CHECK(rep.importance_defined[1] == 0);
  CHECK(rep.feature_names[1] == "konst");
  const auto& ols = row(rep, "least-squares");
  CHECK(ols.adj_r2_defined);
  CHECK(ols.adj_r2_mean > 0.9);
}

TEST_CASE("importance saturates at the sign of a single driver") {
  Rng rng(0x66ull);
  std::vector<AnalysisRecord> up, down;
  for (u32 i = 0; i < 60; ++i) {
    double x = rng.uniform();
    up.push_back(make_record(i, {x}, 0.1 + 0.5 * x));
    down.push_back(make_record(i, {x}, 0.7 - 0.5 * x));
  }
  AnalysisConfig cfg;
  cfg.runs = 10;
  auto rep_up = run_regression(up, at_sparsity(0.9), cfg);
  auto rep_down = run_regression(down, at_sparsity(0.9), cfg);
  CHECK(rep_up.importance[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep_down.importance[0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(rep_up.importance_defined[0] == 1);
}

TEST_CASE("correlated bystander feature scores its correlation with the driver") {
  Rng rng(0x77aull);
  std::vector<AnalysisRecord> records;
  std::vector<double> x1s, x2s;
  for (u32 i = 0; i < 300; ++i) {
    double x1 = rng.uniform();
    double x2 = 0.5 * x1 + 0.5 * rng.uniform();
    x1s.push_back(x1);
    x2s.push_back(x2);
    records.push_back(make_record(i, {x1, x2}, 0.1 + 0.6 * x1));
  }
  AnalysisConfig cfg;
  cfg.runs = 3;
  cfg.regressor_weights = {1, 0, 0, 0, 0, 0};  // exact-fit regressor only
  auto rep = run_regression(records, at_sparsity(0.9), cfg);
  CHECK(rep.importance[0] == doctest::Approx(1.0).epsilon(1e-9));
  double want = pearson(x2s, x1s);
  CHECK(std::abs(rep.importance[1] - want) < 1e-6);
}

TEST_CASE("small wide slices lose the adjusted statistic and flag fallbacks") {
  Rng rng(0x88ull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 16; ++i) {
    std::vector<double> f(16);
    for (double& v : f) v = rng.uniform();
    records.push_back(make_record(i, std::move(f), 0.2 + 0.5 * rng.uniform()));
  }
  AnalysisConfig cfg;
  cfg.runs = 4;
  auto rep = run_regression(records, at_sparsity(0.9), cfg);
  const auto& ols = row(rep, "least-squares");
  CHECK_FALSE(ols.adj_r2_defined);
  CHECK(ols.ridge_fallbacks > 0);  // train folds are thinner than the feature count
  CHECK(std::isfinite(ols.r2_mean));
  CHECK(std::isfinite(ols.mae_mean));
  auto parsed = nlohmann::json::parse(analysis_json(rep));
  CHECK_FALSE(parsed["regressors"][0].contains("adj_r2_mean"));
  CHECK(parsed["regressors"][0]["adj_r2_defined"] == false);
}

TEST_CASE("bayesian extras appear behind the flag and fit clean signals") {
  Rng rng(0xabull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 120; ++i) {
    double x1 = rng.uniform() * 0.1, x2 = rng.uniform() * 0.1;
    records.push_back(make_record(i, {x1, x2}, 2.0 * x1 + 3.0 * x2));
  }
  AnalysisConfig cfg;
  cfg.runs = 5;
  cfg.include_bayesian = true;
  auto rep = run_regression(records, at_sparsity(0.9), cfg);
  REQUIRE(rep.regressors.size() == 8);
  CHECK(row(rep, "bayesian-ridge").adj_r2_mean > 0.95);
  CHECK(row(rep, "ard").adj_r2_mean > 0.95);
}

TEST_CASE("scenario parsing and slicing") {
  auto s1 = parse_scenario("sparsity:0.9");
  CHECK(s1.kind == Scenario::Kind::SparsityFixed);
  CHECK(s1.sparsity == 0.9);
  CHECK(scenario_name(s1) == "sparsity:0.9");
  auto s2 = parse_scenario("architecture:conv6");
  CHECK(s2.kind == Scenario::Kind::ArchitectureFixed);
  CHECK(scenario_name(s2) == "architecture:conv6");
  CHECK_THROWS_AS(parse_scenario("bogus"), Error);
  CHECK_THROWS_AS(parse_scenario("sparsity:abc"), Error);
  CHECK_THROWS_AS(parse_scenario("architecture:"), Error);

  Rng rng(0xcdull);
  std::vector<AnalysisRecord> records;
  for (u32 i = 0; i < 30; ++i) {
    double x = rng.uniform();
    auto r = make_record(i, {x, rng.uniform()}, 0.1 + 0.5 * x);
    r.acc.sparsity = i < 18 ? 0.9 : 0.6;
    r.acc.architecture = i % 2 == 0 ? "conv6" : "resnet20";
    records.push_back(std::move(r));
  }
  AnalysisConfig cfg;
  cfg.runs = 2;
  CHECK(run_regression(records, at_sparsity(0.9), cfg).n_records == 18);
  Scenario arch;
  arch.kind = Scenario::Kind::ArchitectureFixed;
  arch.architecture = "conv6";
  CHECK(run_regression(records, arch, cfg).n_records == 15);
  CHECK_THROWS_AS(run_regression(records, at_sparsity(0.5), cfg), Error);
}

TEST_CASE("accuracy csv round trip and validation") {
  std::vector<AccuracyRecord> recs;
  AccuracyRecord r;
  r.architecture = "conv6";
  r.dataset = "cifar10";
  r.algorithm = "snip";
  r.sparsity = 0.98;
  r.run = 0;
  r.acc = 83.8;
  r.acc_dense = 93.2;
  r.acc_std = 0.2;
  r.has_std = true;
  recs.push_back(r);
  r.algorithm = "grasp";
  r.acc = 82.5;
  recs.push_back(r);
  auto text = accuracy_csv(recs);
  auto back = parse_accuracy_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].architecture == "conv6");
  CHECK(back[0].acc == 83.8);
  CHECK(back[0].acc_std == 0.2);
  CHECK(back[1].algorithm == "grasp");
  CHECK(back[1].has_std);

  CHECK_THROWS_AS(parse_accuracy_csv("bad,header\n1,2\n"), Error);
  CHECK_THROWS_AS(
      parse_accuracy_csv("architecture,dataset,algorithm,sparsity,run,acc,acc_dense\na,b,c,0.5,0,101,90\n"),
      Error);
  CHECK_THROWS_AS(
      parse_accuracy_csv("architecture,dataset,algorithm,sparsity,run,acc,acc_dense\na,b,c,1.0,0,50,90\n"),
      Error);
  CHECK_THROWS_AS(
      parse_accuracy_csv("architecture,dataset,algorithm,sparsity,run,acc,acc_dense\na,b,c,0.5,0,50\n"),
      Error);
}

TEST_CASE("feature tables join on architecture, algorithm, and sparsity") {
  std::string table_csv =
      "architecture,algorithm,sparsity,m1,m2\n"
      "conv6,snip,0.9,0.5,1.5\n"
      "conv6,snip,0.6,0.25,2.5\n";
  auto table = parse_feature_csv(table_csv);
  CHECK(table.feature_names == std::vector<std::string>{"m1", "m2"});

  AccuracyRecord a;
  a.architecture = "conv6";
  a.dataset = "cifar10";
  a.algorithm = "snip";
  a.sparsity = 0.9;
  a.acc = 80;
  a.acc_dense = 90;
  auto joined = join_records({a}, table);
  REQUIRE(joined.size() == 1);
  CHECK(joined[0].features == std::vector<double>{0.5, 1.5});

  a.sparsity = 0.7;  // no such row
  CHECK_THROWS_AS(join_records({a}, table), Error);

  CHECK_THROWS_AS(parse_feature_csv("arch,alg,s,m1\n"), Error);
  std::string dup =
      "architecture,algorithm,sparsity,m1\n"
      "conv6,snip,0.9,1\n"
      "conv6,snip,0.9,2\n";
  a.sparsity = 0.9;
  CHECK_THROWS_AS(join_records({a}, parse_feature_csv(dup)), Error);

  auto csv = importance_csv(AnalysisReport{});
  CHECK(csv.rfind("feature,importance,defined,dropped\n", 0) == 0);
}
