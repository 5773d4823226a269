#include "regress.hpp"

#include <algorithm>
#include <cmath>

#include "spectral.hpp"

namespace snntopo {

const char* regressor_name(RegressorKind k) {
  switch (k) {
    case RegressorKind::LeastSquares: return "least-squares";
    case RegressorKind::Ridge: return "ridge";
    case RegressorKind::Lasso: return "lasso";
    case RegressorKind::ElasticNet: return "elastic-net";
    case RegressorKind::Huber: return "huber";
    case RegressorKind::PCR: return "pcr";
    case RegressorKind::BayesianRidge: return "bayesian-ridge";
    case RegressorKind::Ard: return "ard";
  }
  return "?";
}

std::vector<RegressorKind> regressor_suite(bool include_bayesian) {
  std::vector<RegressorKind> s{RegressorKind::LeastSquares, RegressorKind::Ridge,
                               RegressorKind::Lasso,        RegressorKind::ElasticNet,
                               RegressorKind::Huber,        RegressorKind::PCR};
  if (include_bayesian) {
    s.push_back(RegressorKind::BayesianRidge);
    s.push_back(RegressorKind::Ard);
  }
  return s;
}

namespace {

struct Centered {
  std::vector<double> Xc, yc;  // mean-removed copies
  std::vector<double> x_mean;
  double y_mean = 0.0;
};

Centered center(const std::vector<double>& X, const std::vector<double>& y, u64 n, u32 p,
                const double* sample_w = nullptr) {
  Centered c;
  c.x_mean.assign(p, 0.0);
  double wsum = 0.0;
  for (u64 i = 0; i < n; ++i) {
    double w = sample_w ? sample_w[i] : 1.0;
    wsum += w;
    c.y_mean += w * y[i];
    for (u32 j = 0; j < p; ++j) c.x_mean[j] += w * X[i * p + j];
  }
  c.y_mean /= wsum;
  for (u32 j = 0; j < p; ++j) c.x_mean[j] /= wsum;
  c.Xc.resize(n * p);
  c.yc.resize(n);
  for (u64 i = 0; i < n; ++i) {
    c.yc[i] = y[i] - c.y_mean;
    for (u32 j = 0; j < p; ++j) c.Xc[i * p + j] = X[i * p + j] - c.x_mean[j];
  }
  return c;
}

// gram = Xc^T W Xc, rhs = Xc^T W yc
void normal_equations(const Centered& c, u64 n, u32 p, const double* sample_w,
                      std::vector<double>& gram, std::vector<double>& rhs) {
  gram.assign(static_cast<size_t>(p) * p, 0.0);
  rhs.assign(p, 0.0);
  for (u64 i = 0; i < n; ++i) {
    double w = sample_w ? sample_w[i] : 1.0;
    const double* row = &c.Xc[i * p];
    for (u32 a = 0; a < p; ++a) {
      double wa = w * row[a];
      rhs[a] += wa * c.yc[i];
      for (u32 b = a; b < p; ++b) gram[a * p + b] += wa * row[b];
    }
  }
  for (u32 a = 0; a < p; ++a)
    for (u32 b = 0; b < a; ++b) gram[a * p + b] = gram[b * p + a];
}

// in-place Cholesky solve; false when a pivot collapses
bool solve_spd(std::vector<double> a, std::vector<double> b, u32 p, std::vector<double>& x) {
  double max_diag = 0.0;
  for (u32 i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(a[i * p + i]));
  const double eps = std::max(1e-300, 1e-13 * max_diag);
  for (u32 i = 0; i < p; ++i) {
    for (u32 j = i; j < p; ++j) {
      double s = a[i * p + j];
      for (u32 k = 0; k < i; ++k) s -= a[i * p + k] * a[j * p + k];
      if (i == j) {
        if (s <= eps) return false;
        a[i * p + i] = std::sqrt(s);
      } else {
        a[j * p + i] = s / a[i * p + i];
      }
    }
  }
  for (u32 i = 0; i < p; ++i) {
    double s = b[i];
    for (u32 k = 0; k < i; ++k) s -= a[i * p + k] * b[k];
    b[i] = s / a[i * p + i];
  }
  x.assign(p, 0.0);
  for (u32 i = p; i-- > 0;) {
    double s = b[i];
    for (u32 k = i + 1; k < p; ++k) s -= a[k * p + i] * x[k];
    x[i] = s / a[i * p + i];
  }
  return true;
}

LinearModel finish(const Centered& c, std::vector<double> coef, u32 p) {
  LinearModel m;
  m.coef = std::move(coef);
  m.intercept = c.y_mean;
  for (u32 j = 0; j < p; ++j) m.intercept -= m.coef[j] * c.x_mean[j];
  return m;
}

LinearModel fit_ols(const Centered& c, u64 n, u32 p, const double* sample_w,
                    double extra_ridge = 0.0) {
  std::vector<double> gram, rhs, coef;
  normal_equations(c, n, p, sample_w, gram, rhs);
  auto regularized = gram;
  if (extra_ridge > 0.0) {
    for (u32 j = 0; j < p; ++j) regularized[j * p + j] += extra_ridge;
  }
  bool fallback = false;
  if (!solve_spd(regularized, rhs, p, coef)) {
    fallback = true;
    double trace = 0.0;
    for (u32 j = 0; j < p; ++j) trace += gram[j * p + j];
    double lam = std::max(1e-12, 1e-8 * trace / std::max(1u, p));
    for (u32 j = 0; j < p; ++j) gram[j * p + j] += lam;
    if (!solve_spd(gram, rhs, p, coef)) coef.assign(p, 0.0);
  }
  auto m = finish(c, std::move(coef), p);
  m.ridge_fallback = fallback;
  return m;
}

// coordinate descent over (1/2n)||y - Xa||^2 + alpha*ratio*|a|_1
//                        + (alpha*(1-ratio)/2)*|a|^2
LinearModel fit_cd(const Centered& c, u64 n, u32 p, double alpha, double ratio,
                   const RegressorConfig& cfg) {
  std::vector<double> coef(p, 0.0), z(p, 0.0);
  for (u32 j = 0; j < p; ++j) {
    double s = 0.0;
    for (u64 i = 0; i < n; ++i) s += c.Xc[i * p + j] * c.Xc[i * p + j];
    z[j] = s / n;
  }
  std::vector<double> resid = c.yc;
  const double l1 = alpha * ratio;
  const double l2 = alpha * (1.0 - ratio);
  for (u32 it = 0; it < cfg.max_iter; ++it) {
    double max_step = 0.0, max_coef = 0.0;
    for (u32 j = 0; j < p; ++j) {
      if (z[j] == 0.0) continue;
      double cj = 0.0;
      for (u64 i = 0; i < n; ++i) cj += c.Xc[i * p + j] * resid[i];
      cj = cj / n + z[j] * coef[j];
      double next = 0.0;
      if (cj > l1) {
        next = (cj - l1) / (z[j] + l2);
      } else if (cj < -l1) {
        next = (cj + l1) / (z[j] + l2);
      }
      double delta = next - coef[j];
      if (delta != 0.0) {
        for (u64 i = 0; i < n; ++i) resid[i] -= delta * c.Xc[i * p + j];
        coef[j] = next;
      }
      max_step = std::max(max_step, std::abs(delta));
      max_coef = std::max(max_coef, std::abs(next));
    }
    if (max_step <= cfg.tol * std::max(1.0, max_coef)) break;
  }
  return finish(c, std::move(coef), p);
}

LinearModel fit_huber(const std::vector<double>& X, const std::vector<double>& y, u64 n, u32 p,
                      const RegressorConfig& cfg) {
  auto plain = center(X, y, n, p);
  LinearModel m = fit_ols(plain, n, p, nullptr);
  std::vector<double> w(n, 1.0), resid(n), abs_r(n);
  for (u32 it = 0; it < 100; ++it) {
    for (u64 i = 0; i < n; ++i) {
      resid[i] = y[i] - predict_one(m, &X[i * p], p);
      abs_r[i] = std::abs(resid[i]);
    }
    auto mid = abs_r.begin() + abs_r.size() / 2;
    std::nth_element(abs_r.begin(), mid, abs_r.end());
    double scale = 1.4826 * *mid;
    if (scale <= 1e-12 * std::max(1.0, std::abs(plain.y_mean))) break;  // fit is exact
    double cut = cfg.huber_delta * scale;
    for (u64 i = 0; i < n; ++i) w[i] = std::abs(resid[i]) <= cut ? 1.0 : cut / std::abs(resid[i]);
    auto cw = center(X, y, n, p, w.data());
    LinearModel next = fit_ols(cw, n, p, w.data());
    double step = std::abs(next.intercept - m.intercept);
    for (u32 j = 0; j < p; ++j) step = std::max(step, std::abs(next.coef[j] - m.coef[j]));
    bool fb = m.ridge_fallback || next.ridge_fallback;
    m = std::move(next);
    m.ridge_fallback = fb;
    if (step <= cfg.tol) break;
  }
  return m;
}

LinearModel fit_pcr(const Centered& c, u64 n, u32 p, const RegressorConfig& cfg) {
  std::vector<double> gram, rhs;
  normal_equations(c, n, p, nullptr, gram, rhs);
  std::vector<double> evals, evecs;
  jacobi_eig(gram, p, evals, &evecs);  // ascending
  u32 q = std::min(p, cfg.pcr_components);
  std::vector<double> coef(p, 0.0);
  double lam_max = evals.empty() ? 0.0 : std::max(0.0, evals.back());
  for (u32 k = 0; k < q; ++k) {
    u32 idx = p - 1 - k;  // top components first
    double lam = evals[idx];
    if (lam <= 1e-12 * std::max(1.0, lam_max)) break;
    // score regression collapses: (v^T X^T y) / (v^T G v) = (v^T rhs) / lam
    double num = 0.0;
    for (u32 j = 0; j < p; ++j) num += evecs[j * p + idx] * rhs[j];
    double b = num / lam;
    for (u32 j = 0; j < p; ++j) coef[j] += b * evecs[j * p + idx];
  }
  return finish(c, std::move(coef), p);
}

// evidence maximization with a shared weight precision; the gram
// eigendecomposition turns every update into O(p) scalar work
LinearModel fit_bayesian_ridge(const Centered& c, u64 n, u32 p, const RegressorConfig& cfg) {
  std::vector<double> gram, rhs;
  normal_equations(c, n, p, nullptr, gram, rhs);
  std::vector<double> evals, evecs;
  jacobi_eig(gram, p, evals, &evecs);
  std::vector<double> q(p, 0.0);  // V^T rhs
  for (u32 k = 0; k < p; ++k)
    for (u32 j = 0; j < p; ++j) q[k] += evecs[j * p + k] * rhs[j];
  double yy = 0.0;
  for (u64 i = 0; i < n; ++i) yy += c.yc[i] * c.yc[i];
  double var_y = yy / std::max<u64>(1, n);
  double beta = var_y > 0 ? 1.0 / var_y : 1.0;  // noise precision
  double a = 1.0;                               // weight precision
  std::vector<double> m(p, 0.0);
  for (u32 it = 0; it < 300; ++it) {
    double gamma = 0.0, mm = 0.0, rss = yy;
    for (u32 k = 0; k < p; ++k) {
      double lam = std::max(0.0, evals[k]);
      m[k] = beta * q[k] / (beta * lam + a);
      gamma += beta * lam / (beta * lam + a);
      mm += m[k] * m[k];
      rss -= 2.0 * q[k] * m[k] - lam * m[k] * m[k];
    }
    rss = std::max(rss, 1e-300);
    double a_next = mm > 0 ? gamma / mm : 1e12;
    double beta_next = (static_cast<double>(n) - gamma) / rss;
    beta_next = std::clamp(beta_next, 1e-12, 1e15);
    a_next = std::clamp(a_next, 1e-12, 1e15);
    bool done = std::abs(a_next - a) <= cfg.tol * a && std::abs(beta_next - beta) <= cfg.tol * beta;
    a = a_next;
    beta = beta_next;
    if (done) break;
  }
  std::vector<double> coef(p, 0.0);
  for (u32 k = 0; k < p; ++k) {
    double lam = std::max(0.0, evals[k]);
    double mk = beta * q[k] / (beta * lam + a);
    for (u32 j = 0; j < p; ++j) coef[j] += mk * evecs[j * p + k];
  }
  return finish(c, std::move(coef), p);
}

// per-feature precisions; features whose precision diverges drop out
LinearModel fit_ard(const Centered& c, u64 n, u32 p, const RegressorConfig& cfg) {
  std::vector<double> gram, rhs;
  normal_equations(c, n, p, nullptr, gram, rhs);
  double yy = 0.0;
  for (u64 i = 0; i < n; ++i) yy += c.yc[i] * c.yc[i];
  double var_y = yy / std::max<u64>(1, n);
  double beta = var_y > 0 ? 1.0 / var_y : 1.0;
  std::vector<double> a(p, 1.0), m(p, 0.0), prev(p, 0.0);
  const double prune = 1e12;
  for (u32 it = 0; it < 300; ++it) {
    // posterior covariance S = (beta*G + diag(a))^-1 by column solves
    std::vector<double> sys(gram);
    for (u32 i = 0; i < p; ++i) {
      for (u32 j = 0; j < p; ++j) sys[i * p + j] *= beta;
      sys[i * p + i] += a[i];
    }
    std::vector<double> sdiag(p, 0.0);
    std::vector<double> col, unit(p, 0.0);
    bool ok = true;
    for (u32 j = 0; j < p && ok; ++j) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[j] = 1.0;
      ok = solve_spd(sys, unit, p, col);
      if (ok) sdiag[j] = col[j];
    }
    std::vector<double> brhs(rhs);
    for (double& v : brhs) v *= beta;
    ok = ok && solve_spd(sys, brhs, p, m);
    if (!ok) break;
    double gamma_sum = 0.0;
    for (u32 j = 0; j < p; ++j) {
      double gamma = 1.0 - a[j] * sdiag[j];
      gamma_sum += gamma;
      a[j] = m[j] * m[j] > 0 ? std::min(prune, gamma / (m[j] * m[j])) : prune;
    }
    double rss = yy;
    for (u32 j = 0; j < p; ++j) {
      rss -= 2.0 * rhs[j] * m[j];
      for (u32 k = 0; k < p; ++k) rss += m[j] * gram[j * p + k] * m[k];
    }
    rss = std::max(rss, 1e-300);
    beta = std::clamp((static_cast<double>(n) - gamma_sum) / rss, 1e-12, 1e15);
    double step = 0.0;
    for (u32 j = 0; j < p; ++j) step = std::max(step, std::abs(m[j] - prev[j]));
    prev = m;
    if (step <= cfg.tol) break;
  }
  return finish(c, std::move(m), p);
}

}  // namespace

LinearModel fit_regressor(RegressorKind kind, const std::vector<double>& X,
                          const std::vector<double>& y, u64 n, u32 p,
                          const RegressorConfig& cfg) {
  require(n > 0 && X.size() == n * p && y.size() == n, errc::invalid_argument,
          "regression design shape mismatch");
  if (kind == RegressorKind::Huber) return fit_huber(X, y, n, p, cfg);
  auto c = center(X, y, n, p);
  switch (kind) {
    case RegressorKind::LeastSquares: return fit_ols(c, n, p, nullptr);
    case RegressorKind::Ridge: return fit_ols(c, n, p, nullptr, cfg.ridge_alpha);
    case RegressorKind::Lasso: return fit_cd(c, n, p, cfg.lasso_alpha, 1.0, cfg);
    case RegressorKind::ElasticNet: return fit_cd(c, n, p, cfg.enet_alpha, cfg.enet_l1_ratio, cfg);
    case RegressorKind::PCR: return fit_pcr(c, n, p, cfg);
    case RegressorKind::BayesianRidge: return fit_bayesian_ridge(c, n, p, cfg);
    case RegressorKind::Ard: return fit_ard(c, n, p, cfg);
    case RegressorKind::Huber: break;
  }
  return fit_ols(c, n, p, nullptr);
}

double predict_one(const LinearModel& m, const double* x, u32 p) {
  double s = m.intercept;
  for (u32 j = 0; j < p; ++j) s += m.coef[j] * x[j];
  return s;
}

void predict(const LinearModel& m, const std::vector<double>& X, u64 n, u32 p,
             std::vector<double>& out) {
  out.resize(n);
  for (u64 i = 0; i < n; ++i) out[i] = predict_one(m, &X[i * p], p);
}

}  // namespace snntopo
