#include "spectral.hpp"

#include <algorithm>
#include <cmath>

namespace snntopo {

void jacobi_eig(std::vector<double> a, u32 n, std::vector<double>& evals,
                std::vector<double>* evecs) {
  require(n >= 1, errc::invalid_argument, "empty matrix");
  require(a.size() == static_cast<u64>(n) * n, errc::invalid_argument, "matrix size mismatch");
  std::vector<double> v;
  if (evecs) {
    v.assign(static_cast<u64>(n) * n, 0.0);
    for (u32 i = 0; i < n; ++i) v[static_cast<u64>(i) * n + i] = 1.0;
  }
  auto off = [&]() {
    double s = 0.0;
    for (u32 i = 0; i < n; ++i)
      for (u32 j = i + 1; j < n; ++j) s += a[static_cast<u64>(i) * n + j] * a[static_cast<u64>(i) * n + j];
    return s;
  };
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double stop = std::max(1e-300, scale * scale * 1e-30 * n * n);
  for (int sweep = 0; sweep < 100 && off() > stop; ++sweep) {
    for (u32 p = 0; p < n; ++p) {
      for (u32 q = p + 1; q < n; ++q) {
        double apq = a[static_cast<u64>(p) * n + q];
        if (apq == 0.0) continue;
        double app = a[static_cast<u64>(p) * n + p];
        double aqq = a[static_cast<u64>(q) * n + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (u32 k = 0; k < n; ++k) {
          double akp = a[static_cast<u64>(k) * n + p];
          double akq = a[static_cast<u64>(k) * n + q];
          a[static_cast<u64>(k) * n + p] = c * akp - s * akq;
          a[static_cast<u64>(k) * n + q] = s * akp + c * akq;
        }
        for (u32 k = 0; k < n; ++k) {
          double apk = a[static_cast<u64>(p) * n + k];
          double aqk = a[static_cast<u64>(q) * n + k];
          a[static_cast<u64>(p) * n + k] = c * apk - s * aqk;
          a[static_cast<u64>(q) * n + k] = s * apk + c * aqk;
        }
        a[static_cast<u64>(p) * n + q] = 0.0;
        a[static_cast<u64>(q) * n + p] = 0.0;
        if (evecs) {
          for (u32 k = 0; k < n; ++k) {
            double vkp = v[static_cast<u64>(k) * n + p];
            double vkq = v[static_cast<u64>(k) * n + q];
            v[static_cast<u64>(k) * n + p] = c * vkp - s * vkq;
            v[static_cast<u64>(k) * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  std::vector<u32> order(n);
  for (u32 i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](u32 x, u32 y) {
    return a[static_cast<u64>(x) * n + x] < a[static_cast<u64>(y) * n + y];
  });
  evals.resize(n);
  for (u32 i = 0; i < n; ++i) evals[i] = a[static_cast<u64>(order[i]) * n + order[i]];
  if (evecs) {
    evecs->assign(static_cast<u64>(n) * n, 0.0);
    for (u32 col = 0; col < n; ++col)
      for (u32 row = 0; row < n; ++row)
        (*evecs)[static_cast<u64>(row) * n + col] = v[static_cast<u64>(row) * n + order[col]];
  }
}

void tridiag_eig(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z) {
  const u32 n = static_cast<u32>(d.size());
  require(n >= 1, errc::invalid_argument, "empty tridiagonal");
  require(e.size() + 1 >= n, errc::invalid_argument, "off-diagonal too short");
  e.resize(n, 0.0);  // e[n-1] used as workspace
  for (u32 l = 0; l < n; ++l) {
    u32 iter = 0;
    u32 m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + dd * 1e-16) break;
      }
      if (m != l) {
        require(iter++ < 50, errc::numeric_error, "tridiagonal QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (u32 i = m; i-- > l;) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (u32 k = 0; k < n; ++k) {
              double zk1 = (*z)[static_cast<u64>(k) * n + i + 1];
              double zk0 = (*z)[static_cast<u64>(k) * n + i];
              (*z)[static_cast<u64>(k) * n + i + 1] = s * zk0 + c * zk1;
              (*z)[static_cast<u64>(k) * n + i] = c * zk0 - s * zk1;
            }
          }
        }
        if (r == 0.0 && m > l + 1) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  // sort ascending, permuting eigenvector columns alongside
  std::vector<u32> order(n);
  for (u32 i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](u32 a, u32 b) { return d[a] < d[b]; });
  std::vector<double> ds(n);
  for (u32 i = 0; i < n; ++i) ds[i] = d[order[i]];
  d = std::move(ds);
  if (z) {
    std::vector<double> zs(static_cast<u64>(n) * n);
    for (u32 col = 0; col < n; ++col)
      for (u32 row = 0; row < n; ++row)
        zs[static_cast<u64>(row) * n + col] = (*z)[static_cast<u64>(row) * n + order[col]];
    *z = std::move(zs);
  }
}

SymOp adjacency_op(const UndirectedView& v) {
  SymOp op;
  op.n = v.n;
  const bool weighted = !v.w.empty();
  op.apply = [&v, weighted](const double* x, double* y) {
    for (u64 u = 0; u < v.n; ++u) {
      double acc = 0.0;
      for (u64 e = v.ptr[u]; e < v.ptr[u + 1]; ++e) {
        acc += (weighted ? v.w[e] : 1.0) * x[v.adj[e]];
      }
      y[u] = acc;
    }
  };
  return op;
}

SymOp laplacian_op(const UndirectedView& v) {
  SymOp op;
  op.n = v.n;
  const bool weighted = !v.w.empty();
  op.apply = [&v, weighted](const double* x, double* y) {
    for (u64 u = 0; u < v.n; ++u) {
      double acc = 0.0, deg = 0.0;
      for (u64 e = v.ptr[u]; e < v.ptr[u + 1]; ++e) {
        double w = weighted ? v.w[e] : 1.0;
        deg += w;
        acc += w * x[v.adj[e]];
      }
      y[u] = deg * x[u] - acc;
    }
  };
  return op;
}

SymOp deflated_op(SymOp base, std::vector<std::pair<double, std::vector<double>>> pairs) {
  for (const auto& p : pairs)
    require(p.second.size() == base.n, errc::invalid_argument, "deflation vector size mismatch");
  SymOp op;
  op.n = base.n;
  op.apply = [base = std::move(base), pairs = std::move(pairs)](const double* x, double* y) {
    base.apply(x, y);
    for (const auto& [lam, u] : pairs) {
      double dot = 0.0;
      for (u64 i = 0; i < u.size(); ++i) dot += u[i] * x[i];
      double f = lam * dot;
      for (u64 i = 0; i < u.size(); ++i) y[i] -= f * u[i];
    }
  };
  return op;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (u64 i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Lanczos factorization with full reorthogonalization. Exact breakdowns
// restart with a fresh random direction orthogonal to the current basis, so
// the Krylov space keeps growing on disconnected or low-overlap spectra.
struct Lanczos {
  const SymOp& op;
  Rng rng;
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;  // beta[j] couples basis j and j+1
  double scale = 0.0;               // running spectral scale estimate
  bool exhausted = false;

  Lanczos(const SymOp& o, u64 seed) : op(o), rng(seed) {
    std::vector<double> v(op.n);
    random_unit(v);
    basis.push_back(std::move(v));
  }

  void random_unit(std::vector<double>& v) {
    for (;;) {
      for (double& x : v) x = rng.gaussian();
      orthogonalize(v);
      double nv = norm(v);
      if (nv > 1e-8) {
        for (double& x : v) x /= nv;
        return;
      }
      if (basis.size() >= op.n) {
        exhausted = true;
        return;
      }
    }
  }

  void orthogonalize(std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double d = dot(v, b);
        for (u64 i = 0; i < v.size(); ++i) v[i] -= d * b[i];
      }
    }
  }

  // extend factorization to m basis vectors
  void grow(u32 m) {
    std::vector<double> w(op.n);
    while (alpha.size() < m && !exhausted) {
      const auto& v = basis.back();
      op.apply(v.data(), w.data());
      double a = dot(w, v);
      alpha.push_back(a);
      std::vector<double> next = w;
      for (u64 i = 0; i < next.size(); ++i) next[i] -= a * v[i];
      orthogonalize(next);
      scale = std::max(scale, std::abs(a) + norm(w));
      if (basis.size() >= op.n) {
        exhausted = true;
        break;
      }
      double b = norm(next);
      if (b < std::max(1e-300, scale * 1e-13)) {
        beta.push_back(0.0);
        std::vector<double> fresh(op.n);
        random_unit(fresh);
        if (exhausted) {
          beta.pop_back();
          break;
        }
        basis.push_back(std::move(fresh));
      } else {
        beta.push_back(b);
        for (double& x : next) x /= b;
        basis.push_back(std::move(next));
      }
    }
  }

  // Ritz values ascending plus residual bounds |beta_m * z_last|
  void ritz(std::vector<double>& values, std::vector<double>& res,
            std::vector<std::vector<double>>* vectors = nullptr) const {
    const u32 m = static_cast<u32>(alpha.size());
    if (m == 0) {
      values.clear();
      res.clear();
      if (vectors) vectors->clear();
      return;
    }
    std::vector<double> d = alpha;
    std::vector<double> e(beta.begin(), beta.begin() + (m > 0 ? m - 1 : 0));
    std::vector<double> z(static_cast<u64>(m) * m, 0.0);
    for (u32 i = 0; i < m; ++i) z[static_cast<u64>(i) * m + i] = 1.0;
    tridiag_eig(d, e, &z);
    values = d;
    res.resize(m);
    double tail = (beta.size() >= m && m > 0) ? beta[m - 1] : 0.0;
    if (basis.size() <= m) tail = 0.0;  // factorization ended exactly
    for (u32 i = 0; i < m; ++i) res[i] = std::abs(tail * z[static_cast<u64>(m - 1) * m + i]);
    if (vectors) {
      vectors->assign(m, std::vector<double>());
      for (u32 i = 0; i < m; ++i) {
        std::vector<double> v(op.n, 0.0);
        for (u32 j = 0; j < m; ++j) {
          double c = z[static_cast<u64>(j) * m + i];
          const auto& bj = basis[j];
          for (u64 k = 0; k < op.n; ++k) v[k] += c * bj[k];
        }
        (*vectors)[i] = std::move(v);
      }
    }
  }
};

u32 default_cap(u64 n, u32 requested) {
  if (requested != 0) return static_cast<u32>(std::min<u64>(requested, n));
  return static_cast<u32>(std::min<u64>(n, 600));
}

}  // namespace

EigPair lanczos_extreme(const SymOp& op, bool largest, const LanczosOptions& opt) {
  require(op.n >= 1, errc::invalid_argument, "empty operator");
  const u32 cap = default_cap(op.n, opt.max_iter);
  Lanczos lz(op, opt.seed);
  EigPair out;
  u32 m = std::min<u32>(cap, 24);
  for (;;) {
    lz.grow(m);
    std::vector<double> vals, res;
    lz.ritz(vals, res);
    if (!vals.empty()) {
      u32 idx = largest ? static_cast<u32>(vals.size() - 1) : 0;
      out.value = vals[idx];
      double tol = opt.tol * std::max(1.0, lz.scale);
      out.converged = res[idx] <= tol;
      if (out.converged || lz.exhausted || lz.alpha.size() >= cap) {
        std::vector<std::vector<double>> vecs;
        lz.ritz(vals, res, &vecs);
        out.vector = std::move(vecs[idx]);
        double nv = norm(out.vector);
        if (nv > 0) {
          for (double& x : out.vector) x /= nv;
        }
        if (lz.exhausted && !out.converged) out.converged = res[idx] <= tol * 10;
        return out;
      }
    } else if (lz.exhausted) {
      return out;
    }
    m = std::min<u32>(cap, m * 2);
  }
}

std::vector<double> lanczos_top_distinct(const SymOp& op, u32 k, const LanczosOptions& opt) {
  require(op.n >= 1, errc::invalid_argument, "empty operator");
  require(k >= 1, errc::invalid_argument, "need at least one eigenvalue");
  const u32 cap = default_cap(op.n, opt.max_iter);
  Lanczos lz(op, opt.seed);
  u32 m = std::min<u32>(cap, std::max(24u, 4 * k));
  for (;;) {
    lz.grow(m);
    std::vector<double> vals, res;
    lz.ritz(vals, res);
    double tol = opt.tol * std::max(1.0, lz.scale);
    double merge = 1e-9 * std::max(1.0, lz.scale);
    // walk from the top, merging values closer than the distinctness gap
    std::vector<double> top;
    bool all_ok = true;
    for (u64 i = vals.size(); i-- > 0 && top.size() < k;) {
      if (!top.empty() && std::abs(top.back() - vals[i]) <= merge) continue;
      if (res[i] > tol) {
        all_ok = false;
        break;
      }
      top.push_back(vals[i]);
    }
    bool done = (all_ok && top.size() == k) || lz.exhausted || lz.alpha.size() >= cap;
    if (done) {
      if (!all_ok) {
        // keep whatever prefix is converged
        std::vector<double> keep;
        for (u64 i = vals.size(); i-- > 0 && keep.size() < k;) {
          if (!keep.empty() && std::abs(keep.back() - vals[i]) <= merge) continue;
          if (res[i] > tol * 10) break;
          keep.push_back(vals[i]);
        }
        return keep;
      }
      return top;
    }
    m = std::min<u32>(cap, m * 2);
  }
}

EigPair lanczos_extreme_magnitude(const SymOp& op, const LanczosOptions& opt) {
  EigPair hi = lanczos_extreme(op, true, opt);
  EigPair lo = lanczos_extreme(op, false, opt);
  return std::abs(hi.value) >= std::abs(lo.value) ? hi : lo;
}

}  // namespace snntopo
