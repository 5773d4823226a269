#pragma once

#include <functional>
#include <vector>

#include "common.hpp"
#include "graph.hpp"

namespace snntopo {

// Dense symmetric eigensolver (cyclic Jacobi). `a` is row-major n*n and is
// consumed. Eigenvalues come back ascending; if `evecs` is non-null it
// receives a row-major matrix whose column k is the eigenvector for evals[k].
void jacobi_eig(std::vector<double> a, u32 n, std::vector<double>& evals,
                std::vector<double>* evecs = nullptr);

// Eigen-decomposition of a symmetric tridiagonal matrix, diagonal `d` and
// off-diagonal `e` (e[i] couples i and i+1). QL with implicit shifts.
// On return d holds eigenvalues ascending; if z is non-null it must start as
// the n*n identity and receives eigenvectors by column.
void tridiag_eig(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z);

// Matrix-free symmetric operator of dimension n.
struct SymOp {
  u64 n = 0;
  std::function<void(const double* x, double* y)> apply;
};

SymOp adjacency_op(const UndirectedView& v);
SymOp laplacian_op(const UndirectedView& v);

// base minus sum of lambda_k u_k u_k^T; vectors must be unit length
SymOp deflated_op(SymOp base, std::vector<std::pair<double, std::vector<double>>> pairs);

struct EigPair {
  double value = 0.0;
  std::vector<double> vector;
  bool converged = false;
};

struct LanczosOptions {
  u32 max_iter = 0;   // 0: min(n, 600)
  double tol = 1e-10; // residual bound relative to spectral scale
  u64 seed = 0x5eed;
};

// Extreme algebraic eigenvalue (largest if `largest`, else smallest), with
// eigenvector. Full reorthogonalization; restarts through exact breakdowns,
// so disconnected operators are handled.
EigPair lanczos_extreme(const SymOp& op, bool largest, const LanczosOptions& opt = {});

// Top `k` distinct eigenvalues, descending. Converged values only; fewer may
// come back when the spectrum has fewer distinct points.
std::vector<double> lanczos_top_distinct(const SymOp& op, u32 k, const LanczosOptions& opt = {});

// Largest-magnitude eigenvalue (sign preserved).
EigPair lanczos_extreme_magnitude(const SymOp& op, const LanczosOptions& opt = {});

}  // namespace snntopo
