#pragma once

// Unpreconditioned conjugate gradient for SPD systems, over full CSR or
// symmetric half storage.

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spcg/kernels.hpp"
#include "spcg/sparse.hpp"

namespace spcg {

struct CgOptions {
  /// Relative residual target ||r|| / ||b||.
  double tol = 1e-10;
  /// Iteration cap; unset means n.
  std::optional<std::size_t> max_iter;
  bool record_history = false;
  /// Report ||b - A x|| / ||b|| from a fresh SpMV instead of the recursive residual.
  bool recompute_final_residual = true;

  /// Throws std::invalid_argument on tol <= 0 or max_iter == 0.
  void validate() const;
};

using Milliseconds = std::chrono::duration<double, std::milli>;

struct CgTimings {
  Milliseconds spmv{0};
  Milliseconds dot{0};
  Milliseconds axpy{0};
  Milliseconds total{0};
};

template <typename T>
struct SolveReport {
  DenseVector<T> x;
  std::size_t iterations = 0;
  /// Set when the recursive residual met the tolerance.
  bool converged = false;
  double final_relative_residual = 0.0;
  /// Recursive ||r_k|| / ||b|| after each iteration (record_history only).
  std::vector<double> residual_history;
  /// Step lengths and direction updates per iteration (record_history only).
  std::vector<double> alpha;
  std::vector<double> beta;
  CgTimings timings;
};

/// Called after each residual update with the 1-based iteration number and r_k.
template <typename T>
using CgObserver = std::function<void(std::size_t iteration, std::span<const T> residual)>;

/// True iff residual_norm <= tol * b_norm; for b_norm == 0 only a zero
/// residual converges.
bool check_convergence(double residual_norm, double b_norm, const CgOptions& options);

/// Solves A x = b from x0. Throws BreakdownError when p^T A p <= 0 (the
/// matrix is not positive definite) or a scalar becomes non-finite, and
/// DimensionError on length mismatches.
template <typename T>
SolveReport<T> cg_solve(const CsrMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                        const CgOptions& options = {}, const KernelConfig& cfg = {},
                        const CgObserver<T>& observer = {});

template <typename T>
SolveReport<T> cg_solve(const SymHalfMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                        const CgOptions& options = {}, const KernelConfig& cfg = {},
                        const CgObserver<T>& observer = {});

/// Starts from x0 = 0.
template <typename Matrix, typename T = typename Matrix::value_type>
SolveReport<T> cg_solve(const Matrix& a, const DenseVector<T>& b, const CgOptions& options = {},
                        const KernelConfig& cfg = {}) {
  const DenseVector<T> zero(b.size(), T{});
  return cg_solve<T>(a, std::span<const T>(b), std::span<const T>(zero), options, cfg);
}

}  // namespace spcg
