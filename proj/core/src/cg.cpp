#include "spcg/cg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spcg/errors.hpp"

namespace spcg {

void CgOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter && *max_iter == 0) throw std::invalid_argument("max_iter must be at least 1");
}

bool check_convergence(double residual_norm, double b_norm, const CgOptions& options) {
  if (b_norm == 0.0) return residual_norm == 0.0;
  return residual_norm <= options.tol * b_norm;
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(Milliseconds& sink) : sink_(sink), start_(Clock::now()) {}
  ~Stopwatch() { sink_ += Clock::now() - start_; }

 private:
  Milliseconds& sink_;
  Clock::time_point start_;
};

void require_finite(double value, const char* what, std::size_t iteration) {
  if (!std::isfinite(value)) {
    throw BreakdownError("numerical breakdown: " + std::string(what) + " is not finite at iteration " +
                         std::to_string(iteration));
  }
}

template <typename T, typename Matrix, typename Apply>
SolveReport<T> run_cg(const Matrix& a, std::span<const T> b, std::span<const T> x0,
                      const CgOptions& options, const KernelConfig& cfg,
                      const CgObserver<T>& observer, Apply apply) {
  options.validate();
  cfg.validate();
  const std::size_t n = a.n();
  if (b.size() != n || x0.size() != n) {
    throw DimensionError("cg_solve: b and x0 must have length " + std::to_string(n));
  }

  const auto started = Clock::now();
  SolveReport<T> report;
  auto& tm = report.timings;

  double b_norm = 0.0;
  {
    Stopwatch sw(tm.dot);
    b_norm = static_cast<double>(norm2<T>(b, cfg));
  }
  require_finite(b_norm, "||b||", 0);
  if (b_norm == 0.0) {
    report.x.assign(n, T{});
    report.converged = true;
    tm.total = Clock::now() - started;
    return report;
  }

  DenseVector<T> x(x0.begin(), x0.end());
  DenseVector<T> r(b.begin(), b.end());
  DenseVector<T> q(n);
  {
    Stopwatch sw(tm.spmv);
    apply(std::span<const T>(x), std::span<T>(q));
  }
  {
    Stopwatch sw(tm.axpy);
    axpy_inplace<T>(T{-1}, q, r, cfg);
  }
  DenseVector<T> p = r;
  T rr{};
  {
    Stopwatch sw(tm.dot);
    rr = dot<T>(r, r, cfg);
  }
  require_finite(static_cast<double>(rr), "r^T r", 0);

  double relative = std::sqrt(static_cast<double>(rr)) / b_norm;
  report.converged = check_convergence(std::sqrt(static_cast<double>(rr)), b_norm, options);
  const std::size_t max_iter = options.max_iter.value_or(std::max<std::size_t>(n, 1));

  for (std::size_t k = 1; k <= max_iter && !report.converged; ++k) {
    {
      Stopwatch sw(tm.spmv);
      apply(std::span<const T>(p), std::span<T>(q));
    }
    T pq{};
    {
      Stopwatch sw(tm.dot);
      pq = dot<T>(p, q, cfg);
    }
    require_finite(static_cast<double>(pq), "p^T A p", k);
    if (pq <= T{}) {
      throw BreakdownError("matrix not positive definite: p^T A p = " +
                           std::to_string(static_cast<double>(pq)) + " at iteration " +
                           std::to_string(k));
    }
    const T alpha = rr / pq;
    require_finite(static_cast<double>(alpha), "alpha", k);
    {
      Stopwatch sw(tm.axpy);
      axpy_inplace<T>(alpha, p, x, cfg);
      axpy_inplace<T>(-alpha, q, r, cfg);
    }
    T rr_next{};
    {
      Stopwatch sw(tm.dot);
      rr_next = dot<T>(r, r, cfg);
    }
    require_finite(static_cast<double>(rr_next), "residual", k);

    report.iterations = k;
    const double r_norm = std::sqrt(static_cast<double>(rr_next));
    relative = r_norm / b_norm;
    if (options.record_history) {
      report.residual_history.push_back(relative);
      report.alpha.push_back(static_cast<double>(alpha));
    }
    if (observer) observer(k, std::span<const T>(r));
    if (check_convergence(r_norm, b_norm, options)) {
      report.converged = true;
      break;
    }

    const T beta = rr_next / rr;
    require_finite(static_cast<double>(beta), "beta", k);
    if (options.record_history) report.beta.push_back(static_cast<double>(beta));
    {
      Stopwatch sw(tm.axpy);
      xpay_inplace<T>(beta, r, p, cfg);
    }
    rr = rr_next;
  }

  if (options.recompute_final_residual) {
    {
      Stopwatch sw(tm.spmv);
      apply(std::span<const T>(x), std::span<T>(q));
    }
    DenseVector<T> true_r(b.begin(), b.end());
    axpy_inplace<T>(T{-1}, q, true_r, cfg);
    relative = static_cast<double>(norm2<T>(true_r, cfg)) / b_norm;
  }
  report.final_relative_residual = relative;
  report.x = std::move(x);
  tm.total = Clock::now() - started;
  return report;
}

}  // namespace

template <typename T>
SolveReport<T> cg_solve(const CsrMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                        const CgOptions& options, const KernelConfig& cfg,
                        const CgObserver<T>& observer) {
  return run_cg<T>(a, b, x0, options, cfg, observer,
                   [&](std::span<const T> in, std::span<T> out) { spmv_full<T>(a, in, out, cfg); });
}

template <typename T>
SolveReport<T> cg_solve(const SymHalfMatrix<T>& a, std::span<const T> b, std::span<const T> x0,
                        const CgOptions& options, const KernelConfig& cfg,
                        const CgObserver<T>& observer) {
  return run_cg<T>(a, b, x0, options, cfg, observer,
                   [&](std::span<const T> in, std::span<T> out) { spmv_sym<T>(a, in, out, cfg); });
}

template SolveReport<float> cg_solve(const CsrMatrix<float>&, std::span<const float>,
                                     std::span<const float>, const CgOptions&,
                                     const KernelConfig&, const CgObserver<float>&);
template SolveReport<float> cg_solve(const SymHalfMatrix<float>&, std::span<const float>,
                                     std::span<const float>, const CgOptions&,
                                     const KernelConfig&, const CgObserver<float>&);
template SolveReport<double> cg_solve(const CsrMatrix<double>&, std::span<const double>,
                                      std::span<const double>, const CgOptions&,
                                      const KernelConfig&, const CgObserver<double>&);
template SolveReport<double> cg_solve(const SymHalfMatrix<double>&, std::span<const double>,
                                      std::span<const double>, const CgOptions&,
                                      const KernelConfig&, const CgObserver<double>&);

}  // namespace spcg
