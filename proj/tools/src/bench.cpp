#include "spcg_cli/bench.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "spcg/errors.hpp"
#include "spcg/genprob.hpp"

namespace spcg::cli {

namespace {

using Clock = std::chrono::steady_clock;

/// One discarded warm-up, then the median of `reps` timed calls.
template <typename Fn>
double median_ms(std::size_t reps, Fn&& fn) {
  fn();
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const auto start = Clock::now();
    fn();
    samples.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

BenchRow make_row(const char* op, std::size_t workers, std::string storage = "-",
                  std::string accumulation = "-") {
  BenchRow row;
  row.op = op;
  row.workers = workers;
  row.storage = std::move(storage);
  row.accumulation = std::move(accumulation);
  return row;
}

// Keeps results observable so the timed calls are not elided.
volatile double g_sink = 0.0;

template <typename T>
DenseVector<T> narrow(const DenseVector<double>& v) {
  return DenseVector<T>(v.begin(), v.end());
}

template <typename T, typename Matrix>
BenchRow cg_row(const Matrix& a, const DenseVector<T>& rhs, const BenchOptions& opt,
                const KernelConfig& cfg, const char* storage) {
  const auto solved = cg_solve(a, rhs, opt.cg, cfg);
  BenchRow row = make_row(kOpCg, cfg.workers, storage);
  if (std::string_view(storage) == "sym") row.accumulation = std::string(to_string(cfg.accumulation));
  row.time_ms = solved.timings.total.count();
  row.iterations = solved.iterations;
  row.final_residual = solved.final_relative_residual;
  row.converged = solved.converged;
  return row;
}

template <typename T>
void bench_typed(const CsrMatrix<double>& full_d, const SymHalfMatrix<double>& sym_d,
                 const DenseVector<double>& rhs_d, const BenchOptions& opt,
                 const std::vector<std::size_t>& workers, BenchReport& report) {
  const CsrMatrix<T> full = convert<T>(full_d);
  const SymHalfMatrix<T> sym = convert<T>(sym_d);
  const std::size_t n = full.n();
  const DenseVector<T> rhs = narrow<T>(rhs_d);
  const DenseVector<T> x = narrow<T>(random_vector(n, 0x5eed0001));
  const DenseVector<T> u = narrow<T>(random_vector(n, 0x5eed0002));
  DenseVector<T> y(n);
  DenseVector<T> acc = u;

  for (const std::size_t w : workers) {
    const KernelConfig cfg{w, opt.chunk, Accumulation::kPrivatized};

    BenchRow row = make_row(kOpDot, w);
    row.time_ms = median_ms(opt.reps, [&] { g_sink = static_cast<double>(dot<T>(x, u, cfg)); });
    report.rows.push_back(row);

    row = make_row(kOpAxpy, w);
    row.time_ms = median_ms(opt.reps, [&] { axpy_inplace<T>(T(1e-3), x, acc, cfg); });
    g_sink = static_cast<double>(acc[0]);
    report.rows.push_back(row);

    row = make_row(kOpSpmv, w, "full");
    row.time_ms = median_ms(opt.reps, [&] { spmv_full<T>(full, x, y, cfg); });
    report.rows.push_back(row);

    for (const Accumulation mode : {Accumulation::kAtomic, Accumulation::kPrivatized}) {
      const KernelConfig mode_cfg{w, opt.chunk, mode};
      row = make_row(kOpSpmvSym, w, "sym", std::string(to_string(mode)));
      row.time_ms = median_ms(opt.reps, [&] { spmv_sym<T>(sym, x, y, mode_cfg); });
      report.rows.push_back(row);
    }
    g_sink = static_cast<double>(y[0]);

    report.rows.push_back(cg_row<T>(full, rhs, opt, cfg, "full"));
    const KernelConfig sym_cfg{w, opt.chunk, opt.cg_accumulation};
    report.rows.push_back(cg_row<T>(sym, rhs, opt, sym_cfg, "sym"));
  }
}

void fill_speedups(BenchReport& report) {
  for (auto& row : report.rows) {
    const BenchRow* base = report.find(row.op, 1, row.storage, row.accumulation);
    row.speedup = (base && row.time_ms > 0.0) ? base->time_ms / row.time_ms : 0.0;
  }
  // The baseline row is its own reference.
  for (auto& row : report.rows) {
    if (row.workers == 1) row.speedup = 1.0;
  }
}

}  // namespace

BenchReport run_bench(const LinearSystem& system, const BenchOptions& options) {
  if (options.reps < 3) throw std::invalid_argument("bench needs at least 3 repetitions");
  if (options.workers.empty()) throw std::invalid_argument("bench needs at least one worker count");
  for (const auto w : options.workers) {
    if (w == 0) throw std::invalid_argument("worker counts must be at least 1");
  }
  system.validate();
  const std::uint64_t before = checksum(system);

  CsrMatrix<double> full;
  SymHalfMatrix<double> sym;
  if (const auto* m = std::get_if<CsrMatrix<double>>(&system.matrix)) {
    full = *m;
    sym = extract_lower(*m);
  } else {
    sym = std::get<SymHalfMatrix<double>>(system.matrix);
    full = expand_symmetric(sym);
  }

  std::vector<std::size_t> workers{1};
  for (const auto w : options.workers) {
    if (std::find(workers.begin(), workers.end(), w) == workers.end()) workers.push_back(w);
  }

  BenchReport report;
  report.problem = options.problem;
  report.n = full.n();
  report.nnz = full.nnz();
  report.input_storage = std::string(to_string(system.storage()));
  report.stored_full = full.nnz();
  report.stored_sym = sym.nnz();
  report.precision = options.precision == Precision::kDouble ? "double" : "single";
  report.cg_accumulation = std::string(to_string(options.cg_accumulation));
  report.reps = options.reps;
  report.load_ms = options.load_ms;

  if (options.precision == Precision::kDouble) {
    bench_typed<double>(full, sym, system.b, options, workers, report);
  } else {
    bench_typed<float>(full, sym, system.b, options, workers, report);
  }
  fill_speedups(report);

  report.checksum = checksum(system);
  if (report.checksum != before) throw Error("benchmark modified its input system");
  return report;
}

}  // namespace spcg::cli
