#include "spcg_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "spcg/cg.hpp"
#include "spcg/errors.hpp"
#include "spcg/genprob.hpp"
#include "spcg/kernels.hpp"
#include "spcg/matio.hpp"
#include "spcg_cli/bench.hpp"

namespace spcg::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Loaded {
  LinearSystem system;
  bool synthesized_rhs = false;
  double load_ms = 0.0;
};

DenseVector<double> multiply(const AnyMatrix& m, const DenseVector<double>& x) {
  if (const auto* full = std::get_if<CsrMatrix<double>>(&m)) return spmv_full(*full, x);
  return spmv_sym(std::get<SymHalfMatrix<double>>(m), x);
}

/// Matrix Market inputs carry no right-hand side; they get b = A * 1 with
/// the all-ones vector as reference solution.
Loaded load(const fs::path& path, const std::string& in_format) {
  const auto start = Clock::now();
  Loaded loaded;
  const FileFormat format =
      detect_format(path, in_format.empty() ? std::nullopt : std::optional<std::string_view>(in_format));
  if (format == FileFormat::kSpcg) {
    loaded.system = read_system(path);
  } else {
    loaded.system.matrix = read_matrix_market(path);
    loaded.synthesized_rhs = true;
  }
  loaded.load_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (loaded.synthesized_rhs) {
    DenseVector<double> ones(loaded.system.n(), 1.0);
    loaded.system.b = multiply(loaded.system.matrix, ones);
    loaded.system.x_ref = std::move(ones);
  }
  loaded.system.validate();
  return loaded;
}

AnyMatrix to_storage(const AnyMatrix& m, StorageKind kind, double tol) {
  if (storage_of(m) == kind) return m;
  if (kind == StorageKind::kSymHalf) return extract_lower(std::get<CsrMatrix<double>>(m), tol);
  return expand_symmetric(std::get<SymHalfMatrix<double>>(m));
}

StorageKind parse_storage(const std::string& s) {
  if (s == "full") return StorageKind::kFull;
  if (s == "sym") return StorageKind::kSymHalf;
  throw UsageError("storage must be 'full' or 'sym'");
}

Precision parse_precision(const std::string& s) {
  if (s == "double") return Precision::kDouble;
  if (s == "single") return Precision::kSingle;
  throw UsageError("precision must be 'double' or 'single'");
}

void write_output(const LinearSystem& system, const fs::path& path, std::ostream& out) {
  if (detect_format(path) == FileFormat::kSpcg) {
    write_system(system, path);
  } else {
    write_matrix_market(system.matrix, path);
    out << "note: Matrix Market output holds the matrix only\n";
  }
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::vector<std::size_t> poisson2d;
  std::vector<std::size_t> poisson3d;
  std::size_t random_n = 0;
  double density = 0.1;
  std::uint64_t seed = 1;
  std::string storage = "full";
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const int kinds = !a.poisson2d.empty() + !a.poisson3d.empty() + (a.random_n > 0);
  if (kinds != 1) {
    throw UsageError("gen needs exactly one of --poisson2d, --poisson3d, --random-spd");
  }
  ProblemSpec spec;
  spec.seed = a.seed;
  spec.density = a.density;
  if (!a.poisson2d.empty()) {
    spec.kind = ProblemKind::kPoisson2d;
    spec.dims = {a.poisson2d[0], a.poisson2d[1], 1};
  } else if (!a.poisson3d.empty()) {
    spec.kind = ProblemKind::kPoisson3d;
    spec.dims = {a.poisson3d[0], a.poisson3d[1], a.poisson3d[2]};
  } else {
    spec.kind = ProblemKind::kRandomSpd;
    spec.dims = {a.random_n, 1, 1};
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const StorageKind storage = parse_storage(a.storage);

  const CsrMatrix<double> m = generate(spec);
  LinearSystem system;
  system.x_ref = random_vector(m.n(), spec.seed);
  system.b = spmv_full(m, *system.x_ref);
  system.matrix = to_storage(m, storage, kDefaultSymmetryTol);
  write_output(system, a.out, out);

  out << "problem: " << spec.describe() << "\n"
      << "n: " << m.n() << "\n"
      << "nnz: " << m.nnz() << "\n"
      << "storage: " << to_string(storage) << " (" << stored_entries_of(system.matrix)
      << " stored entries)\n"
      << "wrote: " << a.out << "\n";
  return kExitOk;
}

struct ConvertArgs {
  std::string in;
  std::string out;
  std::string to;
  std::string in_format;
  double tol = kDefaultSymmetryTol;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  if (a.to != "full" && a.to != "sym" && a.to != "mm") {
    throw UsageError("--to must be one of full, sym, mm");
  }
  Loaded loaded = load(a.in, a.in_format);
  const std::size_t before = stored_entries_of(loaded.system.matrix);
  if (a.to == "mm") {
    write_matrix_market(loaded.system.matrix, fs::path(a.out));
  } else {
    loaded.system.matrix =
        to_storage(loaded.system.matrix, parse_storage(a.to), a.tol);
    write_output(loaded.system, a.out, out);
  }
  out << "stored entries: " << before << " -> " << stored_entries_of(loaded.system.matrix) << "\n"
      << "wrote: " << a.out << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string in;
  std::string in_format;
  double tol = 1e-10;
  std::size_t max_iter = 0;
  std::size_t workers = 1;
  std::size_t chunk = 0;
  std::string storage;
  std::string accum = "privatized";
  std::string precision = "double";
};

template <typename T>
int solve_typed(const LinearSystem& system, const CgOptions& opts, const KernelConfig& cfg,
                std::ostream& out) {
  const DenseVector<T> b(system.b.begin(), system.b.end());
  SolveReport<T> report = std::visit(
      [&](const auto& m) { return cg_solve(convert<T>(m), b, opts, cfg); }, system.matrix);

  out << "iterations: " << report.iterations << "\n"
      << "converged: " << (report.converged ? "yes" : "no") << "\n"
      << "final relative residual: " << std::scientific << std::setprecision(3)
      << report.final_relative_residual << "\n"
      << std::fixed << std::setprecision(3) << "time: " << report.timings.total.count()
      << " ms (spmv " << report.timings.spmv.count() << ", dot " << report.timings.dot.count()
      << ", axpy " << report.timings.axpy.count() << ")\n";
  if (system.x_ref) {
    double err = 0.0;
    for (std::size_t i = 0; i < report.x.size(); ++i) {
      err = std::max(err, std::abs(static_cast<double>(report.x[i]) - (*system.x_ref)[i]));
    }
    out << "error vs x_ref (inf-norm): " << std::scientific << std::setprecision(3) << err << "\n";
  }
  return report.converged ? kExitOk : kExitNumerical;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  Loaded loaded = load(a.in, a.in_format);
  if (!a.storage.empty()) {
    loaded.system.matrix = to_storage(loaded.system.matrix, parse_storage(a.storage),
                                      kDefaultSymmetryTol);
  }
  CgOptions opts;
  opts.tol = a.tol;
  if (a.max_iter > 0) opts.max_iter = a.max_iter;
  KernelConfig cfg;
  cfg.workers = a.workers;
  if (a.chunk > 0) cfg.chunk = a.chunk;
  cfg.accumulation = parse_accumulation(a.accum);
  try {
    opts.validate();
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  out << "system: n=" << loaded.system.n() << " stored=" << stored_entries_of(loaded.system.matrix)
      << " storage=" << to_string(loaded.system.storage()) << " workers=" << cfg.workers
      << " accumulation=" << to_string(cfg.accumulation) << " precision=" << a.precision << "\n";
  if (loaded.synthesized_rhs) out << "rhs: b = A * ones (Matrix Market input)\n";
  return parse_precision(a.precision) == Precision::kDouble
             ? solve_typed<double>(loaded.system, opts, cfg, out)
             : solve_typed<float>(loaded.system, opts, cfg, out);
}

struct BenchArgs {
  std::string in;
  std::string in_format;
  std::vector<std::size_t> workers{1};
  std::size_t reps = 5;
  std::size_t chunk = 0;
  std::string format = "text";
  std::string accum = "atomic";
  std::string precision = "double";
  double tol = 1e-10;
  std::size_t max_iter = 0;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.reps < 3) throw UsageError("--reps must be at least 3");
  if (a.format != "text" && a.format != "csv" && a.format != "json") {
    throw UsageError("--format must be text, csv or json");
  }
  const Loaded loaded = load(a.in, a.in_format);

  BenchOptions opt;
  opt.workers = a.workers;
  opt.reps = a.reps;
  if (a.chunk > 0) opt.chunk = a.chunk;
  opt.precision = parse_precision(a.precision);
  opt.cg_accumulation = parse_accumulation(a.accum);
  opt.cg.tol = a.tol;
  if (a.max_iter > 0) opt.cg.max_iter = a.max_iter;
  opt.problem = fs::path(a.in).filename().string();
  opt.load_ms = loaded.load_ms;

  const BenchReport report = run_bench(loaded.system, opt);
  if (a.format == "csv") {
    out << to_csv(report);
  } else if (a.format == "json") {
    out << to_json(report);
  } else {
    out << to_text(report);
  }
  const bool all_converged = std::all_of(report.rows.begin(), report.rows.end(), [](const BenchRow& r) {
    return !r.converged || *r.converged;
  });
  return all_converged ? kExitOk : kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse conjugate gradient toolkit: generate, convert, solve, benchmark", "spcg"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an SPD system with a known solution");
  auto* opt2 = g->add_option("--poisson2d", gen.poisson2d, "5-point Laplacian grid NX NY")->expected(2);
  auto* opt3 = g->add_option("--poisson3d", gen.poisson3d, "7-point Laplacian grid NX NY NZ")->expected(3);
  auto* optr = g->add_option("--random-spd", gen.random_n, "Random diagonally dominant SPD of order N");
  opt2->excludes(opt3)->excludes(optr);
  opt3->excludes(optr);
  g->add_option("--density", gen.density, "Off-diagonal pair probability for --random-spd");
  g->add_option("--seed", gen.seed, "Seed for the matrix and the reference solution");
  g->add_option("--storage", gen.storage, "full or sym");
  g->add_option("-o,--out", gen.out, "Output file (.spcg or .mtx)")->required();

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "Convert storage kind or file format");
  c->add_option("in", conv.in, "Input file")->required();
  c->add_option("out", conv.out, "Output file")->required();
  c->add_option("--to", conv.to, "full, sym or mm")->required();
  c->add_option("--in-format", conv.in_format, "Override input format (spcg|mm)");
  c->add_option("--sym-tol", conv.tol, "Relative symmetry tolerance for --to sym");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Run conjugate gradient on a system");
  s->add_option("in", sol.in, "Input file")->required();
  s->add_option("--in-format", sol.in_format, "Override input format (spcg|mm)");
  s->add_option("--tol", sol.tol, "Relative residual tolerance");
  s->add_option("--max-iter", sol.max_iter, "Iteration cap (default n)");
  s->add_option("--workers", sol.workers, "Parallel workers");
  s->add_option("--chunk", sol.chunk, "Items per work unit (default automatic)");
  s->add_option("--storage", sol.storage, "full or sym (default: as stored)");
  s->add_option("--accum", sol.accum, "atomic or privatized scatter");
  s->add_option("--precision", sol.precision, "double or single");

  BenchArgs ben;
  auto* b = app.add_subcommand("bench", "Time kernels and CG per worker count");
  b->add_option("in", ben.in, "Input file")->required();
  b->add_option("--in-format", ben.in_format, "Override input format (spcg|mm)");
  b->add_option("--workers", ben.workers, "Comma-separated worker counts")->delimiter(',');
  b->add_option("--reps", ben.reps, "Timed repetitions per kernel (>= 3)");
  b->add_option("--chunk", ben.chunk, "Items per work unit (default automatic)");
  b->add_option("--format", ben.format, "text, csv or json");
  b->add_option("--accum", ben.accum, "Scatter mode for the sym-storage CG run");
  b->add_option("--precision", ben.precision, "double or single");
  b->add_option("--tol", ben.tol, "CG relative residual tolerance");
  b->add_option("--max-iter", ben.max_iter, "CG iteration cap (default n)");

  std::vector<std::string> argv_store{"spcg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (c->parsed()) return cmd_convert(conv, out);
    if (s->parsed()) return cmd_solve(sol, out);
    return cmd_bench(ben, out);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BreakdownError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace spcg::cli
