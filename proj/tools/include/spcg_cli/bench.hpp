#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spcg/cg.hpp"
#include "spcg/kernels.hpp"
#include "spcg/matio.hpp"
#include "spcg_cli/bench_report.hpp"

namespace spcg::cli {

enum class Precision { kDouble, kSingle };

struct BenchOptions {
  /// Worker counts to time; a workers=1 baseline is added when missing.
  std::vector<std::size_t> workers{1};
  std::size_t reps = 5;
  std::optional<std::size_t> chunk;
  Precision precision = Precision::kDouble;
  /// Scatter mode for the symmetric-storage CG run.
  Accumulation cg_accumulation = Accumulation::kAtomic;
  CgOptions cg;
  std::string problem;
  double load_ms = 0.0;
};

/// Times dot, axpy, both SpMV kernels (sym in both scatter modes) and a CG
/// solve per storage kind at every worker count. Throws std::invalid_argument
/// when reps < 3; the system must be symmetric.
BenchReport run_bench(const LinearSystem& system, const BenchOptions& options);

}  // namespace spcg::cli
