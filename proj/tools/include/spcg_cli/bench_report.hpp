#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spcg::cli {

/// Row labels, matching the per-operation rows of the speed-up table.
inline constexpr const char* kOpDot = "dotProd";
inline constexpr const char* kOpAxpy = "AXPY";
inline constexpr const char* kOpSpmv = "SpMV";
inline constexpr const char* kOpSpmvSym = "SpMV(sym)";
inline constexpr const char* kOpCg = "CG/#int";

/// One operation timed at one worker count.
struct BenchRow {
  std::string op;
  std::string storage = "-";       // "full" / "sym" for SpMV and CG rows
  std::string accumulation = "-";  // scatter mode where it applies
  std::size_t workers = 1;
  double time_ms = 0.0;  // median for kernels, single run for CG
  double speedup = 1.0;  // workers=1 time of the same row kind / time_ms
  std::optional<std::size_t> iterations;
  std::optional<double> final_residual;
  std::optional<bool> converged;

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
  std::string problem;
  std::size_t n = 0;
  std::size_t nnz = 0;  // entries of the full matrix
  std::string input_storage;
  std::size_t stored_full = 0;
  std::size_t stored_sym = 0;
  std::string precision = "double";
  std::string cg_accumulation = "atomic";
  std::size_t reps = 0;
  double load_ms = 0.0;
  std::uint64_t checksum = 0;
  std::vector<BenchRow> rows;

  std::vector<std::size_t> worker_counts() const;
  /// nullptr when absent.
  const BenchRow* find(const std::string& op, std::size_t workers, const std::string& storage = "-",
                       const std::string& accumulation = "-") const;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

std::string to_text(const BenchReport& report);
/// One line per (operation, worker count); report metadata is repeated on
/// every line so the file alone reconstructs the report.
std::string to_csv(const BenchReport& report);
std::string to_json(const BenchReport& report);

/// Inverse of to_csv / to_json. Throw std::runtime_error on malformed input.
BenchReport report_from_csv(const std::string& text);
BenchReport report_from_json(const std::string& text);

}  // namespace spcg::cli
