#pragma once

// Sparse storage: full CSR, and symmetric half storage holding only the lower
// triangle plus diagonal (A = L + D + L^T).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spcg {

using index_type = std::uint32_t;
using offset_type = std::uint64_t;

/// Relative tolerance used by is_symmetric() and extract_lower() unless overridden.
inline constexpr double kDefaultSymmetryTol = 1e-12;

template <typename T>
using DenseVector = std::vector<T>;

template <typename T>
struct Triplet {
  index_type row = 0;
  index_type col = 0;
  T value{};
};

/// Raw, unvalidated CSR arrays. Column indices are 0-based.
template <typename T>
struct CsrArrays {
  std::size_t n = 0;
  std::vector<offset_type> row_start;
  std::vector<index_type> col_idx;
  std::vector<T> values;

  std::size_t nnz() const { return values.size(); }
  friend bool operator==(const CsrArrays&, const CsrArrays&) = default;
};

enum class Rule {
  kArrayLength,      // row_start has n+1 slots, col_idx and values agree
  kOffsetsStart,     // row_start[0] == 0
  kOffsetsMonotone,  // row_start non-decreasing
  kOffsetsEnd,       // row_start[n] == nnz
  kColumnRange,      // col in [0, n)
  kColumnOrder,      // strictly increasing columns within a row
  kUpperEntry,       // half storage: col <= row
  kMissingDiagonal,  // half storage: diagonal is the last entry of the row
};

const char* rule_name(Rule rule);

struct Violation {
  Rule rule;
  std::size_t row = 0;
  std::size_t position = 0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

/// Structural checks of the CSR invariants. Never throws.
template <typename T>
ValidationReport validate_csr(const CsrArrays<T>& arrays);

/// validate_csr() plus the lower-triangular and stored-diagonal rules.
template <typename T>
ValidationReport validate_sym_half(const CsrArrays<T>& arrays);

/// Immutable square CSR matrix. Construction validates.
template <typename T>
class CsrMatrix {
 public:
  using value_type = T;

  CsrMatrix() : arrays_{0, {0}, {}, {}} {}
  /// Throws ConstructionError if the arrays break any CSR invariant.
  explicit CsrMatrix(CsrArrays<T> arrays);

  std::size_t n() const { return arrays_.n; }
  std::size_t nnz() const { return arrays_.values.size(); }
  std::span<const offset_type> row_start() const { return arrays_.row_start; }
  std::span<const index_type> col_idx() const { return arrays_.col_idx; }
  std::span<const T> values() const { return arrays_.values; }
  const CsrArrays<T>& arrays() const { return arrays_; }

  /// Value at (row, col); 0 when not stored.
  T at(std::size_t row, std::size_t col) const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  CsrArrays<T> arrays_;
};

/// Immutable lower-triangle-plus-diagonal storage of a symmetric matrix.
/// Rows are CSR over L+D; reading the same arrays column-wise gives L^T.
template <typename T>
class SymHalfMatrix {
 public:
  using value_type = T;

  SymHalfMatrix() : arrays_{0, {0}, {}, {}} {}
  /// Throws ConstructionError on CSR violations or entries above the
  /// diagonal. A missing diagonal is tolerated but clears diag_present().
  explicit SymHalfMatrix(CsrArrays<T> arrays);

  std::size_t n() const { return arrays_.n; }
  /// Stored entries of L+D.
  std::size_t nnz() const { return arrays_.values.size(); }
  /// Entries of the full matrix this represents, assuming a full diagonal.
  std::size_t full_nnz() const { return 2 * nnz() - n(); }
  bool diag_present() const { return diag_present_; }

  std::span<const offset_type> row_start() const { return arrays_.row_start; }
  std::span<const index_type> col_idx() const { return arrays_.col_idx; }
  std::span<const T> values() const { return arrays_.values; }
  const CsrArrays<T>& arrays() const { return arrays_; }

  friend bool operator==(const SymHalfMatrix&, const SymHalfMatrix&) = default;

 private:
  CsrArrays<T> arrays_;
  bool diag_present_ = true;
};

struct TripletOptions {
  bool drop_zeros = false;
};

/// Sorts entries per row and sums duplicates. Throws ConstructionError
/// naming the first triplet whose index is out of range.
template <typename T>
CsrMatrix<T> build_csr_from_triplets(std::span<const Triplet<T>> triplets, std::size_t n,
                                     TripletOptions options = {});

/// First stored (i, j) whose mirror (j, i) differs by more than
/// tol * max(1, |v|). Unstored mirrors count as 0.
template <typename T>
std::optional<std::pair<std::size_t, std::size_t>> first_asymmetry(
    const CsrMatrix<T>& m, double tol = kDefaultSymmetryTol);

template <typename T>
bool is_symmetric(const CsrMatrix<T>& m, double tol = kDefaultSymmetryTol) {
  return !first_asymmetry(m, tol).has_value();
}

/// Keeps entries with col <= row. Throws SymmetryError when m is not
/// symmetric within tol or a diagonal entry is not stored.
template <typename T>
SymHalfMatrix<T> extract_lower(const CsrMatrix<T>& m, double tol = kDefaultSymmetryTol);

/// Rebuilds the full matrix L + D + L^T.
template <typename T>
CsrMatrix<T> expand_symmetric(const SymHalfMatrix<T>& s);

/// Precision conversion of the value array; structure is shared verbatim.
template <typename To, typename From>
CsrArrays<To> convert_values(const CsrArrays<From>& in) {
  CsrArrays<To> out{in.n, in.row_start, in.col_idx, {}};
  out.values.reserve(in.values.size());
  for (const From v : in.values) out.values.push_back(static_cast<To>(v));
  return out;
}

template <typename To, typename From>
CsrMatrix<To> convert(const CsrMatrix<From>& m) {
  return CsrMatrix<To>(convert_values<To>(m.arrays()));
}

template <typename To, typename From>
SymHalfMatrix<To> convert(const SymHalfMatrix<From>& m) {
  return SymHalfMatrix<To>(convert_values<To>(m.arrays()));
}

}  // namespace spcg
