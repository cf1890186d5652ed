#pragma once

// Matrix Market coordinate files and the binary .spcg linear-system container.
//
// .spcg layout, all little-endian:
//   char[4] magic "SPCG"
//   u32     version (1)
//   u32     flags: bit 0 = symmetric half storage, bit 1 = x_ref present
//   u64     n
//   u64     nnz (stored entries)
//   u64     row_start[n + 1]
//   u32     col_idx[nnz]
//   f64     values[nnz]
//   f64     b[n]
//   f64     x_ref[n]   (only with flag bit 1)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <variant>

#include "spcg/sparse.hpp"

namespace spcg {

enum class StorageKind { kFull, kSymHalf };

std::string_view to_string(StorageKind kind);

using AnyMatrix = std::variant<CsrMatrix<double>, SymHalfMatrix<double>>;

StorageKind storage_of(const AnyMatrix& m);
std::size_t dimension_of(const AnyMatrix& m);
std::size_t stored_entries_of(const AnyMatrix& m);

struct LinearSystem {
  AnyMatrix matrix;
  DenseVector<double> b;
  std::optional<DenseVector<double>> x_ref;

  std::size_t n() const { return dimension_of(matrix); }
  StorageKind storage() const { return storage_of(matrix); }
  /// Throws DimensionError when b or x_ref does not have length n.
  void validate() const;

  friend bool operator==(const LinearSystem&, const LinearSystem&) = default;
};

/// `general` yields a CsrMatrix, `symmetric` a SymHalfMatrix of the lower
/// triangle (upper-triangle entries in a symmetric file are mirrored down).
/// Throws FormatError on unsupported banners, bad sizes, out-of-range indices
/// (with the line number) or a symmetric matrix without a stored diagonal.
AnyMatrix read_matrix_market(std::istream& in);
AnyMatrix read_matrix_market(const std::filesystem::path& path);

/// Values are written with 17 significant digits.
void write_matrix_market(const AnyMatrix& m, std::ostream& out);
void write_matrix_market(const AnyMatrix& m, const std::filesystem::path& path);

LinearSystem read_system(std::istream& in);
LinearSystem read_system(const std::filesystem::path& path);
void write_system(const LinearSystem& system, std::ostream& out);
void write_system(const LinearSystem& system, const std::filesystem::path& path);

enum class FileFormat { kSpcg, kMatrixMarket };

/// From an explicit override ("spcg" or "mm"/"mtx"), else the extension.
/// Throws FormatError when neither identifies a format.
FileFormat detect_format(const std::filesystem::path& path,
                         std::optional<std::string_view> override_name = std::nullopt);

/// FNV-1a over the system's arrays; used to prove inputs were not modified.
std::uint64_t checksum(const LinearSystem& system);

}  // namespace spcg
