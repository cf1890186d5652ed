#pragma once

// Parallel SpMV and BLAS-1 kernels.
//
// Work is split into units of `chunk` consecutive items (rows, stored
// entries or vector elements). Unit u is executed by worker u % workers, and
// each worker walks its units in increasing order, so the assignment of work
// to workers is a pure function of the configuration.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <type_traits>

#include "spcg/sparse.hpp"

namespace spcg {

template <typename T>
using In = std::type_identity_t<std::span<const T>>;
template <typename T>
using Out = std::type_identity_t<std::span<T>>;

enum class Accumulation {
  kAtomic,      // indivisible adds into the shared output
  kPrivatized,  // one private output per worker, merged in worker order
};

std::string_view to_string(Accumulation mode);
/// Accepts "atomic" or "privatized"; throws std::invalid_argument otherwise.
Accumulation parse_accumulation(std::string_view text);

struct KernelConfig {
  std::size_t workers = 1;
  /// Items per work unit. Unset means max(1, ceil(items / (8 * workers))).
  std::optional<std::size_t> chunk;
  Accumulation accumulation = Accumulation::kPrivatized;

  /// Throws std::invalid_argument when workers or an explicit chunk is 0.
  void validate() const;
  std::size_t chunk_for(std::size_t items) const;
};

/// y = M x. Each output row is one sequential reduction, so the result does
/// not depend on the configuration.
template <typename T>
void spmv_full(const CsrMatrix<T>& m, In<T> x, Out<T> y,
               const KernelConfig& cfg = {});

/// y = (L + D) x + L^T x in two phases run back to back: a row gather over
/// the stored rows, then a scatter of every strictly-lower entry (i, j, v)
/// into y[j] += v * x[i], using cfg.accumulation to resolve conflicting
/// writes. Privatized mode is bitwise reproducible for a fixed configuration.
template <typename T>
void spmv_sym(const SymHalfMatrix<T>& s, In<T> x, Out<T> y,
              const KernelConfig& cfg = {});

/// Chunk partial sums merged pairwise in chunk order.
template <typename T>
T dot(In<T> u, In<T> v, const KernelConfig& cfg = {});

template <typename T>
T norm2(In<T> u, const KernelConfig& cfg = {});

/// v += alpha * u
template <typename T>
void axpy_inplace(T alpha, In<T> u, Out<T> v, const KernelConfig& cfg = {});

/// v = u + beta * v
template <typename T>
void xpay_inplace(T beta, In<T> u, Out<T> v, const KernelConfig& cfg = {});

// Value-returning forms.

template <typename T>
DenseVector<T> spmv_full(const CsrMatrix<T>& m, In<T> x,
                         const KernelConfig& cfg = {}) {
  DenseVector<T> y(m.n());
  spmv_full<T>(m, x, y, cfg);
  return y;
}

template <typename T>
DenseVector<T> spmv_sym(const SymHalfMatrix<T>& s, In<T> x,
                        const KernelConfig& cfg = {}) {
  DenseVector<T> y(s.n());
  spmv_sym<T>(s, x, y, cfg);
  return y;
}

template <typename T>
T dot(const DenseVector<T>& u, const DenseVector<T>& v, const KernelConfig& cfg = {}) {
  return dot<T>(std::span<const T>(u), std::span<const T>(v), cfg);
}

template <typename T>
T norm2(const DenseVector<T>& u, const KernelConfig& cfg = {}) {
  return norm2<T>(std::span<const T>(u), cfg);
}

/// Returns v + alpha * u.
template <typename T>
DenseVector<T> axpy(T alpha, In<T> u, In<T> v,
                    const KernelConfig& cfg = {}) {
  DenseVector<T> out(v.begin(), v.end());
  axpy_inplace<T>(alpha, u, out, cfg);
  return out;
}

}  // namespace spcg
