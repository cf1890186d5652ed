#include "spcg/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spcg/errors.hpp"
#include "spcg/worker_pool.hpp"

namespace spcg {

std::string_view to_string(Accumulation mode) {
  return mode == Accumulation::kAtomic ? "atomic" : "privatized";
}

Accumulation parse_accumulation(std::string_view text) {
  if (text == "atomic") return Accumulation::kAtomic;
  if (text == "privatized") return Accumulation::kPrivatized;
  throw std::invalid_argument("unknown accumulation mode '" + std::string(text) + "'");
}

void KernelConfig::validate() const {
  if (workers == 0) throw std::invalid_argument("workers must be at least 1");
  if (chunk && *chunk == 0) throw std::invalid_argument("chunk must be at least 1");
}

std::size_t KernelConfig::chunk_for(std::size_t items) const {
  if (chunk) return *chunk;
  const std::size_t per = 8 * workers;
  return std::max<std::size_t>(1, (items + per - 1) / per);
}

namespace {

struct Partition {
  std::size_t items;
  std::size_t chunk;
  std::size_t units;

  std::size_t begin(std::size_t unit) const { return unit * chunk; }
  std::size_t end(std::size_t unit) const { return std::min(items, (unit + 1) * chunk); }
};

Partition partition(const KernelConfig& cfg, std::size_t items) {
  cfg.validate();
  const std::size_t chunk = cfg.chunk_for(items);
  return {items, chunk, (items + chunk - 1) / chunk};
}

/// Runs body(unit, worker) for every unit, unit u on worker u % workers.
template <typename Body>
void for_each_unit(const KernelConfig& cfg, const Partition& part, Body&& body) {
  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(part.units, 1));
  if (workers <= 1) {
    for (std::size_t u = 0; u < part.units; ++u) body(u, std::size_t{0});
    return;
  }
  // The pool is sized by cfg.workers so lane w always sees the same units.
  WorkerPool& pool = WorkerPool::shared(cfg.workers);
  pool.run([&](std::size_t lane) {
    for (std::size_t u = lane; u < part.units; u += cfg.workers) body(u, lane);
  });
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

template <typename T>
void spmv_full(const CsrMatrix<T>& m, In<T> x, Out<T> y, const KernelConfig& cfg) {
  require_same_length(x.size(), m.n(), "spmv_full input");
  require_same_length(y.size(), m.n(), "spmv_full output");
  const auto rs = m.row_start();
  const auto ci = m.col_idx();
  const auto vals = m.values();
  const Partition part = partition(cfg, m.n());
  for_each_unit(cfg, part, [&](std::size_t unit, std::size_t) {
    for (std::size_t i = part.begin(unit); i < part.end(unit); ++i) {
      T sum{};
      for (offset_type k = rs[i]; k < rs[i + 1]; ++k) sum += vals[k] * x[ci[k]];
      y[i] = sum;
    }
  });
}

template <typename T>
void spmv_sym(const SymHalfMatrix<T>& s, In<T> x, Out<T> y, const KernelConfig& cfg) {
  require_same_length(x.size(), s.n(), "spmv_sym input");
  require_same_length(y.size(), s.n(), "spmv_sym output");
  const std::size_t n = s.n();
  const auto rs = s.row_start();
  const auto ci = s.col_idx();
  const auto vals = s.values();

  // Phase 1: gather over the rows of L + D. Each unit owns its rows.
  const Partition rows = partition(cfg, n);
  for_each_unit(cfg, rows, [&](std::size_t unit, std::size_t) {
    for (std::size_t i = rows.begin(unit); i < rows.end(unit); ++i) {
      T sum{};
      for (offset_type k = rs[i]; k < rs[i + 1]; ++k) sum += vals[k] * x[ci[k]];
      y[i] = sum;
    }
  });

  // Phase 2: scatter L^T x. Units are ranges of stored entries; the diagonal
  // entries inside a range are skipped since phase 1 already applied them.
  const Partition entries = partition(cfg, s.nnz());
  auto scatter = [&](std::size_t unit, auto&& add) {
    const std::size_t first = entries.begin(unit);
    const std::size_t last = entries.end(unit);
    std::size_t row = static_cast<std::size_t>(
        std::upper_bound(rs.begin(), rs.end(), static_cast<offset_type>(first)) - rs.begin() - 1);
    for (std::size_t k = first; k < last; ++k) {
      while (rs[row + 1] <= k) ++row;
      const std::size_t col = ci[k];
      if (col < row) add(col, vals[k] * x[row]);
    }
  };

  if (cfg.accumulation == Accumulation::kAtomic) {
    for_each_unit(cfg, entries, [&](std::size_t unit, std::size_t) {
      scatter(unit, [&](std::size_t col, T contribution) {
        std::atomic_ref<T>(y[col]).fetch_add(contribution, std::memory_order_relaxed);
      });
    });
    return;
  }

  const std::size_t lanes = cfg.workers;
  std::vector<T> priv(lanes * n, T{});
  for_each_unit(cfg, entries, [&](std::size_t unit, std::size_t lane) {
    T* mine = priv.data() + lane * n;
    scatter(unit, [&](std::size_t col, T contribution) { mine[col] += contribution; });
  });
  // Merge rows in parallel; within a row, lanes are added in lane order.
  for_each_unit(cfg, rows, [&](std::size_t unit, std::size_t) {
    for (std::size_t i = rows.begin(unit); i < rows.end(unit); ++i) {
      T acc = y[i];
      for (std::size_t lane = 0; lane < lanes; ++lane) acc += priv[lane * n + i];
      y[i] = acc;
    }
  });
}

template <typename T>
T dot(In<T> u, In<T> v, const KernelConfig& cfg) {
  require_same_length(u.size(), v.size(), "dot");
  const Partition part = partition(cfg, u.size());
  std::vector<T> partial(part.units, T{});
  for_each_unit(cfg, part, [&](std::size_t unit, std::size_t) {
    T sum{};
    for (std::size_t i = part.begin(unit); i < part.end(unit); ++i) sum += u[i] * v[i];
    partial[unit] = sum;
  });
  // Pairwise tree merge in fixed order.
  for (std::size_t width = 1; width < partial.size(); width *= 2) {
    for (std::size_t i = 0; i + width < partial.size(); i += 2 * width) {
      partial[i] += partial[i + width];
    }
  }
  return partial.empty() ? T{} : partial[0];
}

template <typename T>
T norm2(In<T> u, const KernelConfig& cfg) {
  return std::sqrt(dot<T>(u, u, cfg));
}

template <typename T>
void axpy_inplace(T alpha, In<T> u, Out<T> v, const KernelConfig& cfg) {
  require_same_length(u.size(), v.size(), "axpy");
  const Partition part = partition(cfg, u.size());
  for_each_unit(cfg, part, [&](std::size_t unit, std::size_t) {
    for (std::size_t i = part.begin(unit); i < part.end(unit); ++i) v[i] += alpha * u[i];
  });
}

template <typename T>
void xpay_inplace(T beta, In<T> u, Out<T> v, const KernelConfig& cfg) {
  require_same_length(u.size(), v.size(), "xpay");
  const Partition part = partition(cfg, u.size());
  for_each_unit(cfg, part, [&](std::size_t unit, std::size_t) {
    for (std::size_t i = part.begin(unit); i < part.end(unit); ++i) v[i] = u[i] + beta * v[i];
  });
}

#define SPCG_INSTANTIATE(T)                                                               \
  template void spmv_full<T>(const CsrMatrix<T>&, In<T>, Out<T>, const KernelConfig&);    \
  template void spmv_sym<T>(const SymHalfMatrix<T>&, In<T>, Out<T>, const KernelConfig&); \
  template T dot<T>(In<T>, In<T>, const KernelConfig&);                                   \
  template T norm2<T>(In<T>, const KernelConfig&);                                        \
  template void axpy_inplace<T>(T, In<T>, Out<T>, const KernelConfig&);                   \
  template void xpay_inplace<T>(T, In<T>, Out<T>, const KernelConfig&);

SPCG_INSTANTIATE(float)
SPCG_INSTANTIATE(double)

#undef SPCG_INSTANTIATE

}  // namespace spcg
