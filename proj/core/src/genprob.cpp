#include "spcg/genprob.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spcg/errors.hpp"

namespace spcg {

void ProblemSpec::validate() const {
  const std::size_t used = kind == ProblemKind::kPoisson2d   ? 2
                           : kind == ProblemKind::kPoisson3d ? 3
                                                             : 1;
  for (std::size_t d = 0; d < used; ++d) {
    if (dims[d] < 1) throw std::invalid_argument("problem extents must be at least 1");
  }
  if (kind == ProblemKind::kRandomSpd && !(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("density must lie in (0, 1]");
  }
}

std::string ProblemSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ProblemKind::kPoisson2d: os << "poisson2d(" << dims[0] << "," << dims[1] << ")"; break;
    case ProblemKind::kPoisson3d:
      os << "poisson3d(" << dims[0] << "," << dims[1] << "," << dims[2] << ")";
      break;
    case ProblemKind::kRandomSpd:
      os << "random_spd(" << dims[0] << "," << density << ",seed=" << seed << ")";
      break;
  }
  return os.str();
}

namespace {

std::size_t checked_product(std::size_t nx, std::size_t ny, std::size_t nz) {
  constexpr std::size_t limit = std::numeric_limits<index_type>::max();
  if (nx == 0 || ny == 0 || nz == 0) throw ConstructionError("grid extents must be at least 1");
  if (nx > limit || ny > limit / nx || nz > limit / (nx * ny)) {
    throw ConstructionError("grid of " + std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                            std::to_string(nz) + " points overflows the index range");
  }
  return nx * ny * nz;
}

// Rows are emitted in column order: -z, -y, -x, centre, +x, +y, +z.
CsrMatrix<double> laplacian(std::size_t nx, std::size_t ny, std::size_t nz, double centre) {
  const std::size_t n = checked_product(nx, ny, nz);
  const std::size_t plane = nx * ny;
  CsrArrays<double> a;
  a.n = n;
  a.row_start.reserve(n + 1);
  a.row_start.push_back(0);
  a.col_idx.reserve(7 * n);
  a.values.reserve(7 * n);
  auto put = [&](std::size_t col, double v) {
    a.col_idx.push_back(static_cast<index_type>(col));
    a.values.push_back(v);
  };
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t row = i + nx * j + plane * k;
        if (k > 0) put(row - plane, -1.0);
        if (j > 0) put(row - nx, -1.0);
        if (i > 0) put(row - 1, -1.0);
        put(row, centre);
        if (i + 1 < nx) put(row + 1, -1.0);
        if (j + 1 < ny) put(row + nx, -1.0);
        if (k + 1 < nz) put(row + plane, -1.0);
        a.row_start.push_back(a.values.size());
      }
    }
  }
  return CsrMatrix<double>(std::move(a));
}

}  // namespace

CsrMatrix<double> poisson2d(std::size_t nx, std::size_t ny) { return laplacian(nx, ny, 1, 4.0); }

CsrMatrix<double> poisson3d(std::size_t nx, std::size_t ny, std::size_t nz) {
  return laplacian(nx, ny, nz, 6.0);
}

CsrMatrix<double> random_spd(std::size_t n, double density, std::uint64_t seed) {
  if (n == 0) throw ConstructionError("random_spd needs n >= 1");
  if (n > std::numeric_limits<index_type>::max()) {
    throw ConstructionError("random_spd dimension overflows the index range");
  }
  SplitMix64 rng(seed);
  // Upper-triangle entries per row, in increasing column order.
  std::vector<std::vector<std::pair<index_type, double>>> upper(n);
  std::vector<std::vector<std::pair<index_type, double>>> lower(n);
  std::vector<double> abs_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() >= density) continue;
      const double v = rng.uniform() - 1.0;  // [-1, 0)
      upper[i].emplace_back(static_cast<index_type>(j), v);
      lower[j].emplace_back(static_cast<index_type>(i), v);
      abs_sum[i] += std::abs(v);
      abs_sum[j] += std::abs(v);
    }
  }
  CsrArrays<double> a;
  a.n = n;
  a.row_start.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [c, v] : lower[i]) {
      a.col_idx.push_back(c);
      a.values.push_back(v);
    }
    a.col_idx.push_back(static_cast<index_type>(i));
    a.values.push_back(abs_sum[i] + 1.0);
    for (const auto& [c, v] : upper[i]) {
      a.col_idx.push_back(c);
      a.values.push_back(v);
    }
    a.row_start.push_back(a.values.size());
  }
  return CsrMatrix<double>(std::move(a));
}

CsrMatrix<double> generate(const ProblemSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ProblemKind::kPoisson2d: return poisson2d(spec.dims[0], spec.dims[1]);
    case ProblemKind::kPoisson3d: return poisson3d(spec.dims[0], spec.dims[1], spec.dims[2]);
    case ProblemKind::kRandomSpd: return random_spd(spec.dims[0], spec.density, spec.seed);
  }
  throw std::invalid_argument("unknown problem kind");
}

DenseVector<double> random_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  DenseVector<double> v(n);
  for (auto& e : v) e = 2.0 * rng.uniform() - 1.0;
  return v;
}

}  // namespace spcg
