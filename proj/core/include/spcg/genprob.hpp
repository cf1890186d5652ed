#pragma once

// Deterministic SPD test problems.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "spcg/sparse.hpp"

namespace spcg {

/// SplitMix64 (Steele, Lea and Flood). Fixtures built from it are portable:
/// state += 0x9E3779B97F4A7C15, then the output mix uses multipliers
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with shifts 30, 27 and 31.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class ProblemKind { kPoisson2d, kPoisson3d, kRandomSpd };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kPoisson2d;
  /// Grid extents (nx, ny, nz); random_spd uses dims[0] as n.
  std::array<std::size_t, 3> dims{1, 1, 1};
  double density = 0.1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on zero extents or density outside (0, 1].
  void validate() const;
  std::string describe() const;
};

/// 5-point Laplacian on an nx-by-ny grid, x fastest: 4 on the diagonal, -1 per
/// grid neighbour. Throws ConstructionError when n overflows the index type.
CsrMatrix<double> poisson2d(std::size_t nx, std::size_t ny);

/// 7-point Laplacian on an nx-by-ny-by-nz grid: 6 on the diagonal.
CsrMatrix<double> poisson3d(std::size_t nx, std::size_t ny, std::size_t nz);

/// Symmetric pattern where each pair i < j is present with probability
/// `density`, off-diagonal values uniform in [-1, 0), and the diagonal set to
/// the off-diagonal row abs-sum plus 1. Pairs are visited row-major over the
/// upper triangle, drawing one uniform for presence and, when present, one
/// for the value.
CsrMatrix<double> random_spd(std::size_t n, double density, std::uint64_t seed);

CsrMatrix<double> generate(const ProblemSpec& spec);

/// Uniform entries in [-1, 1) from SplitMix64(seed).
DenseVector<double> random_vector(std::size_t n, std::uint64_t seed);

}  // namespace spcg
