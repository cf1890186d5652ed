#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "spcg/errors.hpp"
#include "spcg/genprob.hpp"
#include "spcg/kernels.hpp"

namespace spcg {
namespace {

using testing::rel_inf_err;
using testing::two_by_two;
using Vec = DenseVector<double>;

KernelConfig config(std::size_t workers, Accumulation mode = Accumulation::kPrivatized,
                    std::optional<std::size_t> chunk = std::nullopt) {
  return KernelConfig{workers, chunk, mode};
}

TEST(KernelConfig, DefaultChunkGivesEightUnitsPerWorker) {
  EXPECT_EQ(config(1).chunk_for(0), 1u);
  EXPECT_EQ(config(1).chunk_for(100), 13u);  // ceil(100 / 8)
  EXPECT_EQ(config(4).chunk_for(100), 4u);   // ceil(100 / 32)
  EXPECT_EQ(config(4).chunk_for(3), 1u);
  EXPECT_EQ(config(4, Accumulation::kAtomic, 7).chunk_for(100), 7u);
}

TEST(KernelConfig, RejectsZeroes) {
  EXPECT_THROW(config(0).validate(), std::invalid_argument);
  EXPECT_THROW(config(1, Accumulation::kAtomic, 0).validate(), std::invalid_argument);
}

TEST(Accumulation, ParsesNames) {
  EXPECT_EQ(parse_accumulation("atomic"), Accumulation::kAtomic);
  EXPECT_EQ(parse_accumulation(to_string(Accumulation::kPrivatized)), Accumulation::kPrivatized);
  EXPECT_THROW(parse_accumulation("locked"), std::invalid_argument);
}

TEST(SpmvFull, Identity) {
  const auto id = testing::diagonal({1, 1, 1, 1});
  EXPECT_EQ(spmv_full(id, Vec{1, 2, 3, 4}), (Vec{1, 2, 3, 4}));
}

TEST(SpmvFull, TwoByTwo) {
  EXPECT_EQ(spmv_full(two_by_two(), Vec{1, 1}), (Vec{5, 4}));
}

TEST(SpmvFull, PoissonGridTimesOnes) {
  const auto p = poisson2d(3, 3);
  const Vec y = spmv_full(p, Vec(9, 1.0));
  const Vec expect = testing::dense_matvec(testing::to_dense(p.arrays()), Vec(9, 1.0));
  EXPECT_EQ(y, expect);
  EXPECT_EQ(y[4], 0.0);  // interior node
  for (std::size_t i = 0; i < 9; ++i) {
    if (i != 4) {
      EXPECT_GT(y[i], 0.0);
    }
  }
}

TEST(SpmvFull, DimensionMismatch) {
  EXPECT_THROW(spmv_full(two_by_two(), Vec{1, 2, 3}), DimensionError);
}

TEST(SpmvFull, MatchesDenseOracleOnRandomMatrices) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 1 + seed % 64;
    const auto m = testing::random_general(n, 0.3, seed);
    const Vec x = random_vector(n, seed + 1000);
    const Vec ref = testing::dense_matvec(testing::to_dense(m.arrays()), x);
    EXPECT_LE(rel_inf_err(spmv_full(m, x, config(3)), ref), 1e-13) << "seed " << seed;
  }
}

TEST(SpmvFull, BitwiseIndependentOfConfig) {
  const auto m = testing::random_general(60, 0.2, 9);
  const Vec x = random_vector(60, 10);
  const Vec ref = spmv_full(m, x);
  for (std::size_t w : {1u, 2u, 3u, 8u}) {
    for (std::size_t chunk : {1u, 5u, 64u}) {
      EXPECT_EQ(spmv_full(m, x, config(w, Accumulation::kAtomic, chunk)), ref);
    }
  }
}

TEST(SpmvFull, Linearity) {
  const auto m = testing::random_general(40, 0.25, 21);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vec x = random_vector(40, 100 + seed);
    const Vec y = random_vector(40, 200 + seed);
    const double a = 3.0 * SplitMix64(seed).uniform() - 1.5;
    Vec combo(40);
    for (std::size_t i = 0; i < 40; ++i) combo[i] = a * x[i] + y[i];
    const Vec lhs = spmv_full(m, combo);
    const Vec mx = spmv_full(m, x);
    const Vec my = spmv_full(m, y);
    Vec rhs(40);
    for (std::size_t i = 0; i < 40; ++i) rhs[i] = a * mx[i] + my[i];
    EXPECT_LE(rel_inf_err(lhs, rhs), 1e-12);
  }
}

TEST(SpmvSym, TwoByTwo) {
  const auto s = extract_lower(two_by_two());
  for (auto mode : {Accumulation::kAtomic, Accumulation::kPrivatized}) {
    EXPECT_EQ(spmv_sym(s, Vec{1, 1}, config(2, mode)), (Vec{5, 4}));
  }
}

TEST(SpmvSym, DiagonalOnlySkipsScatter) {
  const auto s = extract_lower(testing::diagonal({2, 3}));
  EXPECT_EQ(spmv_sym(s, Vec{1, 1}), (Vec{2, 3}));
}

TEST(SpmvSym, PoissonGridRandomVector) {
  const auto p = poisson2d(3, 3);
  const auto s = extract_lower(p);
  const Vec x = random_vector(9, 77);
  const Vec ref = testing::dense_matvec(testing::to_dense(p.arrays()), x);
  for (std::size_t w : {1u, 2u, 4u}) {
    for (auto mode : {Accumulation::kAtomic, Accumulation::kPrivatized}) {
      EXPECT_LE(rel_inf_err(spmv_sym(s, x, config(w, mode)), ref), 1e-14);
    }
  }
}

TEST(SpmvSym, DimensionMismatch) {
  EXPECT_THROW(spmv_sym(extract_lower(two_by_two()), Vec{1}), DimensionError);
}

TEST(SpmvSym, MatchesFullOnExpansion) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + (seed * 7) % 64;
    const auto half = extract_lower(random_spd(n, 0.2, seed));
    const auto full = expand_symmetric(half);
    const Vec x = random_vector(n, seed + 5);
    const Vec ref = spmv_full(full, x);
    for (std::size_t w : {1u, 2u, 4u, 8u}) {
      for (auto mode : {Accumulation::kAtomic, Accumulation::kPrivatized}) {
        for (std::optional<std::size_t> chunk : {std::optional<std::size_t>{}, std::optional<std::size_t>{1},
                                                  std::optional<std::size_t>{3}}) {
          EXPECT_LE(rel_inf_err(spmv_sym(half, x, config(w, mode, chunk)), ref), 1e-12)
              << "seed " << seed << " workers " << w;
        }
      }
    }
  }
}

// Half storage assembled by hand, with a zero diagonal entry and a row that
// holds only its diagonal.
TEST(SpmvSym, HandBuiltHalfWithZeroDiagonal) {
  const SymHalfMatrix<double> s(
      CsrArrays<double>{3, {0, 1, 2, 5}, {0, 1, 0, 1, 2}, {0.0, 2.0, 1.0, -1.0, 3.0}});
  // Full: [[0,0,1],[0,2,-1],[1,-1,3]]
  EXPECT_EQ(spmv_sym(s, Vec{1, 2, 3}, config(2, Accumulation::kAtomic, 1)),
            (Vec{3.0, 1.0, 8.0}));
}

TEST(SpmvSym, PrivatizedIsBitwiseReproducible) {
  const auto half = extract_lower(random_spd(64, 0.3, 4));
  const Vec x = random_vector(64, 8);
  for (std::size_t w : {2u, 4u, 8u}) {
    const auto cfg = config(w, Accumulation::kPrivatized, 5);
    const Vec first = spmv_sym(half, x, cfg);
    for (int rep = 0; rep < 5; ++rep) EXPECT_EQ(spmv_sym(half, x, cfg), first);
  }
}

TEST(SpmvSym, SinglePrecision) {
  const auto half = convert<float>(extract_lower(poisson2d(5, 4)));
  const DenseVector<float> x(20, 1.0f);
  const auto y = spmv_sym(half, x, config(3, Accumulation::kAtomic));
  const auto full = spmv_full(convert<float>(poisson2d(5, 4)), x);
  EXPECT_EQ(y, full);  // small integers are exact in float
}

TEST(Dot, Examples) {
  EXPECT_EQ(dot(Vec(5, 0.0), Vec{1, 2, 3, 4, 5}), 0.0);
  EXPECT_EQ(dot(Vec{1, 2, 3}, Vec{4, 5, 6}), 32.0);
  const Vec ones(1001, 1.0);
  EXPECT_EQ(dot(ones, ones, config(3, Accumulation::kPrivatized, 7)), 1001.0);
  EXPECT_EQ(dot(Vec{}, Vec{}), 0.0);
}

TEST(Dot, LengthMismatch) {
  EXPECT_THROW(dot(Vec{1, 2}, Vec{1}), DimensionError);
}

TEST(Dot, DeterministicForFixedConfigAndCloseAcrossConfigs) {
  const Vec u = random_vector(5000, 1);
  const Vec v = random_vector(5000, 2);
  double seq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) seq += u[i] * v[i];
  for (std::size_t w : {1u, 2u, 4u, 8u}) {
    const auto cfg = config(w);
    const double first = dot(u, v, cfg);
    EXPECT_EQ(dot(u, v, cfg), first);
    EXPECT_NEAR(first, seq, 1e-12 * std::abs(seq) + 1e-12);
  }
}

TEST(Norm2, Examples) {
  EXPECT_EQ(norm2(Vec(4, 0.0)), 0.0);
  EXPECT_EQ(norm2(Vec{3, 4}), 5.0);
  const Vec r = random_vector(100, 3);
  double seq = 0.0;
  for (const double e : r) seq += e * e;
  seq = std::sqrt(seq);
  EXPECT_LE(std::abs(norm2(r, config(4)) - seq), 1e-15 * seq);
}

TEST(Axpy, Examples) {
  const Vec v = random_vector(17, 4);
  EXPECT_EQ(axpy(0.0, random_vector(17, 5), v), v);
  EXPECT_EQ(axpy(2.0, Vec{1, 1}, Vec{0, 3}), (Vec{2, 5}));
  EXPECT_EQ(axpy(-1.0, v, v), Vec(17, 0.0));
  EXPECT_THROW(axpy(1.0, Vec{1}, Vec{1, 2}), DimensionError);
}

TEST(Axpy, BitwiseIndependentOfConfig) {
  const Vec u = random_vector(999, 6);
  const Vec v = random_vector(999, 7);
  const Vec ref = axpy(0.37, u, v);
  for (std::size_t w : {2u, 8u}) EXPECT_EQ(axpy(0.37, u, v, config(w, Accumulation::kAtomic, 13)), ref);
}

TEST(Xpay, Examples) {
  Vec p{1, 2};
  xpay_inplace<double>(0.5, Vec{10, 20}, p);
  EXPECT_EQ(p, (Vec{10.5, 21.0}));
}

}  // namespace
}  // namespace spcg
