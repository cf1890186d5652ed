#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "spcg/cg.hpp"
#include "spcg/errors.hpp"
#include "spcg/genprob.hpp"

namespace spcg {
namespace {

using Vec = DenseVector<double>;
using testing::inf_diff;

CgOptions with_tol(double tol) {
  CgOptions o;
  o.tol = tol;
  return o;
}

TEST(CheckConvergence, Definition) {
  const CgOptions o = with_tol(1e-10);
  EXPECT_TRUE(check_convergence(0.0, 3.0, o));
  EXPECT_TRUE(check_convergence(0.0, 0.0, o));
  EXPECT_FALSE(check_convergence(1e-30, 0.0, o));
  EXPECT_TRUE(check_convergence(1e-11, 1.0, o));
  EXPECT_FALSE(check_convergence(1e-9, 1.0, o));
  EXPECT_TRUE(check_convergence(5e-10, 10.0, o));
}

TEST(CgOptions, Validation) {
  EXPECT_THROW(with_tol(0.0).validate(), std::invalid_argument);
  CgOptions o;
  o.max_iter = 0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(CgSolve, IdentityConvergesInOneStep) {
  for (std::size_t n : {1u, 7u, 50u}) {
    const auto id = testing::diagonal(Vec(n, 1.0));
    const Vec b = random_vector(n, n);
    const auto r = cg_solve(id, b);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1u);
    EXPECT_LE(inf_diff(r.x, b), 1e-15);
  }
}

TEST(CgSolve, TwoByTwoMatchesDirectSolve) {
  const auto r = cg_solve(testing::two_by_two(), Vec{1, 2});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2u);
  EXPECT_NEAR(r.x[0], 1.0 / 11.0, 1e-14);
  EXPECT_NEAR(r.x[1], 7.0 / 11.0, 1e-14);
}

TEST(CgSolve, DistinctEigenvalueBound) {
  const std::size_t n = 32;
  for (std::size_t k : {1u, 2u, 3u, 5u, 10u}) {
    Vec d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = 1.0 + static_cast<double>(i % k);
    const auto a = testing::diagonal(d);
    const Vec b = random_vector(n, 40 + k);
    const auto r = cg_solve(a, b);
    const Vec direct = testing::dense_solve(testing::to_dense(a.arrays()), b);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, k + 2) << "k=" << k;
    EXPECT_LE(inf_diff(r.x, direct), 1e-9);
  }
}

TEST(CgSolve, ZeroRightHandSide) {
  const auto r = cg_solve(poisson2d(4, 4), Vec(16, 0.0));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.x, Vec(16, 0.0));
  EXPECT_EQ(r.final_relative_residual, 0.0);
}

TEST(CgSolve, ExactInitialGuessNeedsNoIterations) {
  const auto a = poisson2d(3, 3);
  const Vec x = random_vector(9, 1);
  const Vec b = spmv_full(a, x);
  const auto r = cg_solve<double>(a, std::span<const double>(b), std::span<const double>(x));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0u);
}

TEST(CgSolve, IndefiniteMatrixBreaksDown) {
  const auto a = testing::diagonal({1.0, -1.0});
  try {
    cg_solve(a, Vec{1.0, 1.0});
    FAIL() << "expected BreakdownError";
  } catch (const BreakdownError& e) {
    EXPECT_NE(std::string(e.what()).find("not positive definite"), std::string::npos);
  }
  EXPECT_THROW(cg_solve(extract_lower(a), Vec{1.0, 1.0}), BreakdownError);
}

TEST(CgSolve, NonFiniteInputIsNumericalBreakdown) {
  EXPECT_THROW(cg_solve(testing::two_by_two(), Vec{1.0, std::nan("")}), BreakdownError);
}

TEST(CgSolve, DimensionMismatch) {
  EXPECT_THROW(cg_solve(testing::two_by_two(), Vec{1.0}), DimensionError);
}

TEST(CgSolve, MaxIterTruncates) {
  CgOptions o;
  o.max_iter = 3;
  const auto r = cg_solve(poisson2d(10, 10), random_vector(100, 2), o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_GT(r.final_relative_residual, o.tol);
}

TEST(CgSolve, HistoryIsRecorded) {
  CgOptions o;
  o.record_history = true;
  const auto r = cg_solve(poisson2d(6, 5), random_vector(30, 3), o);
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.residual_history.size(), r.iterations);
  EXPECT_EQ(r.alpha.size(), r.iterations);
  EXPECT_EQ(r.beta.size(), r.iterations - 1);
  EXPECT_LE(r.residual_history.back(), o.tol);
  for (const double a : r.alpha) EXPECT_GT(a, 0.0);
  EXPECT_EQ(cg_solve(poisson2d(6, 5), random_vector(30, 3)).residual_history.size(), 0u);
}

TEST(CgSolve, TimingsAreFilled) {
  const auto r = cg_solve(poisson2d(20, 20), random_vector(400, 3));
  EXPECT_GT(r.timings.total.count(), 0.0);
  EXPECT_GT(r.timings.spmv.count(), 0.0);
  EXPECT_LE(r.timings.spmv + r.timings.dot + r.timings.axpy, r.timings.total);
}

TEST(CgSolve, RandomSpdTerminatesNearN) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 64;
    const auto a = random_spd(n, 0.3, seed);
    const Vec b = random_vector(n, seed + 7);
    const auto r = cg_solve(a, b);
    ASSERT_TRUE(r.converged) << "seed " << seed;
    EXPECT_LE(r.iterations, n + 5) << "seed " << seed;
    // Converged solves carry a certificate on the true residual.
    EXPECT_LE(r.final_relative_residual, 10 * CgOptions{}.tol);
  }
}

TEST(CgSolve, FullAndHalfStorageAgree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 10 + seed * 3;
    const auto a = random_spd(n, 0.2, seed);
    const Vec b = random_vector(n, seed);
    const auto full = cg_solve(a, b);
    for (auto mode : {Accumulation::kAtomic, Accumulation::kPrivatized}) {
      const auto half = cg_solve(extract_lower(a), b, {}, KernelConfig{4, std::nullopt, mode});
      EXPECT_LE(std::max(full.iterations, half.iterations) - std::min(full.iterations, half.iterations), 1u);
      EXPECT_LE(inf_diff(full.x, half.x), 1e-8);
    }
  }
}

TEST(CgSolve, SuccessiveResidualsAreOrthogonal) {
  const auto a = random_spd(48, 0.2, 99);
  const Vec b = random_vector(48, 98);
  Vec previous = b;  // r_0 for x0 = 0
  std::size_t checked = 0;
  const CgObserver<double> watch = [&](std::size_t, std::span<const double> r) {
    const Vec current(r.begin(), r.end());
    const double cosine = dot(current, previous) / (norm2(current) * norm2(previous));
    EXPECT_LE(std::abs(cosine), 1e-6);
    previous = current;
    ++checked;
  };
  const Vec zero(48, 0.0);
  const auto r = cg_solve<double>(a, std::span<const double>(b), std::span<const double>(zero), {}, {}, watch);
  EXPECT_EQ(checked, r.iterations);
  EXPECT_GT(checked, 2u);
}

TEST(CgSolve, ScalingLeavesIterationsUnchanged) {
  const auto a = random_spd(40, 0.25, 17);
  const Vec b = random_vector(40, 18);
  const auto base = cg_solve(a, b);
  for (const double c : {2.5, 1e3, 1e-2}) {
    CsrArrays<double> scaled = a.arrays();
    for (auto& v : scaled.values) v *= c;
    Vec cb = b;
    for (auto& v : cb) v *= c;
    const auto r = cg_solve(CsrMatrix<double>(std::move(scaled)), cb);
    EXPECT_EQ(r.iterations, base.iterations) << "c=" << c;
    EXPECT_LE(inf_diff(r.x, base.x), 1e-9);
  }
}

TEST(CgSolve, SinglePrecision) {
  const auto a = convert<float>(poisson2d(12, 12));
  const DenseVector<float> b(144, 1.0f);
  const auto r = cg_solve(a, b, with_tol(1e-5), KernelConfig{2, std::nullopt});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.final_relative_residual, 1e-4);
}

TEST(CgSolve, WorkerCountOnlyReassociates) {
  const auto a = poisson2d(16, 16);
  const Vec b = random_vector(256, 5);
  const auto one = cg_solve(a, b);
  for (std::size_t w : {2u, 4u, 8u}) {
    const auto r = cg_solve(a, b, {}, KernelConfig{w, std::nullopt});
    EXPECT_LE(std::max(one.iterations, r.iterations) - std::min(one.iterations, r.iterations), 1u);
    EXPECT_LE(inf_diff(one.x, r.x), 1e-8);
  }
}

}  // namespace
}  // namespace spcg
