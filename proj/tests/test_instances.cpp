#include "ose/errors.hpp"
#include "ose/instances.hpp"
#include "ose/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace ose;

TEST(RandomSubspace, OrthonormalAndReproducible) {
  const auto a = sample_random_subspace(300, 7, 5);
  const auto b = sample_random_subspace(300, 7, 5);
  EXPECT_LE(orthogonality_error(a.basis().matrix()), tolerance::kOrthogonality);
  EXPECT_EQ(a.basis().matrix(), b.basis().matrix());
  EXPECT_EQ(a.family(), InstanceFamily::kRandomRotation);
  EXPECT_NE(sample_random_subspace(300, 7, 6).basis().matrix(), a.basis().matrix());
}

TEST(RandomSubspace, ProjectorIsIsotropicOnAverage) {
  // E[U U^T] = (d / n) I for a uniformly random subspace.
  const std::size_t n = 20, d = 3, reps = 4000;
  DenseMatrix mean = DenseMatrix::Zero(n, n);
  for (std::size_t r = 0; r < reps; ++r) {
    const DenseMatrix u = sample_random_subspace(n, d, r).basis().matrix();
    mean += u * u.transpose();
  }
  mean /= static_cast<double>(reps);
  const double target = static_cast<double>(d) / n;
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    // Diagonal entries average a Beta(d/2, (n-d)/2) variable, sd ~ 0.08.
    EXPECT_NEAR(mean(i, i), target, 5 * 0.08 / std::sqrt(reps));
  }
  EXPECT_LT((mean - DenseMatrix(mean.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.02);
}

TEST(BasisSubspace, DistinctCoordinatesAndRegimeGuard) {
  const auto coords = sample_basis_coordinates(10000, 10, 3);
  EXPECT_EQ(std::set<std::size_t>(coords.begin(), coords.end()).size(), 10u);
  for (auto c : coords) EXPECT_LT(c, 10000u);
  EXPECT_THROW(sample_basis_coordinates(9999, 10, 3), InputError);
  BasisSamplingOptions opts;
  opts.allow_outside_regime = true;
  EXPECT_NO_THROW(sample_basis_coordinates(50, 10, 3, opts));
  const auto inst = sample_basis_subspace(10000, 10, 3);
  ASSERT_EQ(inst.coordinates().size(), 10u);
  const DenseMatrix u = inst.basis().matrix();
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(u(static_cast<Eigen::Index>(inst.coordinates()[i]), static_cast<Eigen::Index>(i)), 1.0);
    EXPECT_EQ(u.col(static_cast<Eigen::Index>(i)).sum(), 1.0);
  }
}

TEST(BasisSubspace, CoordinatesAreUniform) {
  const std::size_t n = 100, reps = 20000;
  std::vector<double> hits(n, 0.0);
  for (std::size_t r = 0; r < reps; ++r)
    for (auto c : sample_basis_coordinates(n, 1, r)) hits[c] += 1.0;
  const double p = 1.0 / n, sd = std::sqrt(reps * p * (1 - p));
  for (double h : hits) EXPECT_LT(std::abs(h - reps * p), 5 * sd);
}

TEST(InstanceFamily, TagsRoundTrip) {
  for (auto f : {InstanceFamily::kRandomRotation, InstanceFamily::kBasisColumns}) {
    EXPECT_EQ(parse_instance_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_instance_family("gaussian"), InputError);
}

TEST(ProjectionNorm, MeanMatchesWeightedDiagonal) {
  const std::size_t n = 200, m = 20;
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 + static_cast<double>(i % 3);
  // E |P_E D u|^2 = sum_{i<m} D_ii^2 / n for u uniform on the sphere.
  double center = 0.0;
  for (std::size_t i = 0; i < m; ++i) center += diag[i] * diag[i];
  center /= n;
  const auto ex = projection_norm_experiment(n, m, diag, 20000, 9, 0.5, 4);
  EXPECT_NEAR(ex.predicted_center, center, 1e-14);
  EXPECT_NEAR(ex.deviation_scale, 9.0 * m / n, 1e-14);
  EXPECT_LT(std::abs(ex.mean - center), 4 * ex.standard_error);
  const auto t = projection_norm_trial(n, m, diag, 4);
  EXPECT_GE(t.observed, 0.0);
  EXPECT_LE(t.observed, 9.0);
}

TEST(ProjectionNorm, ThreadCountDoesNotChangeResult) {
  const std::vector<double> diag(50, 1.0);
  const auto a = projection_norm_experiment(50, 5, diag, 500, 2, 0.5, 1);
  const auto b = projection_norm_experiment(50, 5, diag, 500, 2, 0.5, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.tail_fraction, b.tail_fraction);
}

TEST(FrobeniusConcentration, MeanMatchesExpectedAndDegenerateCase) {
  const double eps[] = {0.25};
  const auto fc = frobenius_concentration_check(200, 6, 40, 2000, 3, eps, 4);
  EXPECT_DOUBLE_EQ(fc.expected, 5.0 * 40 / 200);
  EXPECT_LT(std::abs(fc.mean - fc.expected), 4 * fc.standard_error);
  ASSERT_EQ(fc.tails.size(), 1u);
  const auto one = frobenius_concentration_check(200, 1, 40, 10, 3, eps);
  EXPECT_EQ(one.expected, 0.0);
  EXPECT_EQ(one.mean, 0.0);
}
