#include "ose/regression.hpp"

#include "ose/errors.hpp"
#include "ose/random.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ose {

void RegressionInstance::validate() const {
  if (a.rows() < a.cols() || a.cols() == 0) throw ShapeError("regression instance needs n >= d >= 1");
  if (b.size() != a.rows()) throw ShapeError("regression instance: b must have n entries");
  if (!a.allFinite() || !b.allFinite()) throw InputError("regression instance has non-finite entries");
  if (a.isZero(0.0)) throw InputError("regression instance: A is zero");
}

RegressionInstance random_regression_instance(std::size_t n, std::size_t d, std::uint64_t seed) {
  RegressionInstance inst;
  inst.seed = seed;
  inst.a.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  inst.b.resize(static_cast<Eigen::Index>(n));
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < inst.a.cols(); ++j) {
    for (Eigen::Index i = 0; i < inst.a.rows(); ++i) inst.a(i, j) = normal(rng);
  }
  for (Eigen::Index i = 0; i < inst.b.size(); ++i) inst.b(i) = normal(rng);
  inst.validate();
  return inst;
}

namespace {

// Pseudoinverse solve; throws DegeneracyError on numerical rank loss.
Vector svd_solve(const DenseMatrix& a, const Vector& b) {
  if (a.rows() < a.cols()) throw DegeneracyError("least squares: fewer rows than columns");
  Eigen::JacobiSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0 || sigma(sigma.size() - 1) <= tolerance::kRankCutoff * sigma(0)) {
    throw DegeneracyError("least squares: matrix is rank-deficient");
  }
  const Vector coeffs = (svd.matrixU().transpose() * b).cwiseQuotient(sigma);
  return svd.matrixV() * coeffs;
}

RegressionResult sketched_result(const RegressionInstance& instance, const DenseMatrix& sa, const Vector& sb) {
  RegressionResult result;
  try {
    result.x = svd_solve(sa, sb);
  } catch (const DegeneracyError&) {
    throw SketchFailure("sketch_and_solve: sketched matrix is rank-deficient");
  }
  result.residual_norm = (instance.a * result.x - instance.b).norm();
  result.method = SolveMethod::kSketched;
  result.instance_seed = instance.seed;
  return result;
}

}  // namespace

RegressionResult exact_least_squares(const RegressionInstance& instance) {
  instance.validate();
  RegressionResult result;
  result.x = svd_solve(instance.a, instance.b);
  result.residual_norm = (instance.a * result.x - instance.b).norm();
  result.method = SolveMethod::kExact;
  result.instance_seed = instance.seed;
  return result;
}

RegressionResult sketch_and_solve(const RegressionInstance& instance, const SketchMatrix& sketch) {
  instance.validate();
  if (sketch.cols() != static_cast<std::size_t>(instance.a.rows())) {
    throw ShapeError("sketch_and_solve: sketch width does not match n");
  }
  DenseMatrix augmented(instance.a.rows(), instance.a.cols() + 1);
  augmented << instance.a, instance.b;
  const DenseMatrix sketched = apply_sketch(sketch, augmented);
  const Eigen::Index d = instance.a.cols();
  auto result = sketched_result(instance, sketched.leftCols(d), sketched.col(d));
  result.sketch_spec = sketch.spec();
  return result;
}

namespace {

DenseMatrix augmented_matrix(const RegressionInstance& instance) {
  DenseMatrix augmented(instance.a.rows(), instance.a.cols() + 1);
  augmented << instance.a, instance.b;
  return augmented;
}

SketchSpec gaussian_spec(const RegressionInstance& instance, std::size_t m, std::uint64_t seed) {
  const SketchSpec spec{static_cast<std::size_t>(instance.a.rows()), m, SketchKind::kGaussian, 0, seed};
  spec.validate();
  return spec;
}

}  // namespace

RegressionResult gaussian_sketch_and_solve(const RegressionInstance& instance, std::size_t m, std::uint64_t seed) {
  instance.validate();
  const SketchSpec spec = gaussian_spec(instance, m, seed);
  const DenseMatrix sketched = gaussian_sketch_image(augmented_matrix(instance), m, seed);
  const Eigen::Index d = instance.a.cols();
  auto result = sketched_result(instance, sketched.leftCols(d), sketched.col(d));
  result.sketch_spec = spec;
  return result;
}

double error_ratio(const RegressionResult& exact, const RegressionResult& sketched) {
  if (exact.instance_seed != sketched.instance_seed || exact.x.size() != sketched.x.size()) {
    throw InputError("error_ratio: results come from different instances");
  }
  if (exact.residual_norm <= 1e-12 && sketched.residual_norm <= 1e-12) return 1.0;
  return sketched.residual_norm / exact.residual_norm;
}

double certificate_bound(double epsilon) { return (1.0 + epsilon) / (1.0 - epsilon); }

OrthonormalBasis augmented_basis(const RegressionInstance& instance) {
  instance.validate();
  DenseMatrix augmented(instance.a.rows(), instance.a.cols() + 1);
  augmented << instance.a, instance.b;
  return gram_schmidt(augmented);
}

namespace {

CertifiedTrial finish_trial(const RegressionInstance& instance, const DenseMatrix& sketched_basis,
                            const DenseMatrix& sketched_data, const SketchSpec& spec, double epsilon) {
  const Eigen::Index d = instance.a.cols();
  CertifiedTrial trial{exact_least_squares(instance), std::nullopt, embedding_report(sketched_basis, epsilon)};
  trial.bound = certificate_bound(epsilon);
  try {
    auto sketched = sketched_result(instance, sketched_data.leftCols(d), sketched_data.col(d));
    sketched.sketch_spec = spec;
    trial.ratio = error_ratio(trial.exact, sketched);
    trial.sketched = std::move(sketched);
  } catch (const SketchFailure&) {
    trial.ratio = std::numeric_limits<double>::quiet_NaN();
  }
  trial.violation = trial.embedding.pass && !(trial.ratio <= trial.bound + 1e-8);
  return trial;
}

}  // namespace

CertifiedTrial certified_trial(const RegressionInstance& instance, const SketchMatrix& sketch, double epsilon) {
  const OrthonormalBasis q = augmented_basis(instance);
  return finish_trial(instance, apply_sketch(sketch, q.matrix()), apply_sketch(sketch, augmented_matrix(instance)),
                      sketch.spec(), epsilon);
}

CertifiedTrial certified_gaussian_trial(const RegressionInstance& instance, std::size_t m, std::uint64_t seed,
                                        double epsilon) {
  const SketchSpec spec = gaussian_spec(instance, m, seed);
  const OrthonormalBasis q = augmented_basis(instance);
  const DenseMatrix r = q.matrix().transpose() * augmented_matrix(instance);
  const DenseMatrix pi_q = gaussian_sketched_orthonormal(m, static_cast<std::size_t>(q.cols()), seed);
  return finish_trial(instance, pi_q, pi_q * r, spec, epsilon);
}

}  // namespace ose
