#pragma once

#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skewscore {

/// One draw from a zero-mean GP prior with RBF covariance exp(-|u-u'|^2 / (2 l^2)),
/// realized as a random Fourier feature expansion
///   f(u) = sqrt(2/D) * sum_k a_k cos(w_k . u + b_k),  w_k ~ N(0, I/l^2), b_k ~ U[0, 2pi), a_k ~ N(0, 1).
/// The handle is deterministic once drawn and can be evaluated anywhere.
class RandomFeatureFunction {
 public:
  RandomFeatureFunction() = default;

  static RandomFeatureFunction sample(int input_dim, double bandwidth, int n_features, Rng& rng) {
    require(input_dim >= 1, "sample_gp_function: input dimension must be >= 1");
    require(bandwidth > 0, "sample_gp_function: bandwidth must be positive");
    require(n_features >= 1, "sample_gp_function: n_features must be >= 1");
    RandomFeatureFunction f;
    f.freq_.resize(n_features, input_dim);
    f.phase_.resize(n_features);
    f.weight_.resize(n_features);
    for (int k = 0; k < n_features; ++k) {
      for (int j = 0; j < input_dim; ++j) f.freq_(k, j) = standard_normal(rng) / bandwidth;
      f.phase_(k) = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      f.weight_(k) = standard_normal(rng);
    }
    f.norm_ = std::sqrt(2.0 / n_features);
    return f;
  }

  int input_dim() const noexcept { return static_cast<int>(freq_.cols()); }
  int n_features() const noexcept { return static_cast<int>(freq_.rows()); }

  /// Rows of `inputs` are evaluation points. Works through the rows in blocks so the
  /// phase matrix stays small for large n.
  Vector evaluate(const Eigen::Ref<const Matrix>& inputs) const {
    require(inputs.cols() == input_dim(), "RandomFeatureFunction: input dimension mismatch");
    Vector out(inputs.rows());
    for (Eigen::Index r = 0; r < inputs.rows(); r += kBlock) {
      const Eigen::Index m = std::min(kBlock, inputs.rows() - r);
      const Matrix phases = (inputs.middleRows(r, m) * freq_.transpose()).rowwise() + phase_.transpose();
      out.segment(r, m) = norm_ * (phases.array().cos().matrix() * weight_);
    }
    return out;
  }

  /// n x k matrix of partial derivatives at each input row.
  Matrix gradient(const Eigen::Ref<const Matrix>& inputs) const {
    require(inputs.cols() == input_dim(), "RandomFeatureFunction: input dimension mismatch");
    Matrix out(inputs.rows(), inputs.cols());
    for (Eigen::Index r = 0; r < inputs.rows(); r += kBlock) {
      const Eigen::Index m = std::min(kBlock, inputs.rows() - r);
      const Matrix phases = (inputs.middleRows(r, m) * freq_.transpose()).rowwise() + phase_.transpose();
      const Matrix weighted = (-norm_) * (phases.array().sin().rowwise() * weight_.transpose().array()).matrix();
      out.middleRows(r, m) = weighted * freq_;
    }
    return out;
  }

  double operator()(double x) const {
    require(input_dim() == 1, "RandomFeatureFunction: scalar call needs a 1-D function");
    return norm_ * (((freq_.col(0).array() * x) + phase_.array()).cos() * weight_.array()).sum();
  }

  double derivative(double x) const {
    require(input_dim() == 1, "RandomFeatureFunction: scalar call needs a 1-D function");
    return -norm_ * (((freq_.col(0).array() * x) + phase_.array()).sin() * weight_.array() * freq_.col(0).array()).sum();
  }

 private:
  static constexpr Eigen::Index kBlock = 4096;
  Matrix freq_;
  Vector phase_;
  Vector weight_;
  double norm_ = 1.0;
};

inline RandomFeatureFunction sample_gp_function(double bandwidth, int n_features, Rng& rng, int input_dim = 1) {
  return RandomFeatureFunction::sample(input_dim, bandwidth, n_features, rng);
}

/// Exact GP draw at the given points via Cholesky of the RBF Gram matrix plus jitter.
/// Only meant for small n; used to cross-check the random-feature covariance.
inline Vector sample_gp_exact(const Eigen::Ref<const Matrix>& points, double bandwidth, Rng& rng,
                              double jitter = 1e-6) {
  const Eigen::Index n = points.rows();
  require(n >= 1 && n <= 2000, "sample_gp_exact: supports 1 <= n <= 2000");
  require(bandwidth > 0, "sample_gp_exact: bandwidth must be positive");
  Matrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double r2 = (points.row(i) - points.row(j)).squaredNorm();
      gram(i, j) = gram(j, i) = std::exp(-r2 / (2.0 * bandwidth * bandwidth));
    }
  gram.diagonal().array() += jitter;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericError("sample_gp_exact: Cholesky failed despite jitter");
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = standard_normal(rng);
  return llt.matrixL() * z;
}

}  // namespace skewscore
