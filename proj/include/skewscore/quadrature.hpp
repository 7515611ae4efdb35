#pragma once

#include "skewscore/types.hpp"

#include <boost/math/quadrature/trapezoidal.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

namespace skewscore {

enum class QuadratureScheme { GaussHermite, AdaptiveTrapezoid };

struct QuadratureConfig {
  QuadratureScheme scheme = QuadratureScheme::GaussHermite;
  int nodes = 64;
  double lower = -12.0;  // truncation for the trapezoid rule, in units of the Gaussian scale
  double upper = 12.0;
  double tolerance = 1e-10;

  void validate() const {
    require(nodes >= 16, "QuadratureConfig: need at least 16 nodes");
    require(tolerance > 0, "QuadratureConfig: tolerance must be positive");
    require(lower < upper, "QuadratureConfig: lower bound must be below upper bound");
  }
};

struct GaussRule {
  Vector nodes;
  Vector weights;
};

/// Nodes and weights with  sum w_i g(x_i) ~ int g(x) exp(-x^2/2) dx  (probabilists' Hermite),
/// from the eigen-decomposition of the Jacobi matrix.
inline GaussRule gauss_hermite(int n) {
  require(n >= 1, "gauss_hermite: n must be >= 1");
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericError("gauss_hermite: eigen-decomposition failed");
  GaussRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = std::sqrt(2.0 * std::numbers::pi) * eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

struct QuadratureResult {
  double value = 0.0;
  double residual = 0.0;  // |difference| between the rule and its refinement
};

/// int g(x) exp(-x^2/2) dx. The residual compares n against 2n Hermite nodes, or is the
/// trapezoid routine's own error estimate.
inline QuadratureResult integrate_gaussian_weighted(const std::function<double(double)>& g,
                                                    const QuadratureConfig& cfg = {}) {
  cfg.validate();
  QuadratureResult r;
  double magnitude = 0.0;  // largest |w g| term, so cancelling integrands are judged against their own size
  if (cfg.scheme == QuadratureScheme::GaussHermite) {
    auto apply = [&](const GaussRule& rule) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.weights(i) * g(rule.nodes(i));
        acc += t;
        magnitude = std::max(magnitude, std::abs(t));
      }
      return acc;
    };
    const double coarse = apply(gauss_hermite(cfg.nodes));
    const double fine = apply(gauss_hermite(2 * cfg.nodes));
    r.value = coarse;
    r.residual = std::abs(fine - coarse);
  } else {
    double err = 0.0;
    r.value = boost::math::quadrature::trapezoidal(
        [&](double x) { return g(x) * std::exp(-0.5 * x * x); }, cfg.lower, cfg.upper, cfg.tolerance, 20, &err);
    r.residual = err;
  }
  if (!std::isfinite(r.value)) throw NumericError("integrate_gaussian_weighted: non-finite result");
  if (r.residual > std::max(1e-6, cfg.tolerance) * std::max({1.0, std::abs(r.value), magnitude}))
    throw NumericError("integrate_gaussian_weighted: no convergence (residual " + std::to_string(r.residual) + ")");
  return r;
}

}  // namespace skewscore
