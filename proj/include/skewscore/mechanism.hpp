#pragma once

#include "skewscore/gp.hpp"
#include "skewscore/laws.hpp"
#include "skewscore/types.hpp"

#include <cmath>
#include <variant>
#include <vector>

namespace skewscore {

inline double sigmoid(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

// ---- conditional mean functions f(pa) -------------------------------------------------------

struct ZeroMean {};

struct GpMean {
  RandomFeatureFunction fn;
};

/// amplitude * sigmoid(weights . u + bias) + shift; invertible in each coordinate with nonzero weight.
struct SigmoidMean {
  Vector weights;
  double amplitude = 1.0;
  double bias = 0.0;
  double shift = 0.0;
};

/// Polynomial in the sum of the parent values; coeffs[k] multiplies t^k.
struct PolynomialMean {
  std::vector<double> coeffs;
};

using MeanFunction = std::variant<ZeroMean, GpMean, SigmoidMean, PolynomialMean>;

// ---- conditional scale functions sigma(pa) ---------------------------------------------------

struct ConstantScale {
  double value = 1.0;
};

/// floor + span * sigmoid(weights . u + bias); bounded in [floor, floor + span].
struct SigmoidScale {
  Vector weights;
  double bias = 0.0;
  double floor = 0.5;
  double span = 1.5;
};

/// max(|sum of parents|, floor).
struct ClippedAbsScale {
  double floor = 0.1;
};

using ScaleFunction = std::variant<ConstantScale, SigmoidScale, ClippedAbsScale>;

/// One node's mechanism: X = gain * f(pa) + sigma(pa) * N (+ any latent contribution).
struct Mechanism {
  MeanFunction mean = ZeroMean{};
  double gain = 1.0;
  ScaleFunction scale = ConstantScale{};
  NoiseSpec noise = Gaussian{};
};

namespace detail {

inline double poly_value(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

inline double poly_derivative(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
  return v;
}

}  // namespace detail

/// Values of gain * f at each row of `parents` (n x k; k may be 0).
inline Vector mean_values(const Mechanism& m, const Eigen::Ref<const Matrix>& parents) {
  const Eigen::Index n = parents.rows();
  Vector out = std::visit(
      detail::overloaded{
          [&](const ZeroMean&) -> Vector { return Vector::Zero(n); },
          [&](const GpMean& g) -> Vector { return g.fn.evaluate(parents); },
          [&](const SigmoidMean& s) -> Vector {
            const Vector t = (parents * s.weights).array() + s.bias;
            return (t.unaryExpr([](double v) { return sigmoid(v); }).array() * s.amplitude + s.shift).matrix();
          },
          [&](const PolynomialMean& p) -> Vector {
            const Vector t = parents.rowwise().sum();
            return t.unaryExpr([&](double v) { return detail::poly_value(p.coeffs, v); });
          },
      },
      m.mean);
  return m.gain * out;
}

/// n x k partial derivatives of gain * f.
inline Matrix mean_gradient(const Mechanism& m, const Eigen::Ref<const Matrix>& parents) {
  const Eigen::Index n = parents.rows(), k = parents.cols();
  Matrix out = std::visit(
      detail::overloaded{
          [&](const ZeroMean&) -> Matrix { return Matrix::Zero(n, k); },
          [&](const GpMean& g) -> Matrix { return g.fn.gradient(parents); },
          [&](const SigmoidMean& s) -> Matrix {
            const Vector t = (parents * s.weights).array() + s.bias;
            const Vector slope = t.unaryExpr([&](double v) {
              const double q = sigmoid(v);
              return s.amplitude * q * (1.0 - q);
            });
            return slope * s.weights.transpose();
          },
          [&](const PolynomialMean& p) -> Matrix {
            const Vector t = parents.rowwise().sum();
            const Vector d = t.unaryExpr([&](double v) { return detail::poly_derivative(p.coeffs, v); });
            return d * Eigen::RowVectorXd::Ones(k);
          },
      },
      m.mean);
  return m.gain * out;
}

inline Vector scale_values(const ScaleFunction& sf, const Eigen::Ref<const Matrix>& parents) {
  const Eigen::Index n = parents.rows();
  return std::visit(detail::overloaded{
                        [&](const ConstantScale& c) -> Vector { return Vector::Constant(n, c.value); },
                        [&](const SigmoidScale& s) -> Vector {
                          const Vector t = (parents * s.weights).array() + s.bias;
                          return t.unaryExpr([&](double v) { return s.floor + s.span * sigmoid(v); });
                        },
                        [&](const ClippedAbsScale& c) -> Vector {
                          const Vector t = parents.rowwise().sum();
                          return t.unaryExpr([&](double v) { return std::max(std::abs(v), c.floor); });
                        },
                    },
                    sf);
}

inline Matrix scale_gradient(const ScaleFunction& sf, const Eigen::Ref<const Matrix>& parents) {
  const Eigen::Index n = parents.rows(), k = parents.cols();
  return std::visit(detail::overloaded{
                        [&](const ConstantScale&) -> Matrix { return Matrix::Zero(n, k); },
                        [&](const SigmoidScale& s) -> Matrix {
                          const Vector t = (parents * s.weights).array() + s.bias;
                          const Vector slope = t.unaryExpr([&](double v) {
                            const double q = sigmoid(v);
                            return s.span * q * (1.0 - q);
                          });
                          return slope * s.weights.transpose();
                        },
                        [&](const ClippedAbsScale& c) -> Matrix {
                          const Vector t = parents.rowwise().sum();
                          const Vector d = t.unaryExpr([&](double v) {
                            return std::abs(v) > c.floor ? (v > 0 ? 1.0 : -1.0) : 0.0;
                          });
                          return d * Eigen::RowVectorXd::Ones(k);
                        },
                    },
                    sf);
}

/// Infimum of sigma over all inputs (the constant r of the model class).
inline double scale_lower_bound(const ScaleFunction& sf) {
  return std::visit(detail::overloaded{
                        [](const ConstantScale& c) { return c.value; },
                        [](const SigmoidScale& s) { return s.floor; },
                        [](const ClippedAbsScale& c) { return c.floor; },
                    },
                    sf);
}

/// Number of parent inputs the mean function was built for, or -1 when it accepts any.
inline int mean_arity(const MeanFunction& mf) {
  return std::visit(detail::overloaded{
                        [](const ZeroMean&) { return -1; },
                        [](const GpMean& g) { return g.fn.input_dim(); },
                        [](const SigmoidMean& s) { return static_cast<int>(s.weights.size()); },
                        [](const PolynomialMean&) { return -1; },
                    },
                    mf);
}

inline int scale_arity(const ScaleFunction& sf) {
  return std::visit(detail::overloaded{
                        [](const ConstantScale&) { return -1; },
                        [](const SigmoidScale& s) { return static_cast<int>(s.weights.size()); },
                        [](const ClippedAbsScale&) { return -1; },
                    },
                    sf);
}

}  // namespace skewscore
