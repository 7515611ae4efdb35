#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skewscore {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x d samples; column j holds variable j.
using DataMatrix = Eigen::MatrixXd;

/// n x d estimates of d/dx_j log p at every sample row.
using ScoreMatrix = Eigen::MatrixXd;

/// A precondition on an argument does not hold.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested quantity is mathematically undefined for these inputs.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data is unusable (non-finite values, malformed files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve, quadrature or density evaluation broke down.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Score-network training diverged. Carries the last epoch whose loss was finite.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int last_good_epoch, double last_good_loss)
      : std::runtime_error(what), last_good_epoch_(last_good_epoch), last_good_loss_(last_good_loss) {}

  int last_good_epoch() const noexcept { return last_good_epoch_; }
  double last_good_loss() const noexcept { return last_good_loss_; }

 private:
  int last_good_epoch_;
  double last_good_loss_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace skewscore
