#pragma once

#include "skewscore/datagen.hpp"
#include "skewscore/laws.hpp"
#include "skewscore/mechanism.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace skewscore {

using ScalarFn = std::function<double(double)>;

/// Bivariate HSNM  Y = f(X) + sigma(X) N  with X ~ cause, N ~ noise.
struct BivariateModelSpec {
  Law cause = Gaussian{};
  Law noise = Gaussian{};
  ScalarFn f = [](double) { return 0.0; };
  ScalarFn df = [](double) { return 0.0; };
  ScalarFn sigma = [](double) { return 1.0; };
  ScalarFn dsigma = [](double) { return 0.0; };
};

/// Per-point terms of the cause-side score  d/dx log p = A + B g(u) + C u g(u),  g = p_n'/p_n.
struct ScoreTerms {
  double u, g, a, b, c;
};

inline ScoreTerms score_terms(const BivariateModelSpec& s, double x, double y) {
  const double sd = s.sigma(x);
  if (!(sd > 0)) throw DomainError("BivariateModelSpec: sigma(" + std::to_string(x) + ") is not positive");
  const double ds = s.dsigma(x);
  ScoreTerms t;
  t.u = (y - s.f(x)) / sd;
  t.g = score(s.noise, t.u);
  t.a = score(s.cause, x) - ds / sd;
  t.b = -s.df(x) / sd;
  t.c = -ds / sd;
  return t;
}

/// log p(x, y) = log p_x(x) - log sigma(x) + log p_n(u).
inline double log_density(const BivariateModelSpec& s, double x, double y) {
  const double sd = s.sigma(x);
  return log_pdf(s.cause, x) - std::log(sd) + log_pdf(s.noise, (y - s.f(x)) / sd);
}

/// Exact score of the joint at each row of `points` (n x 2).
inline ScoreMatrix analytic_score_bivariate(const BivariateModelSpec& s, const Eigen::Ref<const Matrix>& points) {
  require(points.cols() == 2, "analytic_score_bivariate: points must have 2 columns");
  ScoreMatrix out(points.rows(), 2);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double x = points(i, 0), y = points(i, 1);
    if (!std::isfinite(log_density(s, x, y)))
      throw NumericError("analytic_score_bivariate: density underflow at (" + std::to_string(x) + ", " +
                         std::to_string(y) + ")");
    const ScoreTerms t = score_terms(s, x, y);
    out(i, 0) = t.a + t.b * t.g + t.c * t.u * t.g;
    out(i, 1) = t.g / s.sigma(x);
  }
  return out;
}

inline Matrix sample_bivariate(const BivariateModelSpec& s, int n, Rng& rng) {
  require(n >= 1, "sample_bivariate: n must be >= 1");
  Matrix out(n, 2);
  for (int i = 0; i < n; ++i) {
    const double x = sample(s.cause, rng);
    out(i, 0) = x;
    out(i, 1) = s.f(x) + s.sigma(x) * sample(s.noise, rng);
  }
  return out;
}

/// Exact joint score of an unconfounded Scm restricted to `columns`, which must be closed
/// under taking parents (the margin obtained by deleting sinks). Output columns follow `columns`.
inline ScoreMatrix analytic_score_scm(const Scm& scm, const Eigen::Ref<const Matrix>& data,
                                      const std::vector<int>& columns) {
  require(!scm.latent, "analytic_score_scm: latent confounders are not supported");
  const int d = scm.size();
  require(data.cols() == d, "analytic_score_scm: data must carry all nodes");
  std::vector<int> slot(static_cast<std::size_t>(d), -1);
  for (std::size_t c = 0; c < columns.size(); ++c) slot[static_cast<std::size_t>(columns[c])] = static_cast<int>(c);
  for (int node : columns)
    for (int p : scm.graph.parents(node))
      require(slot[static_cast<std::size_t>(p)] >= 0,
              "analytic_score_scm: column set is not ancestral (node " + std::to_string(node) + " lacks parent " +
                  std::to_string(p) + ")");
  const Eigen::Index n = data.rows();
  ScoreMatrix out = ScoreMatrix::Zero(n, static_cast<Eigen::Index>(columns.size()));
  for (int node : columns) {
    const Mechanism& m = scm.mechanisms[static_cast<std::size_t>(node)];
    const std::vector<int> pa = scm.graph.parents(node);
    const Matrix block = parent_block(scm.graph, node, data);
    const Vector mu = mean_values(m, block);
    const Vector sd = scale_values(m.scale, block);
    const Matrix dmu = mean_gradient(m, block);
    const Matrix dsd = scale_gradient(m.scale, block);
    const int self = slot[static_cast<std::size_t>(node)];
    for (Eigen::Index r = 0; r < n; ++r) {
      const double u = (data(r, node) - mu(r)) / sd(r);
      const double g = score(m.noise, u);
      out(r, self) += g / sd(r);
      for (std::size_t k = 0; k < pa.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double du = -dmu(r, kk) / sd(r) - u * dsd(r, kk) / sd(r);
        out(r, slot[static_cast<std::size_t>(pa[k])]) += g * du - dsd(r, kk) / sd(r);
      }
    }
  }
  return out;
}

}  // namespace skewscore
