#pragma once

#include "skewscore/analytic.hpp"
#include "skewscore/laws.hpp"
#include "skewscore/ordering.hpp"
#include "skewscore/quadrature.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace skewscore {

// ---- closed forms -------------------------------------------------------------------------

inline double skewscore_gumbel(double beta) {
  require(beta > 0, "skewscore_gumbel: beta must be positive");
  return 2.0 / (beta * beta * beta);
}

inline double skewscore_gamma(double shape, double scale) {
  require(scale > 0, "skewscore_gamma: theta must be positive");
  if (!(shape > 3)) throw DomainError("skewscore_gamma: the third moment of the score diverges for k <= 3");
  return 4.0 / ((shape - 3.0) * (shape - 2.0) * scale * scale * scale);
}

/// Monte-Carlo skew of the analytic score of a univariate law over its own samples.
inline double mc_skew_univariate(const Law& law, int n, Rng& rng, const OddTestFunction& psi = {}) {
  require(n >= 1, "mc_skew_univariate: n must be >= 1");
  Vector s(n);
  for (int i = 0; i < n; ++i) s(i) = score(law, sample(law, rng));
  return skew_of_score(s, psi);
}

// ---- confounded additive model --------------------------------------------------------------

struct ConfoundedSkew {
  double skew_x = 0.0;
  double skew_y = 0.0;
  double residual = 0.0;
};

/// (2 sqrt(2 pi) / pi) |int x f'(x) (1 + f'(x)) exp(-x^2/2) dx|, with the companion Skew_y = 0.
inline ConfoundedSkew confounded_anm_skew_x(const ScalarFn& df, const QuadratureConfig& quad = {}) {
  const QuadratureResult q =
      integrate_gaussian_weighted([&](double x) { const double d = df(x); return x * d * (1.0 + d); }, quad);
  const double c = 2.0 * std::sqrt(2.0 * std::numbers::pi) / std::numbers::pi;
  return {c * std::abs(q.value), 0.0, c * q.residual};
}

/// Observed joint whose density is  exp(-(2/3)(y - x/2 - f(x))^2 - x^2/2)  up to normalization:
/// X ~ N(0,1), Y = x/2 + f(x) + (sqrt(3)/2) N.
inline BivariateModelSpec confounded_anm_spec(ScalarFn f, ScalarFn df) {
  BivariateModelSpec s;
  s.cause = Gaussian{1.0};
  s.noise = Gaussian{1.0};
  s.f = [f](double x) { return 0.5 * x + f(x); };
  s.df = [df](double x) { return 0.5 + df(x); };
  const double sd = std::sqrt(3.0) / 2.0;
  s.sigma = [sd](double) { return sd; };
  s.dsigma = [](double) { return 0.0; };
  return s;
}

/// Observed margin of  Z ~ N(0,1), X = Z + N0, Y = lambda f(X) + Z + sigma(X) N1  with Gaussian
/// N0, N1. Then X ~ N(0, 2) and Y | X ~ N(lambda f(x) + x/2, 1/2 + sigma(x)^2).
inline BivariateModelSpec latent_triangular_spec(double lambda, ScalarFn f, ScalarFn df, ScalarFn sigma,
                                                 ScalarFn dsigma) {
  require(lambda >= 0, "latent_triangular_spec: lambda must be nonnegative");
  BivariateModelSpec s;
  s.cause = Gaussian{std::numbers::sqrt2};
  s.noise = Gaussian{1.0};
  s.f = [=](double x) { return lambda * f(x) + 0.5 * x; };
  s.df = [=](double x) { return lambda * df(x) + 0.5; };
  s.sigma = [=](double x) { return std::sqrt(0.5 + sigma(x) * sigma(x)); };
  s.dsigma = [=](double x) {
    const double sd = sigma(x);
    return sd * dsigma(x) / std::sqrt(0.5 + sd * sd);
  };
  return s;
}

// ---- identifiability integral ----------------------------------------------------------------------

namespace detail {

/// Nodes and probability weights for expectations under a law.
inline GaussRule expectation_rule(const Law& law, const QuadratureConfig& cfg, int nodes) {
  if (const auto* g = std::get_if<Gaussian>(&law)) {
    GaussRule r = gauss_hermite(nodes);
    r.nodes *= g->scale;
    r.weights /= std::sqrt(2.0 * std::numbers::pi);
    return r;
  }
  const double scale = std::visit(overloaded{
                                      [](const Gaussian& v) { return v.scale; },
                                      [](const StudentT& v) { return v.scale; },
                                      [](const Gumbel& v) { return v.scale; },
                                      [](const Laplace& v) { return v.scale; },
                                      [](const SmoothedUniform& v) { return v.half_width + v.smoothing; },
                                      [](const GammaLaw& v) { return v.scale * v.shape; },
                                  },
                                  law);
  // Composite Simpson on the truncated range; nodes scale with the requested count.
  const int m = 2 * (nodes * 16) + 1;
  const double lo = cfg.lower * scale, hi = cfg.upper * scale, h = (hi - lo) / (m - 1);
  GaussRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    r.nodes(i) = x;
    r.weights(i) = w * h / 3.0 * pdf(law, x);
  }
  return r;
}

}  // namespace detail

struct Assumption1Result {
  double value = 0.0;
  double residual = 0.0;      // change under node doubling
  double tail_mass_x = 0.0;   // probability mass missed by the cause rule
  double tail_mass_n = 0.0;   // same for the noise rule
  bool identifiable = false;  // |value| >= threshold
  double threshold = 1e-4;
};

/// E[(d/dx log p(X, Y))^3] = int p_x(x) int [A + B g(u) + C u g(u)]^3 p_n(u) du dx on a tensor rule.
inline Assumption1Result assumption1_lhs(const BivariateModelSpec& spec, const QuadratureConfig& quad = {},
                                         double threshold = 1e-4) {
  quad.validate();
  auto evaluate = [&](int nodes, double& mass_x, double& mass_n) {
    const GaussRule rx = detail::expectation_rule(spec.cause, quad, nodes);
    const GaussRule rn = detail::expectation_rule(spec.noise, quad, nodes);
    mass_x = 1.0 - rx.weights.sum();
    mass_n = 1.0 - rn.weights.sum();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rx.nodes.size(); ++i) {
      const double x = rx.nodes(i);
      const double sd = spec.sigma(x), ds = spec.dsigma(x);
      const double a = score(spec.cause, x) - ds / sd, b = -spec.df(x) / sd, c = -ds / sd;
      double inner = 0.0;
      for (Eigen::Index j = 0; j < rn.nodes.size(); ++j) {
        const double u = rn.nodes(j), g = score(spec.noise, u);
        const double s = a + b * g + c * u * g;
        inner += rn.weights(j) * s * s * s;
      }
      acc += rx.weights(i) * inner;
    }
    return acc;
  };
  Assumption1Result r;
  r.threshold = threshold;
  double mx2 = 0.0, mn2 = 0.0;
  r.value = evaluate(quad.nodes, r.tail_mass_x, r.tail_mass_n);
  r.residual = std::abs(evaluate(2 * quad.nodes, mx2, mn2) - r.value);
  if (!std::isfinite(r.value)) throw NumericError("assumption1_lhs: non-finite integral");
  if (std::abs(r.tail_mass_x) > 1e-3 || std::abs(r.tail_mass_n) > 1e-3)
    throw NumericError("assumption1_lhs: tails carry too much mass (cause " + std::to_string(r.tail_mass_x) +
                       ", noise " + std::to_string(r.tail_mass_n) + "); widen the truncation bounds");
  r.identifiable = std::abs(r.value) >= threshold;
  return r;
}

// ---- Monte-Carlo skew pair ------------------------------------------------------------------

struct McSkewResult {
  double skew_x = 0.0, skew_y = 0.0;
  double se_x = 0.0, se_y = 0.0;
  int n = 0;
};

inline McSkewResult mc_skew_pair(const BivariateModelSpec& spec, int n, Rng& rng, int resamples = 200,
                                 const OddTestFunction& psi = {}) {
  const Matrix pts = sample_bivariate(spec, n, rng);
  const ScoreMatrix s = analytic_score_bivariate(spec, pts);
  McSkewResult r;
  r.n = n;
  r.skew_x = skew_of_score(s.col(0), psi);
  r.skew_y = skew_of_score(s.col(1), psi);
  r.se_x = skew_bootstrap_se(s.col(0), psi, resamples, rng);
  r.se_y = skew_bootstrap_se(s.col(1), psi, resamples, rng);
  return r;
}

// ---- conformance report ---------------------------------------------------------------------

struct ConformanceCheck {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  bool pass = false;
};

inline ConformanceCheck make_check(std::string name, double expected, double observed, double tol, bool relative) {
  ConformanceCheck c{std::move(name), expected, observed, tol, relative, false};
  const double err = std::abs(observed - expected);
  c.pass = relative ? err <= tol * std::abs(expected) : err <= tol;
  return c;
}

/// Evaluates every oracle example; Monte-Carlo entries use n draws from the given seed.
inline std::vector<ConformanceCheck> oracle_conformance(std::uint64_t seed, int n = 1000000) {
  std::vector<ConformanceCheck> out;
  out.push_back(make_check("gumbel_beta1_closed_form", 2.0, skewscore_gumbel(1.0), 0.0, false));
  out.push_back(make_check("gumbel_beta2_closed_form", 0.25, skewscore_gumbel(2.0), 0.0, false));
  out.push_back(make_check("gamma_k5_theta1_closed_form", 2.0 / 3.0, skewscore_gamma(5.0, 1.0), 1e-15, false));
  out.push_back(make_check("gamma_k4_theta2_closed_form", 0.25, skewscore_gamma(4.0, 2.0), 1e-15, false));
  {
    Rng rng = make_rng(seed, 1);
    out.push_back(make_check("gumbel_beta1_monte_carlo", 2.0, mc_skew_univariate(Gumbel{1.0, true}, n, rng), 0.05, true));
  }
  {
    Rng rng = make_rng(seed, 2);
    out.push_back(make_check("gamma_k6_theta1_monte_carlo", skewscore_gamma(6.0, 1.0),
                             mc_skew_univariate(GammaLaw{6.0, 1.0}, n, rng), 0.05, true));
  }
  out.push_back(make_check("confounded_linear_f", 0.0,
                           confounded_anm_skew_x([](double) { return 0.7; }).skew_x, 1e-6, false));
  out.push_back(make_check("confounded_square_f", 8.0,
                           confounded_anm_skew_x([](double x) { return 2.0 * x; }).skew_x, 1e-6, false));
  out.push_back(make_check("confounded_quadratic_b_half", 0.0,
                           confounded_anm_skew_x([](double x) { return 2.0 * 1.3 * x + 0.5; }).skew_x, 1e-6, false));
  {
    Rng rng = make_rng(seed, 3);
    const McSkewResult mc =
        mc_skew_pair(confounded_anm_spec([](double x) { return x * x; }, [](double x) { return 2.0 * x; }), n, rng);
    out.push_back(make_check("confounded_square_mc_skew_x", 8.0, mc.skew_x, 0.05, true));
    out.push_back(make_check("confounded_square_mc_skew_y", 0.0, mc.skew_y, 3.0 * mc.se_y, false));
  }
  {
    BivariateModelSpec lin;
    lin.f = [](double x) { return 0.8 * x; };
    lin.df = [](double) { return 0.8; };
    out.push_back(make_check("assumption1_gaussian_linear", 0.0, assumption1_lhs(lin).value, 1e-4, false));
    BivariateModelSpec zero;
    out.push_back(make_check("assumption1_zero_f", 0.0, assumption1_lhs(zero).value, 1e-4, false));
    const double sq = assumption1_lhs(confounded_anm_spec([](double x) { return x * x; }, [](double x) { return 2.0 * x; })).value;
    ConformanceCheck c{"assumption1_square_f_nonzero", 1e-3, std::abs(sq), 0.0, false, std::abs(sq) > 1e-3};
    out.push_back(c);
  }
  return out;
}

inline nlohmann::json to_json(const std::vector<ConformanceCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"expected", c.expected},
                   {"observed", c.observed},
                   {"tolerance", c.tolerance},
                   {"relative", c.relative},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  return {{"checks", arr}, {"all_pass", all}};
}

}  // namespace skewscore
