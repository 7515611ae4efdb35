#pragma once

#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>

namespace skewscore {

// Univariate laws used as exogenous noise, cause marginals and oracle test densities.
// Every law exposes sampling, log-density and its derivative (the 1-D score).

struct Gaussian {
  double scale = 1.0;
};

struct StudentT {
  double df = 5.0;
  double scale = 1.0;
};

/// Max-Gumbel with scale beta. When centered, the location is -beta * EulerGamma so the mean is zero.
struct Gumbel {
  double scale = 1.0;
  bool centered = true;
};

struct Laplace {
  double scale = 1.0;
};

/// Uniform(-half_width, half_width) convolved with N(0, smoothing^2): symmetric, smooth, positive.
struct SmoothedUniform {
  double half_width = 1.0;
  double smoothing = 0.25;
};

/// Gamma(shape k, scale theta) on x > 0.
struct GammaLaw {
  double shape = 5.0;
  double scale = 1.0;
};

using Law = std::variant<Gaussian, StudentT, Gumbel, Laplace, SmoothedUniform, GammaLaw>;

/// Noise laws accepted by the structural generators.
using NoiseSpec = Law;

namespace detail {

inline double gumbel_location(const Gumbel& g) { return g.centered ? -g.scale * std::numbers::egamma : 0.0; }

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

inline void validate(const Law& law) {
  std::visit(detail::overloaded{
                 [](const Gaussian& g) { require(g.scale > 0, "Gaussian: scale must be positive"); },
                 [](const StudentT& t) {
                   require(t.df > 0, "StudentT: df must be positive");
                   require(t.scale > 0, "StudentT: scale must be positive");
                 },
                 [](const Gumbel& g) { require(g.scale > 0, "Gumbel: scale must be positive"); },
                 [](const Laplace& l) { require(l.scale > 0, "Laplace: scale must be positive"); },
                 [](const SmoothedUniform& s) {
                   require(s.half_width > 0 && s.smoothing > 0, "SmoothedUniform: parameters must be positive");
                 },
                 [](const GammaLaw& g) { require(g.shape > 0 && g.scale > 0, "GammaLaw: parameters must be positive"); },
             },
             law);
}

inline double sample(const Law& law, Rng& rng) {
  return std::visit(
      detail::overloaded{
          [&](const Gaussian& g) { return g.scale * standard_normal(rng); },
          [&](const StudentT& t) { return t.scale * std::student_t_distribution<double>(t.df)(rng); },
          [&](const Gumbel& g) {
            return std::extreme_value_distribution<double>(detail::gumbel_location(g), g.scale)(rng);
          },
          [&](const Laplace& l) {
            const double u = uniform(rng, -0.5, 0.5);
            return -l.scale * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
          },
          [&](const SmoothedUniform& s) {
            return uniform(rng, -s.half_width, s.half_width) + s.smoothing * standard_normal(rng);
          },
          [&](const GammaLaw& g) { return std::gamma_distribution<double>(g.shape, g.scale)(rng); },
      },
      law);
}

inline double log_pdf(const Law& law, double x) {
  using std::log;
  return std::visit(
      detail::overloaded{
          [&](const Gaussian& g) {
            const double z = x / g.scale;
            return -0.5 * z * z - log(g.scale) - 0.5 * log(2.0 * std::numbers::pi);
          },
          [&](const StudentT& t) {
            const double z = x / t.scale;
            return std::lgamma(0.5 * (t.df + 1)) - std::lgamma(0.5 * t.df) - 0.5 * log(t.df * std::numbers::pi) -
                   log(t.scale) - 0.5 * (t.df + 1) * std::log1p(z * z / t.df);
          },
          [&](const Gumbel& g) {
            const double z = (x - detail::gumbel_location(g)) / g.scale;
            return -log(g.scale) - z - std::exp(-z);
          },
          [&](const Laplace& l) { return -std::abs(x) / l.scale - log(2.0 * l.scale); },
          [&](const SmoothedUniform& s) {
            const double a = s.half_width, h = s.smoothing;
            // Phi((x+a)/h) - Phi((x-a)/h), written with erfc on the side that keeps precision.
            const double lo = (x - a) / h, hi = (x + a) / h;
            double mass;
            if (x >= 0)
              mass = 0.5 * (std::erfc(lo / std::numbers::sqrt2) - std::erfc(hi / std::numbers::sqrt2));
            else
              mass = 0.5 * (std::erfc(-hi / std::numbers::sqrt2) - std::erfc(-lo / std::numbers::sqrt2));
            return log(mass / (2.0 * a));
          },
          [&](const GammaLaw& g) {
            if (x <= 0) return -std::numeric_limits<double>::infinity();
            return (g.shape - 1) * log(x) - x / g.scale - std::lgamma(g.shape) - g.shape * log(g.scale);
          },
      },
      law);
}

inline double pdf(const Law& law, double x) { return std::exp(log_pdf(law, x)); }

/// d/dx log p(x).
inline double score(const Law& law, double x) {
  return std::visit(
      detail::overloaded{
          [&](const Gaussian& g) { return -x / (g.scale * g.scale); },
          [&](const StudentT& t) { return -(t.df + 1) * x / (t.df * t.scale * t.scale + x * x); },
          [&](const Gumbel& g) {
            const double z = (x - detail::gumbel_location(g)) / g.scale;
            return (std::exp(-z) - 1.0) / g.scale;
          },
          [&](const Laplace& l) { return x > 0 ? -1.0 / l.scale : (x < 0 ? 1.0 / l.scale : 0.0); },
          [&](const SmoothedUniform& s) {
            const double a = s.half_width, h = s.smoothing;
            const double dens = (detail::normal_pdf((x + a) / h) - detail::normal_pdf((x - a) / h)) / (2.0 * a * h);
            return dens / pdf(law, x);
          },
          [&](const GammaLaw& g) { return (g.shape - 1) / x - 1.0 / g.scale; },
      },
      law);
}

inline bool is_symmetric(const Law& law) {
  return !std::holds_alternative<Gumbel>(law) && !std::holds_alternative<GammaLaw>(law);
}

inline std::string name(const Law& law) {
  return std::visit(detail::overloaded{
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const StudentT&) { return std::string("student_t"); },
                        [](const Gumbel&) { return std::string("gumbel"); },
                        [](const Laplace&) { return std::string("laplace"); },
                        [](const SmoothedUniform&) { return std::string("smoothed_uniform"); },
                        [](const GammaLaw&) { return std::string("gamma"); },
                    },
                    law);
}

inline nlohmann::json to_json(const Law& law) {
  return std::visit(
      detail::overloaded{
          [](const Gaussian& g) { return nlohmann::json{{"kind", "gaussian"}, {"scale", g.scale}}; },
          [](const StudentT& t) { return nlohmann::json{{"kind", "student_t"}, {"df", t.df}, {"scale", t.scale}}; },
          [](const Gumbel& g) {
            return nlohmann::json{{"kind", "gumbel"}, {"scale", g.scale}, {"centered", g.centered}};
          },
          [](const Laplace& l) { return nlohmann::json{{"kind", "laplace"}, {"scale", l.scale}}; },
          [](const SmoothedUniform& s) {
            return nlohmann::json{
                {"kind", "smoothed_uniform"}, {"half_width", s.half_width}, {"smoothing", s.smoothing}};
          },
          [](const GammaLaw& g) { return nlohmann::json{{"kind", "gamma"}, {"shape", g.shape}, {"scale", g.scale}}; },
      },
      law);
}

}  // namespace skewscore
