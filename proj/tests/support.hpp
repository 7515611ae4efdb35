#pragma once

#include "skewscore/skewscore.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace skewscore::testing {

/// Scalar views of a single-parent mechanism so it can drive the analytic bivariate oracle.
inline BivariateModelSpec spec_from_mechanism(const Mechanism& m, Law cause = Gaussian{}) {
  BivariateModelSpec s;
  s.cause = cause;
  s.noise = m.noise;
  const Mechanism mech = m;
  if (const auto* gp = std::get_if<GpMean>(&m.mean)) {
    const RandomFeatureFunction fn = gp->fn;
    const double gain = m.gain;
    s.f = [fn, gain](double x) { return gain * fn(x); };
    s.df = [fn, gain](double x) { return gain * fn.derivative(x); };
  } else {
    s.f = [mech](double x) { return mean_values(mech, Matrix::Constant(1, 1, x))(0); };
    s.df = [mech](double x) { return mean_gradient(mech, Matrix::Constant(1, 1, x))(0, 0); };
  }
  s.sigma = [mech](double x) { return scale_values(mech.scale, Matrix::Constant(1, 1, x))(0); };
  s.dsigma = [mech](double x) { return scale_gradient(mech.scale, Matrix::Constant(1, 1, x))(0, 0); };
  return s;
}

inline BivariateModelSpec random_pair_spec(Formulation form, Law noise, std::uint64_t seed) {
  Rng rng = make_rng(seed, 4242);
  return spec_from_mechanism(draw_effect_mechanism(form, noise, rng, {}));
}

/// Heteroscedastic chain order[0] -> order[1] -> ... under the given formulation.
inline Scm hsnm_chain(const std::vector<int>& order, Rng& rng, Formulation form = Formulation::GpSig,
                      Law noise = Gaussian{}) {
  const int d = static_cast<int>(order.size());
  Scm scm;
  scm.graph = Dag(d);
  scm.mechanisms.resize(static_cast<std::size_t>(d));
  for (int k = 1; k < d; ++k) {
    scm.graph.add_edge(order[static_cast<std::size_t>(k - 1)], order[static_cast<std::size_t>(k)]);
    scm.mechanisms[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
        draw_effect_mechanism(form, noise, rng, {});
  }
  return scm;
}

/// Plain mean and standard error of a column.
inline std::pair<double, double> mean_se(const Eigen::Ref<const Vector>& v) {
  const double m = v.mean();
  const double var = (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace skewscore::testing
