#pragma once

#include "skewscore/datagen.hpp"
#include "skewscore/kci.hpp"
#include "skewscore/ordering.hpp"
#include "skewscore/prune.hpp"
#include "skewscore/ssm.hpp"
#include "skewscore/stein.hpp"
#include "skewscore/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace skewscore {

enum class Setting { Bivariate, LatentTriangular, Multivariate, MultivariateConfounded };

inline std::string to_string(Setting s) {
  switch (s) {
    case Setting::Bivariate: return "bivariate";
    case Setting::LatentTriangular: return "latent_triangular";
    case Setting::Multivariate: return "multivariate";
    case Setting::MultivariateConfounded: return "multivariate_confounded";
  }
  return "?";
}

inline Setting parse_setting(const std::string& s) {
  if (s == "bivariate") return Setting::Bivariate;
  if (s == "latent_triangular" || s == "latent-triangular") return Setting::LatentTriangular;
  if (s == "multivariate") return Setting::Multivariate;
  if (s == "multivariate_confounded" || s == "multivariate-confounded") return Setting::MultivariateConfounded;
  throw ParameterError("unknown setting '" + s + "'");
}

enum class EstimatorKind { Stein, Ssm };

inline EstimatorKind parse_estimator(const std::string& s) {
  if (s == "stein") return EstimatorKind::Stein;
  if (s == "ssm") return EstimatorKind::Ssm;
  throw ParameterError("unknown estimator '" + s + "' (expected stein or ssm)");
}

inline std::string to_string(EstimatorKind e) { return e == EstimatorKind::Stein ? "stein" : "ssm"; }

/// Everything a run needs. Serialized as one flat JSON object.
struct RunConfig {
  Setting setting = Setting::Bivariate;
  Formulation formulation = Formulation::GpSig;
  NoiseKind noise = NoiseKind::Gaussian;
  bool gumbel_centered = true;
  int d = 10;
  int n = 5000;
  double edges = 10;
  double lambda = 1.0;
  double rho = 0.2;
  bool swap_columns = true;  // bivariate settings: randomly present the pair as [Y, X]
  std::vector<std::uint64_t> seeds{0};
  std::vector<int> sweep_d, sweep_n;
  std::vector<double> sweep_lambda;
  std::string output_dir = "out";

  EstimatorKind estimator = EstimatorKind::Stein;
  SteinConfig stein;
  SsmConfig ssm;
  OrderingConfig ordering;
  std::string psi = "cube";
  double psi_tau = 1.0;

  bool prune = true;
  PruneConfig pruning;

  MechanismOptions mech;
  double latent_loading = 1.0;

  void validate() const {
    require(n >= 1, "config: n must be >= 1");
    require(d >= 1, "config: d must be >= 1");
    require(edges >= 0, "config: edges must be nonnegative");
    require(lambda >= 0, "config: lambda must be nonnegative");
    require(rho >= 0 && rho <= 1, "config: rho must lie in [0, 1]");
    require(!seeds.empty(), "config: seeds must be nonempty");
    require(pruning.alpha > 0 && pruning.alpha < 1, "config: alpha must lie in (0, 1)");
    require(pruning.subsample_cap >= 2, "config: subsample_cap must be >= 2");
    require(stein.ridge_per_sample > 0, "config: stein_ridge_per_sample must be positive");
    require(stein.bandwidth_scale > 0, "config: stein_bandwidth_scale must be positive");
    require(ssm.epochs >= 1 && ssm.batch_size >= 1 && ssm.projections >= 1, "config: invalid SSM settings");
    require(ssm.validation_fraction >= 0 && ssm.validation_fraction < 1 && ssm.validation_projections >= 1 &&
                ssm.patience >= 0,
            "config: invalid SSM early-stopping settings");
    require(ordering.bootstrap_resamples >= 2, "config: bootstrap_resamples must be >= 2");
    for (int v : sweep_d) require(v >= 1, "config: sweep_d entries must be >= 1");
    for (int v : sweep_n) require(v >= 1, "config: sweep_n entries must be >= 1");
    for (double v : sweep_lambda) require(v >= 0, "config: sweep_lambda entries must be nonnegative");
    OddTestFunction::parse(psi, psi_tau);
  }

  OddTestFunction odd_function() const { return OddTestFunction::parse(psi, psi_tau); }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["setting"] = to_string(c.setting);
  j["formulation"] = to_string(c.formulation);
  j["noise"] = to_string(c.noise);
  j["gumbel_centered"] = c.gumbel_centered;
  j["d"] = c.d;
  j["n"] = c.n;
  j["edges"] = c.edges;
  j["lambda"] = c.lambda;
  j["rho"] = c.rho;
  j["swap_columns"] = c.swap_columns;
  j["seeds"] = c.seeds;
  j["sweep_d"] = c.sweep_d;
  j["sweep_n"] = c.sweep_n;
  j["sweep_lambda"] = c.sweep_lambda;
  j["output_dir"] = c.output_dir;
  j["estimator"] = to_string(c.estimator);
  if (c.stein.bandwidth)
    j["stein_bandwidth"] = *c.stein.bandwidth;
  else
    j["stein_bandwidth"] = "median";
  j["stein_bandwidth_scale"] = c.stein.bandwidth_scale;
  j["stein_ridge_per_sample"] = c.stein.ridge_per_sample;
  j["stein_standardize"] = c.stein.standardize;
  j["ssm_hidden"] = c.ssm.hidden;
  j["ssm_activation"] = c.ssm.activation == Activation::Tanh ? "tanh" : "softplus";
  j["ssm_epochs"] = c.ssm.epochs;
  j["ssm_batch_size"] = c.ssm.batch_size;
  j["ssm_learning_rate"] = c.ssm.learning_rate;
  j["ssm_projections"] = c.ssm.projections;
  j["ssm_jvp"] = c.ssm.jvp == JvpMode::Nested ? "nested" : "finite_difference";
  j["ssm_fd_step"] = c.ssm.fd_step;
  j["ssm_validation_fraction"] = c.ssm.validation_fraction;
  j["ssm_validation_projections"] = c.ssm.validation_projections;
  j["ssm_patience"] = c.ssm.patience;
  j["psi"] = c.psi;
  j["psi_tau"] = c.psi_tau;
  j["bootstrap_resamples"] = c.ordering.bootstrap_resamples;
  j["threshold_se_multiple"] = c.ordering.threshold_se_multiple;
  j["prune"] = c.prune;
  j["alpha"] = c.pruning.alpha;
  j["subsample_cap"] = c.pruning.subsample_cap;
  j["kci_epsilon"] = c.pruning.kci.epsilon;
  j["kci_null"] = c.pruning.kci.null == KciNull::Gamma ? "gamma" : "permutation";
  j["kci_permutations"] = c.pruning.kci.permutations;
  j["gp_features"] = c.mech.gp_features;
  j["gp_bandwidth"] = c.mech.gp_bandwidth;
  j["sigma_weight_range"] = c.mech.sigma_weight_range;
  j["sigma_floor"] = c.mech.sigma_floor;
  j["sigma_span"] = c.mech.sigma_span;
  j["sigabs_amplitude_lo"] = c.mech.sigabs_amplitude_lo;
  j["sigabs_amplitude_hi"] = c.mech.sigabs_amplitude_hi;
  j["sigabs_slope_lo"] = c.mech.sigabs_slope_lo;
  j["sigabs_slope_hi"] = c.mech.sigabs_slope_hi;
  j["sigabs_random_signs"] = c.mech.sigabs_random_signs;
  j["sigabs_offset_range"] = c.mech.sigabs_offset_range;
  j["sigabs_clip"] = c.mech.sigabs_clip;
  j["latent_loading"] = c.latent_loading;
  return j;
}

/// Unknown keys are rejected so typos do not silently fall back to defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "config: top level must be a JSON object");
  RunConfig c;
  const std::set<std::string> known = [] {
    std::set<std::string> k;
    const nlohmann::json defaults = to_json(RunConfig{});
    for (const auto& [key, value] : defaults.items()) k.insert(key);
    return k;
  }();
  for (const auto& [key, value] : j.items())
    require(known.count(key) > 0, "config: unknown key '" + key + "'");

  auto get = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(target);
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError(std::string("config: bad value for '") + key + "': " + e.what());
    }
  };
  std::string s;
  if (j.contains("setting")) { get("setting", s); c.setting = parse_setting(s); }
  if (j.contains("formulation")) { get("formulation", s); c.formulation = parse_formulation(s); }
  if (j.contains("noise")) { get("noise", s); c.noise = parse_noise_kind(s); }
  get("gumbel_centered", c.gumbel_centered);
  get("d", c.d);
  get("n", c.n);
  c.edges = c.d;
  get("edges", c.edges);
  get("lambda", c.lambda);
  get("rho", c.rho);
  get("swap_columns", c.swap_columns);
  get("seeds", c.seeds);
  get("sweep_d", c.sweep_d);
  get("sweep_n", c.sweep_n);
  get("sweep_lambda", c.sweep_lambda);
  get("output_dir", c.output_dir);
  if (j.contains("estimator")) { get("estimator", s); c.estimator = parse_estimator(s); }
  if (j.contains("stein_bandwidth")) {
    const auto& v = j.at("stein_bandwidth");
    if (v.is_string()) {
      require(v.get<std::string>() == "median", "config: stein_bandwidth must be \"median\" or a number");
      c.stein.bandwidth.reset();
    } else {
      c.stein.bandwidth = v.get<double>();
      require(*c.stein.bandwidth > 0, "config: stein_bandwidth must be positive");
    }
  }
  get("stein_bandwidth_scale", c.stein.bandwidth_scale);
  get("stein_ridge_per_sample", c.stein.ridge_per_sample);
  get("stein_standardize", c.stein.standardize);
  get("ssm_hidden", c.ssm.hidden);
  if (j.contains("ssm_activation")) {
    get("ssm_activation", s);
    require(s == "tanh" || s == "softplus", "config: ssm_activation must be tanh or softplus");
    c.ssm.activation = s == "tanh" ? Activation::Tanh : Activation::Softplus;
  }
  get("ssm_epochs", c.ssm.epochs);
  get("ssm_batch_size", c.ssm.batch_size);
  get("ssm_learning_rate", c.ssm.learning_rate);
  get("ssm_projections", c.ssm.projections);
  if (j.contains("ssm_jvp")) {
    get("ssm_jvp", s);
    require(s == "nested" || s == "finite_difference", "config: ssm_jvp must be nested or finite_difference");
    c.ssm.jvp = s == "nested" ? JvpMode::Nested : JvpMode::FiniteDifference;
  }
  get("ssm_fd_step", c.ssm.fd_step);
  get("ssm_validation_fraction", c.ssm.validation_fraction);
  get("ssm_validation_projections", c.ssm.validation_projections);
  get("ssm_patience", c.ssm.patience);
  get("psi", c.psi);
  get("psi_tau", c.psi_tau);
  get("bootstrap_resamples", c.ordering.bootstrap_resamples);
  get("threshold_se_multiple", c.ordering.threshold_se_multiple);
  get("prune", c.prune);
  get("alpha", c.pruning.alpha);
  get("subsample_cap", c.pruning.subsample_cap);
  get("kci_epsilon", c.pruning.kci.epsilon);
  if (j.contains("kci_null")) {
    get("kci_null", s);
    require(s == "gamma" || s == "permutation", "config: kci_null must be gamma or permutation");
    c.pruning.kci.null = s == "gamma" ? KciNull::Gamma : KciNull::Permutation;
  }
  get("kci_permutations", c.pruning.kci.permutations);
  get("gp_features", c.mech.gp_features);
  get("gp_bandwidth", c.mech.gp_bandwidth);
  get("sigma_weight_range", c.mech.sigma_weight_range);
  get("sigma_floor", c.mech.sigma_floor);
  get("sigma_span", c.mech.sigma_span);
  get("sigabs_amplitude_lo", c.mech.sigabs_amplitude_lo);
  get("sigabs_amplitude_hi", c.mech.sigabs_amplitude_hi);
  get("sigabs_slope_lo", c.mech.sigabs_slope_lo);
  get("sigabs_slope_hi", c.mech.sigabs_slope_hi);
  get("sigabs_random_signs", c.mech.sigabs_random_signs);
  get("sigabs_offset_range", c.mech.sigabs_offset_range);
  get("sigabs_clip", c.mech.sigabs_clip);
  get("latent_loading", c.latent_loading);
  c.ordering.psi = OddTestFunction::parse(c.psi, c.psi_tau);
  c.validate();
  return c;
}

}  // namespace skewscore
