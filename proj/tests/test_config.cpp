#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace skewscore;
using nlohmann::json;

TEST_CASE("every default is materialized and round-trips") {
  const json defaults = to_json(RunConfig{});
  CHECK(to_json(config_from_json(defaults)) == defaults);
  CHECK(to_json(config_from_json(json::object())) == defaults);
  for (const char* key : {"setting", "formulation", "noise", "d", "n", "edges", "lambda", "rho", "estimator", "psi",
                          "alpha", "seeds", "output_dir"})
    CHECK(defaults.contains(key));
}

TEST_CASE("non-default values survive a round trip") {
  json j{{"setting", "multivariate_confounded"},
         {"formulation", "sig_abs"},
         {"noise", "student_t"},
         {"d", 7},
         {"edges", 3.5},
         {"n", 321},
         {"rho", 0.4},
         {"seeds", {3, 1, 4}},
         {"sweep_d", {5, 10}},
         {"estimator", "ssm"},
         {"ssm_jvp", "finite_difference"},
         {"ssm_patience", 0},
         {"stein_bandwidth", 0.8},
         {"psi", "tanh"},
         {"psi_tau", 0.5},
         {"alpha", 0.01},
         {"kci_null", "permutation"},
         {"prune", false}};
  const RunConfig c = config_from_json(j);
  CHECK(c.setting == Setting::MultivariateConfounded);
  CHECK(c.formulation == Formulation::SigAbs);
  CHECK(c.estimator == EstimatorKind::Ssm);
  CHECK(c.ssm.jvp == JvpMode::FiniteDifference);
  CHECK(c.stein.bandwidth.value() == 0.8);
  CHECK(c.pruning.alpha == 0.01);
  CHECK(c.pruning.kci.null == KciNull::Permutation);
  CHECK(c.ordering.psi.kind == OddTestFunction::Kind::ScaledTanh);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 1, 4});
  const json echoed = to_json(c);
  CHECK(to_json(config_from_json(echoed)) == echoed);
  for (const auto& [key, value] : j.items()) CHECK(echoed.at(key) == value);
}

TEST_CASE("edges default to d") {
  CHECK(config_from_json(json{{"d", 7}}).edges == 7);
  CHECK(config_from_json(json{{"d", 7}, {"edges", 2}}).edges == 2);
}

TEST_CASE("invalid configurations are rejected") {
  const std::vector<json> bad{
      json{{"n_samples", 10}},
      json{{"n", 0}},
      json{{"n", "many"}},
      json{{"d", 0}},
      json{{"alpha", 1.5}},
      json{{"alpha", 0.0}},
      json{{"rho", 1.2}},
      json{{"lambda", -1}},
      json{{"seeds", json::array()}},
      json{{"setting", "trivariate"}},
      json{{"estimator", "score_net"}},
      json{{"noise", "cauchy"}},
      json{{"psi", "quartic"}},
      json{{"psi", "tanh"}, {"psi_tau", 0}},
      json{{"stein_bandwidth", -1.0}},
      json{{"stein_bandwidth", "silverman"}},
      json{{"ssm_validation_fraction", 1.0}},
      json{{"kci_null", "bootstrap"}},
      json{{"sweep_d", {5, 0}}},
      json::array(),
  };
  for (const json& j : bad) {
    INFO(j.dump());
    CHECK_THROWS_AS(config_from_json(j), ParameterError);
  }
}
