#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace skewscore;
using skewscore::testing::mean_se;
using skewscore::testing::median;
using skewscore::testing::random_pair_spec;

namespace {

Matrix normals(int n, int d, Rng& rng) {
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = standard_normal(rng);
  return x;
}

/// Plain median-heuristic estimator with ridge 0.01 n on raw coordinates.
SteinConfig plain_stein() {
  SteinConfig c;
  c.bandwidth_scale = 1.0;
  c.ridge_per_sample = 0.01;
  c.standardize = false;
  return c;
}

double mse(const Vector& a, const Vector& b) { return (a - b).squaredNorm() / static_cast<double>(a.size()); }

BivariateModelSpec hetero_spec(Law noise) {
  BivariateModelSpec s;
  s.cause = Gaussian{1.3};
  s.noise = noise;
  s.f = [](double x) { return std::sin(1.5 * x) + 0.3 * x * x; };
  s.df = [](double x) { return 1.5 * std::cos(1.5 * x) + 0.6 * x; };
  s.sigma = [](double x) { return 0.5 + 1.5 * sigmoid(1.2 * x - 0.3); };
  s.dsigma = [](double x) {
    const double q = sigmoid(1.2 * x - 0.3);
    return 1.5 * 1.2 * q * (1.0 - q);
  };
  return s;
}

}  // namespace

TEST_CASE("median heuristic") {
  Matrix a(2, 1);
  a << 0, 2;
  CHECK(median_heuristic_bandwidth(a) == 2.0);
  Matrix b(3, 1);
  b << 0, 1, 2;
  CHECK(median_heuristic_bandwidth(b) == 1.0);
  CHECK(median_heuristic_bandwidth(Matrix::Constant(5, 2, 3.0)) == 1.0);
  CHECK_THROWS_AS(median_heuristic_bandwidth(Matrix::Zero(1, 1)), ParameterError);
}

TEST_CASE("Stein estimator on Gaussians") {
  Rng rng = make_rng(21);
  const Matrix x1 = normals(1000, 1, rng);
  const ScoreMatrix s1 = estimate_score_stein(x1, plain_stein());
  CHECK(mse(s1.col(0), -x1.col(0)) < 0.1);

  const Matrix x2 = normals(1000, 2, rng);
  const ScoreMatrix s2 = estimate_score_stein(x2, plain_stein());
  CHECK(mse(s2.col(0), -x2.col(0)) < 0.1);
  CHECK(mse(s2.col(1), -x2.col(1)) < 0.1);

  for (const SteinConfig& cfg : {plain_stein(), SteinConfig{}}) {
    const ScoreMatrix s = estimate_score_stein(x2, cfg);
    for (int j = 0; j < 2; ++j) {
      const auto [m, se] = mean_se(s.col(j));
      CHECK(std::abs(m) < 3 * se);
    }
  }
  CHECK(estimate_score_stein(x2) == estimate_score_stein(x2));
  CHECK_THROWS_AS(estimate_score_stein(Matrix::Zero(1, 1)), ParameterError);
}

TEST_CASE("Stein error shrinks with sample size") {
  // Monotone up to run-to-run noise: a step may rise by at most two standard errors
  // of the across-seed spread.
  for (const SteinConfig& cfg : {plain_stein(), SteinConfig{}}) {
    std::vector<double> med, se;
    for (int n : {250, 500, 1000, 2000}) {
      Vector errs(10);
      for (int s = 0; s < 10; ++s) {
        Rng rng = make_rng(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(n));
        const Matrix x = normals(n, 2, rng);
        const ScoreMatrix g = estimate_score_stein(x, cfg);
        errs(s) = (g + x).squaredNorm() / (2.0 * n);
      }
      med.push_back(median(std::vector<double>(errs.data(), errs.data() + errs.size())));
      se.push_back(mean_se(errs).second);
      UNSCOPED_INFO("n=" << n << " median mse " << med.back() << " se " << se.back());
    }
    for (std::size_t k = 1; k < med.size(); ++k) CHECK(med[k] <= med[k - 1] + 2.0 * std::max(se[k], se[k - 1]));
    CHECK(med.back() < med.front());
  }
}

TEST_CASE("sliced score matching on a standard normal") {
  Rng rng = make_rng(22);
  const Matrix x = normals(2000, 1, rng);
  SECTION("nested directional derivative") {
    const ScoreMatrix s = estimate_score_ssm(x, SsmConfig{}, rng);
    CHECK(mse(s.col(0), -x.col(0)) < 0.15);
  }
  SECTION("finite-difference directional derivative") {
    SsmConfig cfg;
    cfg.jvp = JvpMode::FiniteDifference;
    const ScoreMatrix s = estimate_score_ssm(x, cfg, rng);
    CHECK(mse(s.col(0), -x.col(0)) < 0.15);
  }
}

TEST_CASE("sliced score matching loss decreases on GP-sig data") {
  Rng rng = make_rng(23);
  const PairDataset p = synthesize_bivariate(Formulation::GpSig, Gaussian{}, 1000, rng);
  SsmConfig cfg;
  cfg.validation_fraction = 0.0;
  const SsmFit fit = fit_ssm(p.data, cfg, rng);
  REQUIRE(fit.epoch_loss.size() == 100);
  CHECK(fit.epoch_loss.back() < fit.epoch_loss.front());
  CHECK(fit.best_epoch == 100);

  const SsmFit stopped = fit_ssm(p.data, SsmConfig{}, rng);
  REQUIRE(!stopped.validation_loss.empty());
  CHECK(stopped.epoch_loss.size() == stopped.validation_loss.size());
  CHECK(stopped.epoch_loss.back() < stopped.epoch_loss.front());
  const auto best = std::min_element(stopped.validation_loss.begin(), stopped.validation_loss.end());
  CHECK(stopped.best_epoch == static_cast<int>(best - stopped.validation_loss.begin()) + 1);
}

TEST_CASE("sliced score matching agrees with the Stein estimator") {
  Rng rng = make_rng(24);
  const Matrix x = normals(1000, 2, rng);
  const ScoreMatrix a = estimate_score_ssm(x, SsmConfig{}, rng);
  const ScoreMatrix b = estimate_score_stein(x, plain_stein());
  CHECK((a - b).cwiseAbs().mean() < 0.2);
}

TEST_CASE("sliced score matching reports divergence") {
  Rng rng = make_rng(25);
  const Matrix x = normals(256, 1, rng);
  SsmConfig cfg;
  cfg.learning_rate = 1e200;
  cfg.epochs = 5;
  cfg.validation_fraction = 0.0;
  CHECK_THROWS_AS(fit_ssm(x, cfg, rng), TrainingError);
  SsmConfig small;
  small.batch_size = 512;
  CHECK_THROWS_AS(fit_ssm(x, small, rng), ParameterError);
  small.batch_size = 256;
  CHECK_NOTHROW(fit_ssm(x, small, rng));
}

TEST_CASE("analytic score of independent Gaussians") {
  Rng rng = make_rng(26);
  const Matrix pts = normals(50, 2, rng);
  const ScoreMatrix s = analytic_score_bivariate(BivariateModelSpec{}, pts);
  CHECK(s == -pts);
}

TEST_CASE("analytic score matches finite differences of the log density") {
  for (const Law& noise : {Law{Gaussian{0.8}}, Law{StudentT{5.0}}, Law{Gumbel{1.0, true}}, Law{SmoothedUniform{}}}) {
    const BivariateModelSpec spec = hetero_spec(noise);
    Rng rng = make_rng(27);
    const Matrix pts = sample_bivariate(spec, 100, rng);
    const ScoreMatrix s = analytic_score_bivariate(spec, pts);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double x = pts(i, 0), y = pts(i, 1);
      const double fx = (log_density(spec, x + h, y) - log_density(spec, x - h, y)) / (2 * h);
      const double fy = (log_density(spec, x, y + h) - log_density(spec, x, y - h)) / (2 * h);
      REQUIRE(std::abs(s(i, 0) - fx) <= 1e-5 * std::max(1.0, std::abs(fx)));
      REQUIRE(std::abs(s(i, 1) - fy) <= 1e-5 * std::max(1.0, std::abs(fy)));
    }
  }
}

TEST_CASE("cause-side score carries -sigma'/sigma on the u g(u) term") {
  const BivariateModelSpec spec = hetero_spec(Gaussian{});
  for (double x : {-1.0, 0.2, 0.9}) {
    const ScoreTerms t = score_terms(spec, x, 0.4);
    CHECK(t.c == Catch::Approx(-spec.dsigma(x) / spec.sigma(x)).epsilon(1e-15));
    CHECK(t.b == Catch::Approx(-spec.df(x) / spec.sigma(x)).epsilon(1e-15));
  }
}

TEST_CASE("effect-side score equals the conditional score") {
  Rng rng = make_rng(28);
  SECTION("Gaussian noise") {
    const BivariateModelSpec spec = hetero_spec(Gaussian{1.0});
    const Matrix pts = sample_bivariate(spec, 200, rng);
    const ScoreMatrix s = analytic_score_bivariate(spec, pts);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double x = pts(i, 0), sd = spec.sigma(x);
      const double direct = -(pts(i, 1) - spec.f(x)) / (sd * sd);
      REQUIRE(std::abs(s(i, 1) - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
  SECTION("Student-t noise") {
    const double nu = 5.0;
    const BivariateModelSpec spec = hetero_spec(StudentT{nu});
    const Matrix pts = sample_bivariate(spec, 200, rng);
    const ScoreMatrix s = analytic_score_bivariate(spec, pts);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double x = pts(i, 0), sd = spec.sigma(x), u = (pts(i, 1) - spec.f(x)) / sd;
      const double direct = -(nu + 1.0) * u / (nu + u * u) / sd;
      REQUIRE(std::abs(s(i, 1) - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("analytic scores have zero mean") {
  for (const Law& noise : {Law{Gaussian{}}, Law{Laplace{}}, Law{StudentT{5.0}}, Law{Gumbel{1.0, true}}}) {
    const BivariateModelSpec spec = hetero_spec(noise);
    Rng rng = make_rng(29);
    const ScoreMatrix s = analytic_score_bivariate(spec, sample_bivariate(spec, 200000, rng));
    for (int j = 0; j < 2; ++j) {
      const auto [m, se] = mean_se(s.col(j));
      CHECK(std::abs(m) < 3 * se);
    }
  }
}

TEST_CASE("effect-side score is unskewed under symmetric noise") {
  for (const Law& noise : {Law{Gaussian{}}, Law{Laplace{}}, Law{StudentT{5.0}}, Law{SmoothedUniform{}}}) {
    const BivariateModelSpec spec = hetero_spec(noise);
    Rng rng = make_rng(30);
    const ScoreMatrix s = analytic_score_bivariate(spec, sample_bivariate(spec, 200000, rng));
    const Vector cube = s.col(1).array().cube();
    const auto [m, se] = mean_se(cube);
    CHECK(std::abs(m) < 3 * se);
  }
}

TEST_CASE("analytic score reports density underflow") {
  Matrix pts(1, 2);
  pts << 1e200, 0.0;
  CHECK_THROWS_AS(analytic_score_bivariate(BivariateModelSpec{}, pts), NumericError);
}

TEST_CASE("exact multivariate margins match the bivariate oracle") {
  Rng rng = make_rng(31);
  const Mechanism m = draw_effect_mechanism(Formulation::GpSig, Gaussian{}, rng, {});
  Scm scm;
  scm.graph = Dag(2);
  scm.graph.add_edge(0, 1);
  scm.mechanisms = {Mechanism{}, m};
  const DataMatrix x = synthesize(scm, 300, rng);
  const ScoreMatrix a = analytic_score_scm(scm, x, {0, 1});
  const ScoreMatrix b = analytic_score_bivariate(skewscore::testing::spec_from_mechanism(m), x);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  const ScoreMatrix root = analytic_score_scm(scm, x, {0});
  CHECK((root.col(0) + x.col(0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(analytic_score_scm(scm, x, {1}), ParameterError);
}

TEST_CASE("random pair specs evaluate") {
  const BivariateModelSpec s = random_pair_spec(Formulation::SigAbs, Gaussian{}, 3);
  Rng rng = make_rng(32);
  const Matrix pts = sample_bivariate(s, 1000, rng);
  CHECK(analytic_score_bivariate(s, pts).allFinite());
}
