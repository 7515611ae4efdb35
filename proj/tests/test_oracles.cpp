#include "catch_amalgamated.hpp"
#include "support.hpp"

#include <numbers>

using namespace skewscore;

namespace {

const double kRoot2Pi = std::sqrt(2.0 * std::numbers::pi);

struct Poly {
  const char* name;
  ScalarFn f, df;
};

// Skew_x of the quadratic f(x) = a x^2 + b x is 8a|1 + 2b| by Gaussian moments.
double quadratic_skew(double a, double b) { return 8.0 * std::abs(a) * std::abs(1.0 + 2.0 * b); }

BivariateModelSpec sigabs_latent(double lambda) {
  return latent_triangular_spec(
      lambda, [](double x) { return 2.0 * sigmoid(2.0 * x + 0.3); },
      [](double x) {
        const double s = sigmoid(2.0 * x + 0.3);
        return 4.0 * s * (1.0 - s);
      },
      [](double x) { return std::max(std::abs(x), 0.1); },
      [](double x) { return std::abs(x) > 0.1 ? (x > 0 ? 1.0 : -1.0) : 0.0; });
}

}  // namespace

TEST_CASE("closed-form skewscores") {
  CHECK(skewscore_gumbel(1.0) == 2.0);
  CHECK(skewscore_gumbel(2.0) == 0.25);
  CHECK(skewscore_gamma(5.0, 1.0) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(skewscore_gamma(4.0, 2.0) == Catch::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(skewscore_gumbel(0.0), ParameterError);
  CHECK_THROWS_AS(skewscore_gumbel(-1.0), ParameterError);
  CHECK_THROWS_AS(skewscore_gamma(3.0, 1.0), DomainError);
  CHECK_THROWS_AS(skewscore_gamma(2.5, 1.0), DomainError);
  CHECK_THROWS_AS(skewscore_gamma(5.0, 0.0), ParameterError);
}

TEST_CASE("Monte-Carlo skewscores match the closed forms") {
  Rng rng = make_rng(70);
  CHECK(mc_skew_univariate(Gumbel{1.0, true}, 1000000, rng) == Catch::Approx(2.0).epsilon(0.05));
  CHECK(mc_skew_univariate(Gumbel{1.0, false}, 1000000, rng) == Catch::Approx(2.0).epsilon(0.05));
  CHECK(mc_skew_univariate(GammaLaw{6.0, 1.0}, 1000000, rng) == Catch::Approx(skewscore_gamma(6.0, 1.0)).epsilon(0.05));
}

TEST_CASE("symmetric densities have unskewed scores") {
  for (const Law& law : {Law{Gaussian{1.0}}, Law{Laplace{1.0}}, Law{StudentT{5.0, 1.0}}, Law{SmoothedUniform{1.0, 0.2}}}) {
    Rng rng = make_rng(71);
    Vector s(400000);
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = score(law, sample(law, rng));
    const double se = skew_bootstrap_se(s, {}, 100, rng);
    CHECK(skew_of_score(s) < 3.0 * se);
  }
}

TEST_CASE("Gauss-Hermite rule") {
  SECTION("even moments are exact") {
    double dfact = 1.0;
    for (int k = 0; k <= 10; ++k) {
      if (k > 0) dfact *= 2 * k - 1;
      const QuadratureResult q = integrate_gaussian_weighted([k](double x) { return std::pow(x, 2 * k); });
      CHECK(q.value == Catch::Approx(kRoot2Pi * dfact).epsilon(1e-12));
      const QuadratureResult odd = integrate_gaussian_weighted([k](double x) { return std::pow(x, 2 * k + 1); });
      CHECK(std::abs(odd.value) < 1e-9 * dfact);
    }
  }
  SECTION("stable under node doubling") {
    for (auto g : {std::function<double(double)>([](double x) { return 1 + x * x - 0.3 * std::pow(x, 6); }),
                   std::function<double(double)>([](double x) { return std::pow(x, 2) * std::pow(1 + 2 * x, 2); })}) {
      QuadratureConfig c;
      const double a = integrate_gaussian_weighted(g, c).value;
      c.nodes = 128;
      const double b = integrate_gaussian_weighted(g, c).value;
      CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
    }
  }
  SECTION("configuration and convergence errors") {
    QuadratureConfig c;
    c.nodes = 15;
    CHECK_THROWS_AS(integrate_gaussian_weighted([](double) { return 1.0; }, c), ParameterError);
    c.nodes = 64;
    c.tolerance = 0.0;
    CHECK_THROWS_AS(integrate_gaussian_weighted([](double) { return 1.0; }, c), ParameterError);
    CHECK_THROWS_AS(integrate_gaussian_weighted([](double x) { return std::exp(0.45 * x * x); }), NumericError);
  }
}

TEST_CASE("confounded additive model skew") {
  CHECK(confounded_anm_skew_x([](double) { return 0.7; }).skew_x < 1e-12);
  CHECK(confounded_anm_skew_x([](double) { return -2.0; }).skew_x < 1e-12);
  CHECK(confounded_anm_skew_x([](double x) { return 2.0 * x; }).skew_x == Catch::Approx(8.0).margin(1e-6));
  CHECK(confounded_anm_skew_x([](double x) { return 2.0 * x; }).skew_y == 0.0);

  const double a = 1.3;
  CHECK(confounded_anm_skew_x([a](double x) { return 2 * a * x - 0.5; }).skew_x < 1e-6);
  CHECK(confounded_anm_skew_x([a](double x) { return 2 * a * x + 0.5; }).skew_x ==
        Catch::Approx(quadratic_skew(a, 0.5)).margin(1e-6));
  for (double b : {-1.0, 0.0, 0.25, 2.0})
    CHECK(confounded_anm_skew_x([a, b](double x) { return 2 * a * x + b; }).skew_x ==
          Catch::Approx(quadratic_skew(a, b)).margin(1e-6));

  // Non-polynomial slope: int x sin(x) e^{-x^2/2} dx = sqrt(2 pi) e^{-1/2}, so Skew_x = 4 e^{-1/2}.
  QuadratureConfig trap;
  trap.scheme = QuadratureScheme::AdaptiveTrapezoid;
  const auto sine = [](double x) { return std::sin(x); };
  CHECK(confounded_anm_skew_x(sine, trap).skew_x == Catch::Approx(4.0 * std::exp(-0.5)).margin(1e-8));
  CHECK(confounded_anm_skew_x(sine).skew_x == Catch::Approx(4.0 * std::exp(-0.5)).margin(1e-8));
}

TEST_CASE("quadrature and Monte Carlo agree on polynomial mechanisms") {
  const std::vector<Poly> polys{
      {"x^2", [](double x) { return x * x; }, [](double x) { return 2 * x; }},
      {"x^2/2 + x", [](double x) { return 0.5 * x * x + x; }, [](double x) { return x + 1; }},
      {"-x^2", [](double x) { return -x * x; }, [](double x) { return -2 * x; }},
      {"x^2/4 + x/5", [](double x) { return 0.25 * x * x + 0.2 * x; }, [](double x) { return 0.5 * x + 0.2; }},
      {"0.7 x", [](double x) { return 0.7 * x; }, [](double) { return 0.7; }},
  };
  std::uint64_t seed = 0;
  for (const Poly& p : polys) {
    const double quad = confounded_anm_skew_x(p.df).skew_x;
    Rng rng = make_rng(seed++, 72);
    const McSkewResult mc = mc_skew_pair(confounded_anm_spec(p.f, p.df), 1000000, rng, 100);
    INFO(p.name << ": quadrature " << quad << ", Monte Carlo " << mc.skew_x << " +- " << mc.se_x);
    CHECK(std::abs(mc.skew_x - quad) <= std::max(0.05 * quad, 3.0 * mc.se_x));
    CHECK(mc.skew_y <= 3.0 * mc.se_y);
  }
}

TEST_CASE("latent triangular model") {
  // X = Z + N0, Y = lambda x^2 + Z + N1 gives Skew_x = 4 lambda by Gaussian moments;
  // the joint density written with a unit-variance cause gives the 8 of the additive oracle.
  const auto sq = [](double x) { return x * x; };
  const auto dsq = [](double x) { return 2 * x; };
  const auto one = [](double) { return 1.0; };
  const auto zero = [](double) { return 0.0; };
  for (double lambda : {0.5, 1.0}) {
    Rng rng = make_rng(73);
    const McSkewResult mc = mc_skew_pair(latent_triangular_spec(lambda, sq, dsq, one, zero), 1000000, rng, 100);
    INFO("lambda " << lambda << ": " << mc.skew_x << " +- " << mc.se_x);
    CHECK(std::abs(mc.skew_x - 4.0 * lambda) <= std::max(0.05 * 4.0 * lambda, 3.0 * mc.se_x));
    CHECK(mc.skew_y <= 3.0 * mc.se_y);
  }

  // lambda = 0 leaves X -> Y purely linear-Gaussian; no side is skewed.
  Rng rng = make_rng(74);
  const McSkewResult flat = mc_skew_pair(latent_triangular_spec(0.0, sq, dsq, one, zero), 400000, rng, 100);
  CHECK(flat.skew_x <= 3.0 * flat.se_x);
  CHECK(flat.skew_y <= 3.0 * flat.se_y);
  CHECK_THROWS_AS(latent_triangular_spec(-1.0, sq, dsq, one, zero), ParameterError);
}

TEST_CASE("latent lambda sweep margin grows") {
  const auto sq = [](double x) { return x * x; };
  const auto dsq = [](double x) { return 2 * x; };
  const auto one = [](double) { return 1.0; };
  const auto zero = [](double) { return 0.0; };
  for (int model = 0; model < 2; ++model) {
    double prev = -1.0;
    for (double lambda : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const BivariateModelSpec spec =
          model == 0 ? latent_triangular_spec(lambda, sq, dsq, one, zero) : sigabs_latent(lambda);
      std::vector<double> margins;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = make_rng(seed, 75);
        const McSkewResult mc = mc_skew_pair(spec, 200000, rng, 20);
        margins.push_back(mc.skew_x - mc.skew_y);
      }
      const double med = testing::median(margins);
      INFO("model " << model << " lambda " << lambda << " median margin " << med);
      CHECK(med > 0.0);
      CHECK(med >= prev);
      prev = med;
    }
  }
}

TEST_CASE("identifiability integral") {
  BivariateModelSpec lin;
  lin.f = [](double x) { return 0.8 * x; };
  lin.df = [](double) { return 0.8; };
  const Assumption1Result rl = assumption1_lhs(lin);
  CHECK(std::abs(rl.value) < 1e-4);
  CHECK_FALSE(rl.identifiable);

  CHECK(std::abs(assumption1_lhs(BivariateModelSpec{}).value) < 1e-4);

  // The joint density of the quadratic example: E[s_x^3] = -8.
  const BivariateModelSpec ex = confounded_anm_spec([](double x) { return x * x; }, [](double x) { return 2 * x; });
  const Assumption1Result re = assumption1_lhs(ex);
  CHECK(re.value == Catch::Approx(-8.0).margin(1e-6));
  CHECK(re.identifiable);
  CHECK(re.residual < 1e-8);

  // Y = X^2 + N with unit Gaussians has p(x, y) = p(-x, y), so every odd x-moment cancels.
  BivariateModelSpec mirror;
  mirror.f = [](double x) { return x * x; };
  mirror.df = [](double x) { return 2 * x; };
  CHECK(std::abs(assumption1_lhs(mirror).value) < 1e-8);

  // Heteroscedastic symmetric models generally satisfy it.
  const BivariateModelSpec het = testing::random_pair_spec(Formulation::SigAbs, Gaussian{}, 3);
  CHECK(std::abs(assumption1_lhs(het).value) > 1e-3);

  BivariateModelSpec heavy = lin;
  heavy.noise = StudentT{2.0, 1.0};
  CHECK_THROWS_AS(assumption1_lhs(heavy), NumericError);
}

TEST_CASE("symmetric noise leaves the effect side unskewed") {
  std::uint64_t seed = 0;
  for (Formulation form : {Formulation::GpSig, Formulation::SigAbs})
    for (const Law& noise : {Law{Gaussian{1.0}}, Law{Laplace{1.0}}, Law{StudentT{5.0, 1.0}}}) {
      const BivariateModelSpec spec = testing::random_pair_spec(form, noise, seed);
      Rng rng = make_rng(seed++, 76);
      const McSkewResult mc = mc_skew_pair(spec, 200000, rng, 100);
      INFO(to_string(form) << " seed " << seed << ": skew_y " << mc.skew_y << " se " << mc.se_y);
      CHECK(mc.skew_y <= 3.0 * mc.se_y);
    }
}

TEST_CASE("conformance report") {
  const std::vector<ConformanceCheck> checks = oracle_conformance(0, 200000);
  const nlohmann::json j = to_json(checks);
  REQUIRE(j["checks"].size() == checks.size());
  bool all = true;
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("observed"));
    all = all && c["pass"].get<bool>();
  }
  CHECK(j["all_pass"] == all);
  auto find = [&](const std::string& name) {
    for (const auto& c : checks)
      if (c.name == name) return c;
    FAIL("missing check " << name);
    return ConformanceCheck{};
  };
  CHECK(find("gumbel_beta1_closed_form").pass);
  CHECK(find("confounded_square_f").pass);
  CHECK(find("assumption1_gaussian_linear").pass);
  CHECK(find("assumption1_square_f_nonzero").pass);
  // The b = 1/2 quadratic is skewed (16a); the reported zero sits at b = -1/2.
  CHECK(find("confounded_quadratic_b_half").observed == Catch::Approx(quadratic_skew(1.3, 0.5)).margin(1e-6));
}
