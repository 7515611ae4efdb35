#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace skewscore;

namespace {

Vector normals(int n, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = standard_normal(rng);
  return v;
}

}  // namespace

TEST_CASE("KCI is calibrated under unconditional independence") {
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = make_rng(seed, 60);
    const Vector x = normals(500, rng), y = normals(500, rng);
    const KciResult r = kci_test(x, y);
    REQUIRE(r.p_value >= 0.0);
    REQUIRE(r.p_value <= 1.0);
    rejections += r.p_value < 0.05;
  }
  const double rate = rejections / 200.0;
  UNSCOPED_INFO("rejection rate " << rate);
  CHECK(rate >= 0.01);
  CHECK(rate <= 0.12);
}

TEST_CASE("KCI detects a strong dependence") {
  int detected = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng = make_rng(seed, 61);
    const Vector x = normals(500, rng);
    const Vector y = x + 0.1 * normals(500, rng);
    detected += kci_test(x, y).p_value < 0.01;
  }
  CHECK(detected >= 38);
}

TEST_CASE("KCI is calibrated under conditional independence") {
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = make_rng(seed, 62);
    const Vector z = normals(500, rng);
    const Vector x = z + normals(500, rng), y = z + normals(500, rng);
    const KciResult r = kci_test(x, y, Matrix(z));
    REQUIRE(r.p_value >= 0.0);
    REQUIRE(r.p_value <= 1.0);
    rejections += r.p_value < 0.05;
  }
  const double rate = rejections / 200.0;
  UNSCOPED_INFO("conditional rejection rate " << rate);
  CHECK(rate >= 0.01);
  CHECK(rate <= 0.12);

  // Marginally the two are clearly dependent.
  Rng rng = make_rng(63);
  const Vector z = normals(500, rng);
  const Vector x = z + normals(500, rng), y = z + normals(500, rng);
  CHECK(kci_test(x, y).p_value < 0.01);
}

TEST_CASE("KCI argument errors") {
  Rng rng = make_rng(64);
  const Vector x = normals(50, rng), y = normals(50, rng);
  CHECK_THROWS_AS(kci_test(x, normals(40, rng)), ParameterError);
  Matrix wide(50, 50);
  for (Eigen::Index i = 0; i < wide.size(); ++i) wide.data()[i] = standard_normal(rng);
  CHECK_THROWS_AS(kci_test(x, y, wide), ParameterError);
  Vector bad = x;
  bad(3) = std::nan("");
  CHECK_THROWS_AS(kci_test(bad, y), DataError);
}

TEST_CASE("KCI permutation null agrees with the gamma approximation") {
  Rng rng = make_rng(65);
  const Vector x = normals(200, rng);
  const Vector indep = normals(200, rng);
  const Vector dep = x.array().square().matrix() + 0.5 * normals(200, rng);
  KciConfig perm;
  perm.null = KciNull::Permutation;
  perm.permutations = 300;
  CHECK(kci_test(x, dep, perm).p_value < 0.01);
  CHECK(kci_test(x, dep).p_value < 0.01);
  const double pg = kci_test(x, indep).p_value, pp = kci_test(x, indep, perm).p_value;
  CHECK(pp > 0.0);
  CHECK(std::abs(pg - pp) < 0.15);
  CHECK(kci_test(x, indep, perm).p_value == pp);
}

TEST_CASE("pruning a single edge") {
  int kept = 0, empty = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, 66);
    const Scm scm = testing::hsnm_chain({0, 1}, rng);
    const DataMatrix x = synthesize(scm, 1000, rng);
    const PruneResult r = prune(x, TopOrder({0, 1}));
    REQUIRE(r.tests.size() == 1);
    kept += r.graph.has_edge(0, 1);

    Matrix ind(1000, 2);
    for (Eigen::Index i = 0; i < ind.size(); ++i) ind.data()[i] = standard_normal(rng);
    empty += prune(ind, TopOrder({0, 1})).graph.edge_count() == 0;
  }
  UNSCOPED_INFO("kept " << kept << ", empty " << empty);
  CHECK(kept >= 18);
  CHECK(empty >= 18);
}

TEST_CASE("pruning runs one test per ordered pair and respects the order") {
  RunConfig cfg;
  cfg.setting = Setting::Multivariate;
  cfg.d = 10;
  cfg.edges = 10;
  cfg.n = 300;
  const GeneratedDataset ds = generate_dataset(cfg, 3);
  const TopOrder order({3, 1, 4, 0, 5, 9, 2, 6, 8, 7});
  PruneConfig pc;
  pc.subsample_cap = 200;
  const PruneResult r = prune(ds.data, order, pc);
  CHECK(r.tests.size() == 45);
  CHECK(r.rows.size() == 200);
  CHECK(std::is_sorted(r.rows.begin(), r.rows.end()));
  std::vector<int> pos(10);
  for (int k = 0; k < 10; ++k) pos[static_cast<std::size_t>(order[k])] = k;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (r.graph.has_edge(i, j)) CHECK(pos[static_cast<std::size_t>(i)] < pos[static_cast<std::size_t>(j)]);
  CHECK(r.graph.is_acyclic());
  for (const auto& t : r.tests) {
    CHECK(t.result.p_value >= 0.0);
    CHECK(t.result.p_value <= 1.0);
    CHECK(t.kept == (t.result.p_value < pc.alpha));
  }

  CHECK_THROWS_AS(prune(ds.data, TopOrder({0, 1, 2})), ParameterError);
  pc.alpha = 1.0;
  CHECK_THROWS_AS(prune(ds.data, order, pc), ParameterError);
}

TEST_CASE("pruning is deterministic and affine invariant") {
  RunConfig cfg;
  cfg.setting = Setting::Multivariate;
  cfg.d = 5;
  cfg.edges = 5;
  cfg.n = 1500;
  const GeneratedDataset ds = generate_dataset(cfg, 8);
  const TopOrder order(*ds.truth.topological_order());
  PruneConfig pc;
  pc.seed = 8;
  const PruneResult a = prune(ds.data, order, pc), b = prune(ds.data, order, pc);
  CHECK(a.rows == b.rows);
  CHECK(a.graph == b.graph);

  Matrix scaled = ds.data;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) scaled.col(c) = (2.5 + c) * scaled.col(c).array() - 3.0 * c;
  const PruneResult s = prune(scaled, order, pc);
  CHECK(s.graph == a.graph);
  for (std::size_t k = 0; k < a.tests.size(); ++k)
    CHECK(s.tests[k].result.p_value == Catch::Approx(a.tests[k].result.p_value).margin(1e-6));
}
