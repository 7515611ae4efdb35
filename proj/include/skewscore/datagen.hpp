#pragma once

#include "skewscore/dag.hpp"
#include "skewscore/gp.hpp"
#include "skewscore/laws.hpp"
#include "skewscore/mechanism.hpp"
#include "skewscore/rng.hpp"
#include "skewscore/types.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skewscore {

/// Hidden standard-normal confounders. Node i receives sum_l loadings(l, i) * Z_l additively.
struct LatentConfounding {
  Matrix loadings;  // L x d
  std::vector<std::pair<int, int>> confounded_pairs;

  int count() const noexcept { return static_cast<int>(loadings.rows()); }
};

struct Scm {
  Dag graph;
  std::vector<Mechanism> mechanisms;
  std::optional<LatentConfounding> latent;

  int size() const noexcept { return graph.size(); }

  void validate() const {
    const int d = size();
    require(static_cast<int>(mechanisms.size()) == d, "Scm: need exactly one mechanism per node");
    for (int i = 0; i < d; ++i) {
      const int k = static_cast<int>(graph.parents(i).size());
      const Mechanism& m = mechanisms[static_cast<std::size_t>(i)];
      const int ma = mean_arity(m.mean), sa = scale_arity(m.scale);
      require(ma < 0 || ma == k, "Scm: mean function of node " + std::to_string(i) + " expects " +
                                     std::to_string(ma) + " inputs but the node has " + std::to_string(k) + " parents");
      require(sa < 0 || sa == k, "Scm: scale function of node " + std::to_string(i) + " has the wrong arity");
      require(scale_lower_bound(m.scale) > 0, "Scm: scale of node " + std::to_string(i) + " is not bounded away from 0");
      skewscore::validate(m.noise);
    }
    if (latent) require(latent->loadings.cols() == d, "Scm: latent loadings must have one column per node");
  }
};

/// Gathers the parent columns of `node` from data (n x k).
inline Matrix parent_block(const Dag& g, int node, const Eigen::Ref<const Matrix>& data) {
  const std::vector<int> pa = g.parents(node);
  Matrix out(data.rows(), static_cast<Eigen::Index>(pa.size()));
  for (std::size_t c = 0; c < pa.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = data.col(pa[c]);
  return out;
}

/// Ancestral sampling. Latent columns are drawn first, then each node in topological order
/// draws its n noise values in one contiguous block.
inline DataMatrix synthesize(const Scm& scm, int n, Rng& rng) {
  require(n >= 1, "synthesize: n must be >= 1");
  scm.validate();
  const int d = scm.size();
  Matrix hidden;
  if (scm.latent) {
    hidden.resize(n, scm.latent->count());
    for (Eigen::Index l = 0; l < hidden.cols(); ++l)
      for (int r = 0; r < n; ++r) hidden(r, l) = standard_normal(rng);
  }
  DataMatrix data = DataMatrix::Zero(n, d);
  const std::vector<int> order = *scm.graph.topological_order();
  for (int node : order) {
    const Mechanism& m = scm.mechanisms[static_cast<std::size_t>(node)];
    const Matrix pa = parent_block(scm.graph, node, data);
    const Vector mu = mean_values(m, pa);
    const Vector sd = scale_values(m.scale, pa);
    auto col = data.col(node);
    for (int r = 0; r < n; ++r) col(r) = mu(r) + sd(r) * sample(m.noise, rng);
    if (scm.latent && hidden.cols() > 0) col += hidden * scm.latent->loadings.col(node);
  }
  if (!data.allFinite()) throw NumericError("synthesize: generated data contains non-finite values");
  return data;
}

// ---- random structure ---------------------------------------------------------------------

/// Erdos-Renyi DAG: uniform node permutation, each forward pair kept with p = avg_edges / (d(d-1)/2).
inline Dag sample_er_dag(int d, double avg_edges, Rng& rng) {
  require(d >= 1, "sample_er_dag: d must be >= 1");
  const double pairs = 0.5 * d * (d - 1);
  require(avg_edges >= 0, "sample_er_dag: avg_edges must be nonnegative");
  require(avg_edges <= pairs, "sample_er_dag: avg_edges " + std::to_string(avg_edges) + " exceeds the " +
                                  std::to_string(static_cast<long>(pairs)) + " possible edges");
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Dag::Adjacency adj = Dag::Adjacency::Zero(d, d);
  if (pairs > 0) {
    const double p = avg_edges / pairs;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        if (uniform(rng, 0.0, 1.0) < p) adj(perm[a], perm[b]) = 1;
  }
  return Dag::from_adjacency(adj);
}

// ---- noise protocol -------------------------------------------------------------------------

enum class NoiseKind { Gaussian, StudentT, Gumbel };

inline std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::StudentT: return "student_t";
    case NoiseKind::Gumbel: return "gumbel";
  }
  return "?";
}

inline NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "gaussian" || s == "gauss") return NoiseKind::Gaussian;
  if (s == "student_t" || s == "student" || s == "t") return NoiseKind::StudentT;
  if (s == "gumbel") return NoiseKind::Gumbel;
  throw ParameterError("unknown noise kind '" + s + "'");
}

/// Noise law for one node. Student-t degrees of freedom are drawn uniformly from {2,3,4,5}.
inline NoiseSpec draw_noise(NoiseKind kind, Rng& rng, double scale = 1.0, bool gumbel_centered = true) {
  switch (kind) {
    case NoiseKind::Gaussian: return Gaussian{scale};
    case NoiseKind::StudentT: {
      const int df = std::uniform_int_distribution<int>(2, 5)(rng);
      return StudentT{static_cast<double>(df), scale};
    }
    case NoiseKind::Gumbel: return Gumbel{scale, gumbel_centered};
  }
  throw ParameterError("draw_noise: unknown kind");
}

// ---- bivariate settings ---------------------------------------------------------------------

enum class Formulation { GpSig, SigAbs };

inline std::string to_string(Formulation f) { return f == Formulation::GpSig ? "gp_sig" : "sig_abs"; }

inline Formulation parse_formulation(const std::string& s) {
  if (s == "gp_sig" || s == "gpsig" || s == "GpSig") return Formulation::GpSig;
  if (s == "sig_abs" || s == "sigabs" || s == "SigAbs") return Formulation::SigAbs;
  throw ParameterError("unknown formulation '" + s + "'");
}

/// Knobs for the random mechanisms. Sig-abs defaults use positive amplitude and slope.
struct MechanismOptions {
  double gp_bandwidth = 1.0;
  int gp_features = 500;
  double sigma_weight_range = 2.0;  // w, b ~ U(-range, range) in 0.5 + 1.5 sigmoid(w u + b)
  double sigma_floor = 0.5;
  double sigma_span = 1.5;
  double sigabs_amplitude_lo = 1.0;
  double sigabs_amplitude_hi = 3.0;
  double sigabs_slope_lo = 1.0;
  double sigabs_slope_hi = 3.0;
  bool sigabs_random_signs = false;
  double sigabs_offset_range = 1.0;  // c, e ~ U(-range, range)
  double sigabs_clip = 0.1;
};

inline SigmoidScale draw_sigmoid_scale(int inputs, Rng& rng, const MechanismOptions& o) {
  SigmoidScale s;
  s.weights.resize(inputs);
  for (int j = 0; j < inputs; ++j) s.weights(j) = uniform(rng, -o.sigma_weight_range, o.sigma_weight_range);
  s.bias = uniform(rng, -o.sigma_weight_range, o.sigma_weight_range);
  s.floor = o.sigma_floor;
  s.span = o.sigma_span;
  return s;
}

inline SigmoidMean draw_invertible_sigmoid(Rng& rng, const MechanismOptions& o) {
  auto magnitude = [&](double lo, double hi) {
    const double v = uniform(rng, lo, hi);
    const bool flip = o.sigabs_random_signs && uniform(rng, 0.0, 1.0) < 0.5;
    return flip ? -v : v;
  };
  SigmoidMean m;
  m.amplitude = magnitude(o.sigabs_amplitude_lo, o.sigabs_amplitude_hi);
  m.weights = Vector::Constant(1, magnitude(o.sigabs_slope_lo, o.sigabs_slope_hi));
  m.bias = uniform(rng, -o.sigabs_offset_range, o.sigabs_offset_range);
  m.shift = uniform(rng, -o.sigabs_offset_range, o.sigabs_offset_range);
  return m;
}

/// Effect mechanism for a single cause under the given formulation.
inline Mechanism draw_effect_mechanism(Formulation form, const NoiseSpec& noise, Rng& rng, const MechanismOptions& o) {
  Mechanism m;
  m.noise = noise;
  if (form == Formulation::GpSig) {
    m.mean = GpMean{RandomFeatureFunction::sample(1, o.gp_bandwidth, o.gp_features, rng)};
    m.scale = draw_sigmoid_scale(1, rng, o);
  } else {
    require(o.sigabs_clip > 0, "Sig-abs clip must be positive");
    m.mean = draw_invertible_sigmoid(rng, o);
    m.scale = ClippedAbsScale{o.sigabs_clip};
  }
  return m;
}

struct PairDataset {
  DataMatrix data;  // columns [X, Y]
  Scm scm;          // generative model; for latent settings the hidden part lives in scm.latent
  int cause = 0;
  int effect = 1;
};

/// X ~ N(0,1), Y = f(X) + sigma(X) N.
inline PairDataset synthesize_bivariate(Formulation form, const NoiseSpec& noise, int n, Rng& rng,
                                        const MechanismOptions& opts = {}) {
  require(n >= 1, "synthesize_bivariate: n must be >= 1");
  PairDataset out;
  out.scm.graph = Dag(2);
  out.scm.graph.add_edge(0, 1);
  out.scm.mechanisms.resize(2);
  out.scm.mechanisms[1] = draw_effect_mechanism(form, noise, rng, opts);
  out.data = synthesize(out.scm, n, rng);
  return out;
}

/// Hidden Z ~ N(0,1); X = Z + N0, Y = lambda f(X) + Z + sigma(X) N1.
inline PairDataset synthesize_latent_triangular(double lambda, Formulation form, const NoiseSpec& q0,
                                                const NoiseSpec& q1, int n, Rng& rng,
                                                const MechanismOptions& opts = {}) {
  require(lambda >= 0, "synthesize_latent_triangular: lambda must be nonnegative");
  require(n >= 1, "synthesize_latent_triangular: n must be >= 1");
  PairDataset out;
  out.scm.graph = Dag(2);
  out.scm.graph.add_edge(0, 1);
  out.scm.mechanisms.resize(2);
  out.scm.mechanisms[0].noise = q0;
  out.scm.mechanisms[1] = draw_effect_mechanism(form, q1, rng, opts);
  out.scm.mechanisms[1].gain = lambda;
  LatentConfounding lat;
  lat.loadings = Matrix::Ones(1, 2);
  lat.confounded_pairs = {{0, 1}};
  out.scm.latent = lat;
  out.data = synthesize(out.scm, n, rng);
  return out;
}

// ---- multivariate settings ------------------------------------------------------------------

struct GraphOptions {
  int d = 10;
  double avg_edges = 10;
  NoiseKind noise = NoiseKind::Gaussian;
  bool gumbel_centered = true;
  double confounding_prob = 0.0;
  double latent_loading = 1.0;
  MechanismOptions mech;
};

struct GraphDataset {
  DataMatrix data;
  Scm scm;
};

/// GP mean over all parents and sigmoid scale for non-root nodes; roots get f = 0, sigma = 1.
inline Scm sample_hsnm(const GraphOptions& o, Rng& rng) {
  Scm scm;
  scm.graph = sample_er_dag(o.d, o.avg_edges, rng);
  scm.mechanisms.resize(static_cast<std::size_t>(o.d));
  for (int i = 0; i < o.d; ++i) {
    Mechanism& m = scm.mechanisms[static_cast<std::size_t>(i)];
    m.noise = draw_noise(o.noise, rng, 1.0, o.gumbel_centered);
    const int k = static_cast<int>(scm.graph.parents(i).size());
    if (k > 0) {
      m.mean = GpMean{RandomFeatureFunction::sample(k, o.mech.gp_bandwidth, o.mech.gp_features, rng)};
      m.scale = draw_sigmoid_scale(k, rng, o.mech);
    }
  }
  return scm;
}

/// Each unordered pair gets its own hidden confounder with probability rho.
inline std::optional<LatentConfounding> sample_confounders(int d, double rho, double loading, Rng& rng) {
  require(rho >= 0 && rho <= 1, "confounding probability must lie in [0, 1]");
  LatentConfounding lat;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (uniform(rng, 0.0, 1.0) < rho) lat.confounded_pairs.emplace_back(i, j);
  if (lat.confounded_pairs.empty()) return std::nullopt;
  lat.loadings = Matrix::Zero(static_cast<Eigen::Index>(lat.confounded_pairs.size()), d);
  for (std::size_t l = 0; l < lat.confounded_pairs.size(); ++l) {
    lat.loadings(static_cast<Eigen::Index>(l), lat.confounded_pairs[l].first) = loading;
    lat.loadings(static_cast<Eigen::Index>(l), lat.confounded_pairs[l].second) = loading;
  }
  return lat;
}

/// Structure, confounders and samples come from three sub-streams forked in that order,
/// so rho = 0 reproduces synthesize_multivariate on the same generator exactly.
inline GraphDataset synthesize_confounded_multivariate(const GraphOptions& o, int n, Rng& rng) {
  Rng structure = fork(rng);
  Rng hidden = fork(rng);
  Rng samples = fork(rng);
  GraphDataset out;
  out.scm = sample_hsnm(o, structure);
  out.scm.latent = sample_confounders(o.d, o.confounding_prob, o.latent_loading, hidden);
  out.data = synthesize(out.scm, n, samples);
  return out;
}

inline GraphDataset synthesize_multivariate(GraphOptions o, int n, Rng& rng) {
  o.confounding_prob = 0.0;
  return synthesize_confounded_multivariate(o, n, rng);
}

}  // namespace skewscore
