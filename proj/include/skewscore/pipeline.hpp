#pragma once

#include "skewscore/config.hpp"
#include "skewscore/datagen.hpp"
#include "skewscore/io.hpp"
#include "skewscore/metrics.hpp"
#include "skewscore/ordering.hpp"
#include "skewscore/prune.hpp"
#include "skewscore/rng.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace skewscore {

struct GeneratedDataset {
  DataMatrix data;
  Dag truth;
  std::vector<std::pair<int, int>> confounded_pairs;  // observed-node pairs sharing a hidden cause
  bool swapped = false;
};

/// Draws one dataset for the configured setting from the given seed.
inline GeneratedDataset generate_dataset(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng = make_rng(seed);
  GeneratedDataset out;
  const bool pair = cfg.setting == Setting::Bivariate || cfg.setting == Setting::LatentTriangular;
  if (pair) {
    Rng model_rng = fork(rng);
    Rng swap_rng = fork(rng);
    const NoiseSpec q1 = draw_noise(cfg.noise, model_rng, 1.0, cfg.gumbel_centered);
    PairDataset p;
    if (cfg.setting == Setting::Bivariate) {
      p = synthesize_bivariate(cfg.formulation, q1, cfg.n, model_rng, cfg.mech);
    } else {
      const NoiseSpec q0 = draw_noise(cfg.noise, model_rng, 1.0, cfg.gumbel_centered);
      p = synthesize_latent_triangular(cfg.lambda, cfg.formulation, q0, q1, cfg.n, model_rng, cfg.mech);
      out.confounded_pairs = {{0, 1}};
    }
    out.swapped = cfg.swap_columns && uniform(swap_rng, 0.0, 1.0) < 0.5;
    out.truth = Dag(2);
    if (out.swapped) {
      out.data.resize(cfg.n, 2);
      out.data << p.data.col(1), p.data.col(0);
      out.truth.add_edge(1, 0);
    } else {
      out.data = std::move(p.data);
      out.truth.add_edge(0, 1);
    }
    return out;
  }
  GraphOptions go;
  go.d = cfg.d;
  go.avg_edges = cfg.edges;
  go.noise = cfg.noise;
  go.gumbel_centered = cfg.gumbel_centered;
  go.confounding_prob = cfg.setting == Setting::MultivariateConfounded ? cfg.rho : 0.0;
  go.latent_loading = cfg.latent_loading;
  go.mech = cfg.mech;
  GraphDataset g = synthesize_confounded_multivariate(go, cfg.n, rng);
  out.data = std::move(g.data);
  out.truth = g.scm.graph;
  if (g.scm.latent) out.confounded_pairs = g.scm.latent->confounded_pairs;
  return out;
}

struct DiscoveryResult {
  OrderResult ordering;
  std::optional<PruneResult> pruning;
};

inline DiscoveryResult discover(const Eigen::Ref<const Matrix>& data, const RunConfig& cfg, std::uint64_t seed) {
  OrderingConfig oc = cfg.ordering;
  oc.psi = cfg.odd_function();
  oc.seed = seed;
  DiscoveryResult out;
  if (cfg.estimator == EstimatorKind::Stein)
    out.ordering = topological_order(data, SteinEstimator{cfg.stein}, oc, "stein");
  else
    out.ordering = topological_order(data, SsmEstimator{cfg.ssm, seed}, oc, "ssm");
  if (cfg.prune) {
    PruneConfig pc = cfg.pruning;
    pc.seed = seed;
    out.pruning = prune(data, out.ordering.order, pc);
  }
  return out;
}

// ---- benchmark ----------------------------------------------------------------------------

struct BenchRecord {
  std::uint64_t seed = 0;
  std::string setting;
  std::string formulation;
  std::string noise;
  int d = 0;
  int n = 0;
  double lambda = 0.0;
  double rho = 0.0;
  std::string estimator;
  bool ok = false;
  std::string error;
  int direction_correct = -1;  // pair settings only
  int dtop = -1;
  int shd = -1;
  int true_edges = 0;
  int predicted_edges = -1;
  int violations = 0;
  double wall_seconds = 0.0;
};

struct BenchAggregate {
  std::string setting;
  int d = 0, n = 0;
  double lambda = 0.0;
  int runs = 0, failures = 0;
  std::optional<double> accuracy;
  Summary dtop, shd;
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::vector<BenchAggregate> aggregates;
};

inline std::vector<RunConfig> expand_sweep(const RunConfig& base) {
  std::vector<RunConfig> out;
  const std::vector<int> ds = base.sweep_d.empty() ? std::vector<int>{base.d} : base.sweep_d;
  const std::vector<int> ns = base.sweep_n.empty() ? std::vector<int>{base.n} : base.sweep_n;
  const std::vector<double> ls = base.sweep_lambda.empty() ? std::vector<double>{base.lambda} : base.sweep_lambda;
  for (int d : ds)
    for (int n : ns)
      for (double l : ls) {
        RunConfig c = base;
        c.edges = base.sweep_d.empty() ? base.edges : base.edges * d / base.d;
        c.d = d;
        c.n = n;
        c.lambda = l;
        out.push_back(c);
      }
  return out;
}

inline BenchRecord run_one(const RunConfig& cfg, std::uint64_t seed) {
  BenchRecord r;
  r.seed = seed;
  r.setting = to_string(cfg.setting);
  r.formulation = to_string(cfg.formulation);
  r.noise = to_string(cfg.noise);
  r.d = (cfg.setting == Setting::Bivariate || cfg.setting == Setting::LatentTriangular) ? 2 : cfg.d;
  r.n = cfg.n;
  r.lambda = cfg.lambda;
  r.rho = cfg.rho;
  r.estimator = to_string(cfg.estimator);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const GeneratedDataset ds = generate_dataset(cfg, seed);
    const DiscoveryResult res = discover(ds.data, cfg, seed);
    r.true_edges = ds.truth.edge_count();
    r.dtop = order_divergence(res.ordering.order, ds.truth);
    if (r.d == 2) {
      const int true_cause = ds.swapped ? 1 : 0;
      r.direction_correct = res.ordering.order[0] == true_cause ? 1 : 0;
    }
    if (res.pruning) {
      r.shd = shd(res.pruning->graph, ds.truth);
      r.predicted_edges = res.pruning->graph.edge_count();
    }
    for (const auto& it : res.ordering.diagnostics.iterations) r.violations += it.violation;
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline BenchReport run_benchmark(const RunConfig& base) {
  base.validate();
  BenchReport rep;
  for (const RunConfig& cfg : expand_sweep(base)) {
    BenchAggregate agg;
    agg.setting = to_string(cfg.setting);
    agg.d = (cfg.setting == Setting::Bivariate || cfg.setting == Setting::LatentTriangular) ? 2 : cfg.d;
    agg.n = cfg.n;
    agg.lambda = cfg.lambda;
    std::vector<double> dtops, shds;
    std::vector<DirectionRun> dirs;
    for (std::uint64_t seed : cfg.seeds) {
      BenchRecord r = run_one(cfg, seed);
      ++agg.runs;
      if (!r.ok) {
        ++agg.failures;
      } else {
        dtops.push_back(r.dtop);
        if (r.shd >= 0) shds.push_back(r.shd);
        if (r.direction_correct >= 0) dirs.push_back({r.direction_correct == 1 ? 0 : 1, 0});
      }
      rep.records.push_back(std::move(r));
    }
    agg.dtop = summarize(dtops);
    agg.shd = summarize(shds);
    if (!dirs.empty()) agg.accuracy = direction_accuracy(dirs);
    rep.aggregates.push_back(agg);
  }
  return rep;
}

/// Per-run table without timings, so repeated runs compare byte-for-byte.
inline std::string runs_csv(const BenchReport& rep) {
  std::ostringstream os;
  os << "setting,formulation,noise,d,n,lambda,rho,estimator,seed,status,direction_correct,dtop,shd,true_edges,"
        "predicted_edges,violations\n";
  for (const auto& r : rep.records) {
    os << r.setting << ',' << r.formulation << ',' << r.noise << ',' << r.d << ',' << r.n << ','
       << format_double(r.lambda) << ',' << format_double(r.rho) << ',' << r.estimator << ',' << r.seed << ','
       << (r.ok ? "ok" : "failed") << ',';
    auto opt = [&](int v) { return v >= 0 ? std::to_string(v) : std::string(); };
    os << opt(r.direction_correct) << ',' << opt(r.dtop) << ',' << opt(r.shd) << ',' << r.true_edges << ','
       << opt(r.predicted_edges) << ',' << r.violations << '\n';
  }
  return os.str();
}

inline std::string summary_csv(const BenchReport& rep) {
  std::ostringstream os;
  os << "setting,d,n,lambda,runs,failures,accuracy,dtop_mean,dtop_sd,shd_mean,shd_sd\n";
  for (const auto& a : rep.aggregates) {
    os << a.setting << ',' << a.d << ',' << a.n << ',' << format_double(a.lambda) << ',' << a.runs << ','
       << a.failures << ',' << (a.accuracy ? format_double(*a.accuracy) : std::string()) << ','
       << format_double(a.dtop.mean) << ',' << format_double(a.dtop.sd) << ',';
    if (a.shd.count > 0)
      os << format_double(a.shd.mean) << ',' << format_double(a.shd.sd);
    else
      os << ',';
    os << '\n';
  }
  return os.str();
}

inline std::string timing_csv(const BenchReport& rep) {
  std::ostringstream os;
  os << "setting,d,n,lambda,estimator,seed,wall_seconds\n";
  for (const auto& r : rep.records)
    os << r.setting << ',' << r.d << ',' << r.n << ',' << format_double(r.lambda) << ',' << r.estimator << ','
       << r.seed << ',' << format_double(r.wall_seconds) << '\n';
  return os.str();
}

inline nlohmann::json to_json(const BenchReport& rep) {
  nlohmann::json runs = nlohmann::json::array(), aggs = nlohmann::json::array();
  for (const auto& r : rep.records) {
    nlohmann::json j{{"seed", r.seed},       {"setting", r.setting}, {"formulation", r.formulation},
                     {"noise", r.noise},     {"d", r.d},             {"n", r.n},
                     {"lambda", r.lambda},   {"rho", r.rho},         {"estimator", r.estimator},
                     {"ok", r.ok},           {"dtop", r.dtop},       {"shd", r.shd},
                     {"true_edges", r.true_edges}, {"predicted_edges", r.predicted_edges},
                     {"violations", r.violations}};
    if (r.direction_correct >= 0) j["direction_correct"] = r.direction_correct == 1;
    if (!r.ok) j["error"] = r.error;
    runs.push_back(j);
  }
  for (const auto& a : rep.aggregates) {
    nlohmann::json j{{"setting", a.setting}, {"d", a.d}, {"n", a.n}, {"lambda", a.lambda}, {"runs", a.runs},
                     {"failures", a.failures}, {"dtop_mean", a.dtop.mean}, {"dtop_sd", a.dtop.sd}};
    if (a.accuracy) j["accuracy"] = *a.accuracy;
    if (a.shd.count > 0) {
      j["shd_mean"] = a.shd.mean;
      j["shd_sd"] = a.shd.sd;
    }
    aggs.push_back(j);
  }
  return {{"runs", runs}, {"aggregates", aggs}};
}

}  // namespace skewscore
