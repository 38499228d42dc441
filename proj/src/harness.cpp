#include "faripa/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "faripa/ica.hpp"
#include "faripa/linalg.hpp"
#include "faripa/metrics.hpp"
#include "faripa/synth.hpp"

namespace faripa::harness {

namespace {

// Sub-stream tags hashed against the per-run seed so each stage draws from
// an unrelated generator.
constexpr std::uint64_t kStreamDrivers = 1;
constexpr std::uint64_t kStreamDynamics = 2;
constexpr std::uint64_t kStreamMixing = 3;
constexpr std::uint64_t kStreamIca = 4;
constexpr std::uint64_t kStreamCluster = 5;

double seconds_since(std::chrono::steady_clock::time_point& mark) {
  const auto now = std::chrono::steady_clock::now();
  const double s = std::chrono::duration<double>(now - mark).count();
  mark = now;
  return s;
}

}  // namespace

BoxStats boxplot_stats(std::vector<double> values) {
  if (values.empty()) throw ConfigError("boxplot_stats: empty input");
  for (double v : values)
    if (!std::isfinite(v)) throw NumericError("boxplot_stats: non-finite value");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  BoxStats bs;
  bs.q1 = quantile(0.25);
  bs.q2 = quantile(0.5);
  bs.q3 = quantile(0.75);
  const double iqr = bs.q3 - bs.q1;
  const double lo_fence = bs.q1 - 1.5 * iqr;
  const double hi_fence = bs.q3 + 1.5 * iqr;
  bs.whisker_low = bs.q2;
  bs.whisker_high = bs.q2;
  bool any_inside = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      bs.outliers.push_back(v);
    } else if (!any_inside) {
      bs.whisker_low = bs.whisker_high = v;
      any_inside = true;
    } else {
      bs.whisker_low = std::min(bs.whisker_low, v);
      bs.whisker_high = std::max(bs.whisker_high, v);
    }
  }
  return bs;
}

std::vector<int> ExperimentConfig::component_dims() const {
  std::vector<int> d = dims;
  if (d.empty() && dataset == "ikeda") d = {2, 2};
  std::sort(d.begin(), d.end());
  return d;
}

int ExperimentConfig::total_dim() const {
  const auto d = component_dims();
  return std::accumulate(d.begin(), d.end(), 0);
}

void ExperimentConfig::validate() const {
  if (dataset != "smiley-like" && dataset != "d-geom" && dataset != "ikeda")
    throw ConfigError("config: unknown dataset '" + dataset + "'");
  const auto d = component_dims();
  if (d.empty()) throw ConfigError("config: dims required");
  for (int v : d)
    if (v < 1) throw ConfigError("config: dims must be >= 1");
  if (dataset == "smiley-like")
    for (int v : d)
      if (v != 2) throw ConfigError("config: smiley-like components are 2-D");
  if (dataset == "ikeda" && d != std::vector<int>{2, 2})
    throw ConfigError("config: ikeda fixes dims to (2,2)");
  if (T < 2) throw ConfigError("config: T >= 2 required");
  if (T > 10'000'000) throw ConfigError("config: T too large");
  if (p < 1) throw ConfigError("config: p >= 1 required");
  if (!(beta_c > 0.0 && beta_c < 1.0))
    throw ConfigError("config: beta_c must lie in (0,1)");
  if (estimator != "far-ipa" && estimator != "ar-ipa")
    throw ConfigError("config: unknown estimator '" + estimator + "'");
  if (runs < 1) throw ConfigError("config: runs >= 1 required");
  if (burn_in < 0) throw ConfigError("config: burn_in >= 0 required");
  if (n_max < 2) throw ConfigError("config: n_max >= 2 required");
  if (kcca.subsample < 8) throw ConfigError("config: kcca.subsample >= 8 required");
  if (!(kcca.kappa > 0.0)) throw ConfigError("config: kcca.kappa > 0 required");
  if (ica.g != "tanh" && ica.g != "cube")
    throw ConfigError("config: ica.g must be tanh or cube");
  if (!(ica.tol > 0.0)) throw ConfigError("config: ica.tol > 0 required");
  if (ica.max_iter < 1) throw ConfigError("config: ica.max_iter >= 1 required");
  if (ica.retries < 1) throw ConfigError("config: ica.retries >= 1 required");
  if (cluster != "auto" && cluster != "greedy" && cluster != "ncut")
    throw ConfigError("config: cluster must be auto, greedy or ncut");
  if (ncut_groups && (*ncut_groups < 1 || *ncut_groups > total_dim()))
    throw ConfigError("config: ncut_groups out of range");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["dataset"] = dataset;
  j["dims"] = component_dims();
  j["T"] = T;
  j["p"] = p;
  j["beta_c"] = beta_c;
  j["estimator"] = estimator;
  j["runs"] = runs;
  j["seed"] = seed;
  j["burn_in"] = burn_in;
  j["n_max"] = n_max;
  j["loo"] = loo;
  j["kcca"] = {{"subsample", kcca.subsample}, {"kappa", kcca.kappa}};
  j["ica"] = {{"g", ica.g},
              {"tol", ica.tol},
              {"max_iter", ica.max_iter},
              {"retries", ica.retries}};
  j["cluster"] = cluster;
  if (ncut_groups)
    j["ncut_groups"] = *ncut_groups;
  else
    j["ncut_groups"] = nullptr;
  j["debug_identity"] = debug_identity;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::ordered_json& j) {
  static const std::vector<std::string> known = {
      "name",    "dataset", "dims",    "T",           "p",
      "beta_c",  "estimator", "runs",  "seed",        "burn_in",
      "n_max",   "loo",     "kcca",    "ica",         "cluster",
      "ncut_groups", "debug_identity"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("config: unknown key '" + key + "'");

  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    c.dataset = j.at("dataset").get<std::string>();
    c.dims = j.value("dims", c.dims);
    c.T = j.at("T").get<long>();
    c.p = j.value("p", c.p);
    c.beta_c = j.value("beta_c", c.beta_c);
    c.estimator = j.value("estimator", c.estimator);
    c.runs = j.value("runs", c.runs);
    c.seed = j.value("seed", c.seed);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.n_max = j.value("n_max", c.n_max);
    c.loo = j.value("loo", c.loo);
    if (j.contains("kcca")) {
      const auto& k = j.at("kcca");
      c.kcca.subsample = k.value("subsample", c.kcca.subsample);
      c.kcca.kappa = k.value("kappa", c.kcca.kappa);
    }
    if (j.contains("ica")) {
      const auto& k = j.at("ica");
      c.ica.g = k.value("g", c.ica.g);
      c.ica.tol = k.value("tol", c.ica.tol);
      c.ica.max_iter = k.value("max_iter", c.ica.max_iter);
      c.ica.retries = k.value("retries", c.ica.retries);
    }
    c.cluster = j.value("cluster", c.cluster);
    if (j.contains("ncut_groups") && !j.at("ncut_groups").is_null())
      c.ncut_groups = j.at("ncut_groups").get<int>();
    c.debug_identity = j.value("debug_identity", c.debug_identity);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path);
  out << to_json().dump(2) << '\n';
}

far::MixingSpec random_orthogonal(int D, Rng& rng) {
  far::MixingSpec spec;
  spec.A = random_orthogonal_matrix(D, rng);
  return spec;
}

namespace {

bool variant_fits(synth::GeomVariant v, int d) {
  switch (v) {
    case synth::GeomVariant::SphereSurface:
      return d >= 2;
    case synth::GeomVariant::CubeDiagonals:
      return d >= 2;
    case synth::GeomVariant::BrokenLine:
      return d >= 1;
    case synth::GeomVariant::SquareSkeleton:
      return d == 2;
  }
  return false;
}

synth::GeomVariant pick_variant(int component, int d) {
  static const synth::GeomVariant cycle[] = {
      synth::GeomVariant::SphereSurface, synth::GeomVariant::CubeDiagonals,
      synth::GeomVariant::BrokenLine, synth::GeomVariant::SquareSkeleton};
  for (int k = 0; k < 4; ++k) {
    const synth::GeomVariant v = cycle[(component + k) % 4];
    if (variant_fits(v, d)) return v;
  }
  return synth::GeomVariant::BrokenLine;
}

/// One centered driver sample block per component, laid out side by side.
Eigen::MatrixXd build_drivers(const ExperimentConfig& cfg,
                              const std::vector<int>& dims, long count,
                              Rng& rng) {
  const int D = std::accumulate(dims.begin(), dims.end(), 0);
  Eigen::MatrixXd E(count, D);
  int col = 0;
  for (size_t m = 0; m < dims.size(); ++m) {
    const int d = dims[m];
    TimeSeries block;
    if (cfg.dataset == "smiley-like") {
      const synth::DensityGrid face = synth::face_density(static_cast<int>(m) % 6);
      block = synth::sample_from_density(face, static_cast<int>(count), rng);
    } else {
      synth::GeomForm form;
      form.variant = pick_variant(static_cast<int>(m), d);
      form.dim = d;
      block = synth::sample_geometric(form, static_cast<int>(count), rng);
      block.values.rowwise() -= block.values.colwise().mean();
    }
    E.middleCols(col, d) = block.values;
    col += d;
  }
  return E;
}

}  // namespace

TimeSeries build_sources(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  cfg.validate();
  const auto dims = cfg.component_dims();
  if (cfg.dataset == "ikeda") {
    const std::vector<synth::IkedaParams> params = {
        {0.9994, Eigen::Vector2d(20.0, 20.0)},
        {0.998, Eigen::Vector2d(-100.0, 30.0)}};
    return synth::generate_ikeda_sources(params, static_cast<int>(cfg.T));
  }
  Rng driver_rng(Rng::derive(run_seed, kStreamDrivers));
  const long count = cfg.p + cfg.burn_in + cfg.T;
  Eigen::MatrixXd E = build_drivers(cfg, dims, count, driver_rng);
  Rng dyn_rng(Rng::derive(run_seed, kStreamDynamics));
  const far::FarDynamics dyn =
      far::make_random_sine_dynamics(static_cast<int>(E.cols()), cfg.p, dyn_rng);
  far::MatrixNoise noise(std::move(E));
  return far::simulate_far(dyn, noise, static_cast<int>(cfg.T), cfg.burn_in);
}

namespace {

RunRecord execute_run(const ExperimentConfig& cfg, int run,
                      const std::vector<int>& true_dims) {
  RunRecord rec;
  rec.run = run;
  rec.seed = cfg.seed + static_cast<std::uint64_t>(run);
  const int D = std::accumulate(true_dims.begin(), true_dims.end(), 0);

  const auto started = std::chrono::steady_clock::now();
  auto mark = started;
  try {
    const TimeSeries s = build_sources(cfg, rec.seed);
    rec.timings.generate = seconds_since(mark);

    far::MixingSpec mixing;
    if (cfg.debug_identity) {
      mixing.A = Eigen::MatrixXd::Identity(D, D);
    } else {
      Rng mix_rng(Rng::derive(rec.seed, kStreamMixing));
      mixing = random_orthogonal(D, mix_rng);
    }
    const TimeSeries x = far::mix(mixing, s);
    rec.timings.mixing = seconds_since(mark);

    TimeSeries innov;
    if (cfg.debug_identity) {
      innov = x;
    } else if (cfg.estimator == "far-ipa") {
      const int d_reg = cfg.p * D;
      const auto kernel =
          far::KernelSpec::recursive(cfg.beta_c / static_cast<double>(d_reg), d_reg);
      auto est = far::estimate_innovations(x, cfg.p, kernel, cfg.loo, cfg.n_max);
      innov = std::move(est.innovations);
      rec.innovation_fallbacks = est.fallback_count;
      rec.train_size = est.train_size;
    } else {
      innov = far::fit_linear_ar(x, cfg.p).residuals;
    }
    rec.timings.innovations = seconds_since(mark);

    ica::WhiteningTransform wt;
    ica::IcaResult unmix;
    TimeSeries z;
    if (cfg.debug_identity) {
      wt.mean = Eigen::VectorXd::Zero(D);
      wt.V = Eigen::MatrixXd::Identity(D, D);
      wt.V_inv = wt.V;
      unmix.W = wt.V;
      unmix.converged = true;
      rec.ica_converged = true;
      z = innov;
    } else {
      auto [zw, wtw] = ica::center_whiten(innov);
      z = std::move(zw);
      wt = std::move(wtw);
      const ica::Nonlinearity g =
          cfg.ica.g == "cube" ? ica::Nonlinearity::Cube : ica::Nonlinearity::Tanh;
      Rng ica_rng(Rng::derive(rec.seed, kStreamIca));
      for (int attempt = 1; attempt <= cfg.ica.retries; ++attempt) {
        unmix = ica::fastica(z, g, cfg.ica.tol, cfg.ica.max_iter, ica_rng);
        rec.ica_attempts = attempt;
        if (unmix.converged) break;
      }
      rec.ica_converged = unmix.converged;
      rec.ica_iterations = unmix.iterations;
    }
    rec.timings.ica = seconds_since(mark);

    isa::Partition part;
    if (cfg.debug_identity) {
      part = isa::Partition::contiguous(true_dims);
      rec.timings.dependence = seconds_since(mark);
    } else {
      const TimeSeries y(z.values * unmix.W.transpose());
      isa::KccaOptions ko;
      ko.subsample = cfg.kcca.subsample;
      ko.kappa = cfg.kcca.kappa;
      const isa::DependenceMatrix dep = isa::dependence_matrix(y, ko);
      rec.timings.dependence = seconds_since(mark);

      const std::uint64_t cluster_seed = Rng::derive(rec.seed, kStreamCluster);
      if (cfg.cluster == "ncut")
        part = isa::ncut_cluster(dep, cfg.ncut_groups, cluster_seed);
      else
        part = isa::greedy_cluster(dep, true_dims, 3, cluster_seed);
    }
    rec.timings.cluster = seconds_since(mark);

    const isa::SeparationResult sep =
        isa::assemble_separation(wt, unmix, part, mixing, true_dims);
    rec.amari = sep.amari;
    rec.partition = sep.partition;
    rec.estimated_dims = sep.partition.dims();
    rec.block_permutation = sep.block_permutation;
    rec.G = sep.G;
    std::vector<int> sorted_true = true_dims;
    std::sort(sorted_true.begin(), sorted_true.end());
    rec.dims_correct = rec.estimated_dims == sorted_true;
    rec.timings.assemble = seconds_since(mark);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.timings.total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return rec;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunReport rep;
  rep.config = cfg;
  const auto true_dims = cfg.component_dims();
  for (int r = 0; r < cfg.runs; ++r) {
    RunRecord rec = execute_run(cfg, r, true_dims);
    if (rec.ok) {
      ++rep.completed;
      rep.amari_values.push_back(rec.amari);
    } else {
      ++rep.failed;
    }
    rep.runs.push_back(std::move(rec));
  }
  if (!rep.amari_values.empty()) rep.amari_stats = boxplot_stats(rep.amari_values);
  return rep;
}

double RunReport::median_amari() const {
  if (amari_values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return amari_stats.q2;
}

namespace {

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (long i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::ordered_json RunReport::to_json(bool include_timings) const {
  nlohmann::ordered_json j;
  j["config"] = config.to_json();
  nlohmann::ordered_json summary;
  summary["runs"] = static_cast<int>(runs.size());
  summary["completed"] = completed;
  summary["failed"] = failed;
  if (completed > 0) {
    summary["amari"] = {{"q1", amari_stats.q1},
                        {"median", amari_stats.q2},
                        {"q3", amari_stats.q3},
                        {"whisker_low", amari_stats.whisker_low},
                        {"whisker_high", amari_stats.whisker_high},
                        {"outliers", amari_stats.outliers}};
  } else {
    summary["amari"] = nullptr;
  }
  j["summary"] = std::move(summary);

  nlohmann::ordered_json jruns = nlohmann::ordered_json::array();
  for (const RunRecord& r : runs) {
    nlohmann::ordered_json jr;
    jr["run"] = r.run;
    jr["seed"] = r.seed;
    jr["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
      jr["error"] = r.error;
    } else {
      jr["amari"] = r.amari;
      jr["estimated_dims"] = r.estimated_dims;
      nlohmann::ordered_json groups = nlohmann::ordered_json::array();
      for (const auto& g : r.partition.groups) groups.push_back(g);
      jr["partition"] = std::move(groups);
      jr["dims_correct"] = r.dims_correct;
      jr["block_permutation"] = r.block_permutation;
      jr["ica_converged"] = r.ica_converged;
      jr["ica_iterations"] = r.ica_iterations;
      jr["ica_attempts"] = r.ica_attempts;
      jr["innovation_fallbacks"] = r.innovation_fallbacks;
      jr["train_size"] = r.train_size;
      jr["G"] = matrix_json(r.G);
    }
    if (include_timings) {
      jr["timings"] = {{"generate", r.timings.generate},
                       {"mixing", r.timings.mixing},
                       {"innovations", r.timings.innovations},
                       {"ica", r.timings.ica},
                       {"dependence", r.timings.dependence},
                       {"cluster", r.timings.cluster},
                       {"assemble", r.timings.assemble},
                       {"total", r.timings.total}};
    }
    jruns.push_back(std::move(jr));
  }
  j["runs"] = std::move(jruns);
  return j;
}

std::string RunReport::to_json_text(bool include_timings) const {
  return to_json(include_timings).dump(2) + "\n";
}

void RunReport::save_json(const std::string& path, bool include_timings) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("report: cannot write " + path);
  out << to_json_text(include_timings);
}

void RunReport::write_csv_summary(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("report: cannot write " + path);
  out << "run,seed,status,amari,ica_converged,wall_time_seconds\n";
  char buf[64];
  for (const RunRecord& r : runs) {
    out << r.run << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ',';
    if (r.ok) {
      std::snprintf(buf, sizeof buf, "%.17g", r.amari);
      out << buf;
    }
    out << ',' << (r.ica_converged ? 1 : 0) << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.timings.total);
    out << buf << '\n';
  }
}

}  // namespace faripa::harness
