// Acceptance gate: one self-contained check per criterion, each printing a
// single PASS/FAIL line with its key numbers and wall time. Run with no
// arguments for the full gate or with a criterion number for a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "faripa/far.hpp"
#include "faripa/harness.hpp"
#include "faripa/ica.hpp"
#include "faripa/isa.hpp"
#include "faripa/metrics.hpp"
#include "faripa/rng.hpp"
#include "faripa/synth.hpp"
#include "faripa/types.hpp"

using namespace faripa;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng, double lo, double hi) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

std::vector<int> random_dims(int max_total, Rng& rng) {
  std::vector<int> dims;
  int total = 0;
  while (static_cast<int>(dims.size()) < 2 || rng.uniform() < 0.5) {
    const int d = 1 + static_cast<int>(rng.uniform_int(3));
    if (total + d > max_total) break;
    dims.push_back(d);
    total += d;
  }
  while (static_cast<int>(dims.size()) < 2) {
    dims.push_back(1);
    total += 1;
  }
  return dims;
}

// ---------------------------------------------------------------------------
// 1. Block index axioms: exact endpoints plus scale/block-swap invariance.

bool criterion_1(std::string& detail) {
  const auto blocks22 = metrics::BlockStructure::square({2, 2});
  const double r_id =
      metrics::amari_index(Eigen::MatrixXd::Identity(4, 4), blocks22);
  const double r_ones =
      metrics::amari_index(Eigen::MatrixXd::Ones(4, 4), blocks22);
  if (!(std::abs(r_id) <= 1e-12 && std::abs(r_ones - 1.0) <= 1e-12)) {
    detail = "endpoint values off: r(I)=" + std::to_string(r_id) +
             " r(ones)=" + std::to_string(r_ones);
    return false;
  }

  Rng rng(20260824);
  double worst_scale = 0.0, worst_swap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> dims = random_dims(12, rng);
    std::sort(dims.begin(), dims.end());  // match the block layout
    const int D = std::accumulate(dims.begin(), dims.end(), 0);
    Eigen::MatrixXd G = random_matrix(D, D, rng, -2.0, 2.0);
    G.array() += 1e-6;  // keep all block sums positive
    const auto blocks = metrics::BlockStructure::square(dims);
    const double base = metrics::amari_index(G, blocks);
    if (!(base >= 0.0 && base <= 1.0)) {
      detail = "index escaped [0,1]: " + std::to_string(base);
      return false;
    }

    const double c = rng.uniform() < 0.5 ? rng.uniform(0.1, 10.0)
                                         : -rng.uniform(0.1, 10.0);
    worst_scale =
        std::max(worst_scale, std::abs(metrics::amari_index(c * G, blocks) - base));

    // swap the first pair of equal-size block rows, if any
    std::vector<int> offsets(dims.size() + 1, 0);
    for (size_t m = 0; m < dims.size(); ++m)
      offsets[m + 1] = offsets[m] + dims[m];
    for (size_t a = 0; a < dims.size(); ++a) {
      bool swapped = false;
      for (size_t b = a + 1; b < dims.size(); ++b) {
        if (dims[a] != dims[b]) continue;
        Eigen::MatrixXd H = G;
        H.middleRows(offsets[a], dims[a]) = G.middleRows(offsets[b], dims[b]);
        H.middleRows(offsets[b], dims[b]) = G.middleRows(offsets[a], dims[a]);
        worst_swap = std::max(
            std::abs(metrics::amari_index(H, blocks) - base), worst_swap);
        swapped = true;
        break;
      }
      if (swapped) break;
    }
  }
  std::ostringstream os;
  os << "endpoints exact, worst scale drift " << worst_scale
     << ", worst block-swap drift " << worst_swap << " over 1000 G";
  detail = os.str();
  return worst_scale <= 1e-10 && worst_swap <= 1e-10;
}

// ---------------------------------------------------------------------------
// 2. Regression identities on fuzzed instances.

bool criterion_2(std::string& detail) {
  Rng rng(424243);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 1 + static_cast<int>(rng.uniform_int(3));
    const int n = 2 + static_cast<int>(rng.uniform_int(14));
    const int d = 1 + static_cast<int>(rng.uniform_int(3));
    const Eigen::MatrixXd U = random_matrix(n, q, rng, -2.0, 2.0);
    const Eigen::MatrixXd V = random_matrix(n, d, rng, -3.0, 3.0);
    const Eigen::VectorXd query = random_matrix(q, 1, rng, -2.0, 2.0);
    const far::KernelSpec fixed = far::KernelSpec::fixed(rng.uniform(0.3, 2.0));
    const far::KernelSpec rec =
        far::KernelSpec::recursive(rng.uniform(0.05, 0.9) / q, q);

    // convex envelope
    for (const Eigen::VectorXd& out :
         {far::nw_regress(U, V, query, fixed),
          far::recursive_nw_regress(U, V, query, rec)}) {
      for (int j = 0; j < d; ++j) {
        worst = std::max(worst, V.col(j).minCoeff() - out(j));
        worst = std::max(worst, out(j) - V.col(j).maxCoeff());
      }
    }

    // single sample
    const Eigen::MatrixXd U1 = U.topRows(1), V1 = V.topRows(1);
    worst = std::max(worst, (far::nw_regress(U1, V1, query, fixed) -
                             V1.row(0).transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (far::recursive_nw_regress(U1, V1, query, rec) -
                             V1.row(0).transpose()).cwiseAbs().maxCoeff());

    // constant response
    const double c = rng.uniform(-5.0, 5.0);
    const Eigen::MatrixXd Vc = Eigen::MatrixXd::Constant(n, d, c);
    worst = std::max(worst, (far::nw_regress(U, Vc, query, fixed).array() - c)
                                .abs()
                                .maxCoeff());
    worst = std::max(worst,
                     (far::recursive_nw_regress(U, Vc, query, rec).array() - c)
                         .abs()
                         .maxCoeff());

    // symmetric two-point: equal kernel weights average the responses;
    // the recursive weights need equal time indices for the symmetry
    Eigen::MatrixXd U2(2, q), V2(2, d);
    const Eigen::VectorXd offset = random_matrix(q, 1, rng, -1.0, 1.0);
    U2.row(0) = (query + offset).transpose();
    U2.row(1) = (query - offset).transpose();
    V2 = random_matrix(2, d, rng, -3.0, 3.0);
    const Eigen::VectorXd mean2 = 0.5 * (V2.row(0) + V2.row(1)).transpose();
    worst = std::max(worst, (far::nw_regress(U2, V2, query, fixed) - mean2)
                                .cwiseAbs()
                                .maxCoeff());
    worst = std::max(worst,
                     (far::recursive_nw_regress(U2, V2, {4, 4}, query, rec) -
                      mean2).cwiseAbs().maxCoeff());
  }
  std::ostringstream os;
  os << "worst identity violation " << worst << " over 100 instances";
  detail = os.str();
  return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// 3. Brute-force oracle equivalence for the numeric kernels.

bool criterion_3(std::string& detail) {
  Rng rng(987654);
  double worst = 0.0;

  // block_sums and amari_index against explicit index loops
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> dims = random_dims(10, rng);
    const int M = static_cast<int>(dims.size());
    const int D = std::accumulate(dims.begin(), dims.end(), 0);
    Eigen::MatrixXd G = random_matrix(D, D, rng, -2.0, 2.0);
    G.array() += 1e-6;
    const auto blocks = metrics::BlockStructure::square(dims);

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(M, M);
    std::vector<int> off(static_cast<size_t>(M) + 1, 0);
    std::vector<int> sorted_dims = dims;
    std::sort(sorted_dims.begin(), sorted_dims.end());
    for (int m = 0; m < M; ++m)
      off[static_cast<size_t>(m) + 1] =
          off[static_cast<size_t>(m)] + sorted_dims[static_cast<size_t>(m)];
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j)
        for (int r = off[static_cast<size_t>(i)]; r < off[static_cast<size_t>(i) + 1]; ++r)
          for (int c = off[static_cast<size_t>(j)]; c < off[static_cast<size_t>(j) + 1]; ++c)
            g(i, j) += std::abs(G(r, c));
    worst = std::max(worst,
                     (metrics::block_sums(G, blocks) - g).cwiseAbs().maxCoeff());

    double acc = 0.0;
    for (int i = 0; i < M; ++i)
      acc += g.row(i).sum() / g.row(i).maxCoeff() - 1.0;
    for (int j = 0; j < M; ++j)
      acc += g.col(j).sum() / g.col(j).maxCoeff() - 1.0;
    const double r_oracle = acc / (2.0 * M * (M - 1));
    worst = std::max(worst,
                     std::abs(metrics::amari_index(G, blocks) - r_oracle));
  }

  // boxplot_stats against a direct quantile/fence evaluation
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(30));
    std::vector<double> values;
    for (int i = 0; i < n; ++i) values.push_back(rng.uniform(-50.0, 50.0));
    const harness::BoxStats s = harness::boxplot_stats(values);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    auto quant = [&](double p) {
      const double pos = p * static_cast<double>(n - 1);
      const auto lo = static_cast<size_t>(std::floor(pos));
      const auto hi = static_cast<size_t>(std::ceil(pos));
      return sorted[lo] + (pos - std::floor(pos)) * (sorted[hi] - sorted[lo]);
    };
    const double q1 = quant(0.25), q2 = quant(0.5), q3 = quant(0.75);
    const double lo_fence = q1 - 1.5 * (q3 - q1);
    const double hi_fence = q3 + 1.5 * (q3 - q1);
    double wlo = std::numeric_limits<double>::infinity();
    double whi = -std::numeric_limits<double>::infinity();
    std::vector<double> outliers;
    for (double v : sorted) {
      if (v < lo_fence || v > hi_fence) {
        outliers.push_back(v);
      } else {
        wlo = std::min(wlo, v);
        whi = std::max(whi, v);
      }
    }
    worst = std::max({worst, std::abs(s.q1 - q1), std::abs(s.q2 - q2),
                      std::abs(s.q3 - q3), std::abs(s.whisker_low - wlo),
                      std::abs(s.whisker_high - whi)});
    if (s.outliers.size() != outliers.size()) {
      detail = "outlier count mismatch";
      return false;
    }
    for (size_t i = 0; i < outliers.size(); ++i)
      worst = std::max(worst, std::abs(s.outliers[i] - outliers[i]));
  }

  // fit_linear_ar against normal equations assembled from scratch
  for (int trial = 0; trial < 50; ++trial) {
    const int D = 1 + static_cast<int>(rng.uniform_int(2));
    const int p = 1 + static_cast<int>(rng.uniform_int(2));
    const int T = p * D + 10 + static_cast<int>(rng.uniform_int(20));
    Eigen::MatrixXd x(T, D);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < D; ++j) x(t, j) = rng.gaussian();
    const far::LinearArFit fit = far::fit_linear_ar(TimeSeries(x), p);

    const int N = T - p;
    const int cols = 1 + p * D;
    Eigen::MatrixXd Z(N, cols), Y(N, D);
    for (int j = 0; j < N; ++j) {
      Z(j, 0) = 1.0;
      for (int lag = 1; lag <= p; ++lag)
        for (int k = 0; k < D; ++k)
          Z(j, 1 + (lag - 1) * D + k) = x(p + j - lag, k);
      Y.row(j) = x.row(p + j);
    }
    const Eigen::MatrixXd B =
        (Z.transpose() * Z).ldlt().solve(Z.transpose() * Y);
    worst = std::max(worst,
                     (fit.intercept - B.row(0).transpose()).cwiseAbs().maxCoeff());
    for (int lag = 0; lag < p; ++lag)
      worst = std::max(worst, (fit.coeffs[static_cast<size_t>(lag)] -
                               B.middleRows(1 + lag * D, D).transpose())
                                  .cwiseAbs()
                                  .maxCoeff());
    worst = std::max(worst,
                     (fit.residuals.values - (Y - Z * B)).cwiseAbs().maxCoeff());
  }

  std::ostringstream os;
  os << "worst oracle deviation " << worst << " over 200 instances";
  detail = os.str();
  return worst <= 1e-8;
}

// ---------------------------------------------------------------------------
// 4. One-dimensional source recovery through whitening plus FastICA.

bool criterion_4(std::string& detail) {
  const int D = 4;
  const long T = 10000;
  int good = 0;
  double worst_good = 0.0;
  for (int run = 0; run < 10; ++run) {
    Rng rng(6000 + static_cast<std::uint64_t>(run));
    Eigen::MatrixXd S(T, D);
    const double half = std::sqrt(3.0);
    for (long t = 0; t < T; ++t)
      for (int j = 0; j < D; ++j) S(t, j) = rng.uniform(-half, half);
    const far::MixingSpec mixing = harness::random_orthogonal(D, rng);
    const TimeSeries x = far::mix(mixing, TimeSeries(S));

    const auto [Z, wt] = ica::center_whiten(x);
    Rng ica_rng(Rng::derive(6000 + static_cast<std::uint64_t>(run), 4));
    ica::IcaResult res;
    for (int attempt = 0; attempt < 3; ++attempt) {
      res = ica::fastica(Z, ica::Nonlinearity::Tanh, 1e-6, 1000, ica_rng);
      if (res.converged) break;
    }
    if (!res.converged) continue;
    const double r = metrics::amari_index(
        res.W * wt.V * mixing.A,
        metrics::BlockStructure::square({1, 1, 1, 1}));
    if (r < 0.05) {
      ++good;
      worst_good = std::max(worst_good, r);
    }
  }
  std::ostringstream os;
  os << good << "/10 runs below 0.05 (worst passing " << worst_good << ")";
  detail = os.str();
  return good >= 9;
}

// ---------------------------------------------------------------------------
// 5-8. Full-pipeline experiments.

harness::ExperimentConfig smiley_config(long T, double beta_c) {
  harness::ExperimentConfig cfg;
  cfg.name = "acceptance-smiley";
  cfg.dataset = "smiley-like";
  cfg.dims = {2, 2};
  cfg.T = T;
  cfg.p = 1;
  cfg.beta_c = beta_c;
  cfg.runs = 10;
  cfg.seed = 1;
  cfg.n_max = 5000;
  return cfg;
}

bool criterion_5(std::string& detail) {
  const harness::RunReport big = harness::run_experiment(smiley_config(20000, 0.25));
  const harness::RunReport small_ =
      harness::run_experiment(smiley_config(2000, 0.25));
  const double med_big = big.median_amari();
  const double med_small = small_.median_amari();
  std::ostringstream os;
  os << "median r " << med_big << " at T=20000 (need < 0.15), " << med_small
     << " at T=2000 (need larger); completed " << big.completed << "+"
     << small_.completed << "/10+10";
  detail = os.str();
  return big.completed == 10 && small_.completed == 10 && med_big < 0.15 &&
         med_big < med_small;
}

bool criterion_6(std::string& detail) {
  std::vector<double> medians;
  for (double beta_c : {0.25, 0.125, 0.0625}) {
    const harness::RunReport rep =
        harness::run_experiment(smiley_config(20000, beta_c));
    if (rep.completed < 10) {
      detail = "incomplete runs at beta_c=" + std::to_string(beta_c);
      return false;
    }
    medians.push_back(rep.median_amari());
  }
  const double lo = *std::min_element(medians.begin(), medians.end());
  const double hi = *std::max_element(medians.begin(), medians.end());
  std::ostringstream os;
  os << "medians " << medians[0] << " / " << medians[1] << " / " << medians[2]
     << ", spread factor " << hi / lo << " (need < 2)";
  detail = os.str();
  return hi < 2.0 * lo;
}

bool criterion_7(std::string& detail) {
  harness::ExperimentConfig cfg;
  cfg.name = "acceptance-unknown-dims";
  cfg.dataset = "d-geom";
  cfg.dims = {2, 3};
  cfg.T = 20000;
  cfg.runs = 10;
  cfg.seed = 31;
  cfg.n_max = 5000;
  cfg.cluster = "ncut";  // group count inferred from the spectrum

  const harness::RunReport rep = harness::run_experiment(cfg);
  int dims_ok = 0;
  for (const auto& rec : rep.runs)
    if (rec.ok && rec.dims_correct) ++dims_ok;
  const double med = rep.median_amari();
  std::ostringstream os;
  os << "dims (2,3) recovered in " << dims_ok << "/10 (need >= 8), median r "
     << med << " (need < 0.2)";
  detail = os.str();
  return dims_ok >= 8 && med < 0.2;
}

bool criterion_8(std::string& detail) {
  harness::ExperimentConfig far_cfg;
  far_cfg.name = "acceptance-ikeda-far";
  far_cfg.dataset = "ikeda";
  far_cfg.T = 20000;
  far_cfg.runs = 10;
  far_cfg.seed = 1;
  // deterministic trajectories: keep every training pair and the own-sample
  // weight so sparse regions of the attractor are not extrapolated
  far_cfg.beta_c = 0.5;
  far_cfg.loo = false;
  far_cfg.n_max = 20000;

  harness::ExperimentConfig ar_cfg = far_cfg;
  ar_cfg.name = "acceptance-ikeda-ar";
  ar_cfg.estimator = "ar-ipa";

  const harness::RunReport far_rep = harness::run_experiment(far_cfg);
  const harness::RunReport ar_rep = harness::run_experiment(ar_cfg);
  const double far_med = far_rep.median_amari();
  const double ar_med = ar_rep.median_amari();
  std::ostringstream os;
  os << "median r " << far_med << " (nonlinear, need < 0.3) vs " << ar_med
     << " (linear baseline, need larger); completed " << far_rep.completed
     << "+" << ar_rep.completed << "/10+10";
  detail = os.str();
  return far_rep.completed == 10 && ar_rep.completed == 10 &&
         far_med < ar_med && far_med < 0.3;
}

// ---------------------------------------------------------------------------
// 9. Bit-identical reports under a fixed seed.

bool criterion_9(std::string& detail) {
  harness::ExperimentConfig smiley;
  smiley.dataset = "smiley-like";
  smiley.dims = {2, 2};
  smiley.T = 1200;
  smiley.runs = 2;
  smiley.seed = 7;
  smiley.n_max = 500;
  smiley.kcca.subsample = 200;

  harness::ExperimentConfig ikeda;
  ikeda.dataset = "ikeda";
  ikeda.T = 800;
  ikeda.runs = 2;
  ikeda.seed = 9;
  ikeda.n_max = 400;
  ikeda.loo = false;
  ikeda.kcca.subsample = 200;
  ikeda.cluster = "ncut";
  ikeda.ncut_groups = 2;

  for (const auto& cfg : {smiley, ikeda}) {
    const std::string a = harness::run_experiment(cfg).to_json_text(false);
    const std::string b = harness::run_experiment(cfg).to_json_text(false);
    if (a != b) {
      detail = "rerun of '" + cfg.dataset + "' config changed the report";
      return false;
    }
  }
  detail = "two configs rerun byte-identically";
  return true;
}

struct Criterion {
  int id;
  const char* label;
  bool (*fn)(std::string&);
  double budget_seconds;  // 0 = no budget
};

const Criterion kCriteria[] = {
    {1, "block index axioms", criterion_1, 5.0},
    {2, "regression identities", criterion_2, 5.0},
    {3, "oracle equivalence", criterion_3, 30.0},
    {4, "one-dimensional recovery", criterion_4, 120.0},
    {5, "nonlinear pipeline end-to-end", criterion_5, 900.0},
    {6, "bandwidth robustness", criterion_6, 2700.0},
    {7, "unknown dimensions", criterion_7, 1200.0},
    {8, "nonlinear vs linear baseline", criterion_8, 1200.0},
    {9, "determinism", criterion_9, 0.0},
};

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = c.fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    ok = false;
  }
  const double elapsed = seconds_since(start);
  if (ok && c.budget_seconds > 0.0 && elapsed > c.budget_seconds) {
    ok = false;
    detail += " [exceeded time budget]";
  }
  std::printf("ACCEPTANCE %d %s — %s — %s (%.1f s)\n", c.id,
              ok ? "PASS" : "FAIL", c.label, detail.c_str(), elapsed);
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    const int want = std::atoi(argv[1]);
    for (const Criterion& c : kCriteria)
      if (c.id == want) return run_one(c) ? 0 : 1;
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  int failures = 0;
  for (const Criterion& c : kCriteria)
    if (!run_one(c)) ++failures;
  return failures == 0 ? 0 : 1;
}
