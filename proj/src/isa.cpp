#include "faripa/isa.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "faripa/metrics.hpp"

namespace faripa::isa {

namespace {

std::vector<long> even_indices(long len, int target) {
  const long n = std::min<long>(len, target);
  std::vector<long> idx(static_cast<size_t>(n));
  for (long k = 0; k < n; ++k) idx[static_cast<size_t>(k)] = k * len / n;
  return idx;
}

/// Median pairwise absolute distance of the subsampled values; falls back
/// to the mean distance when ties drive the median to zero.
double median_distance(const Eigen::VectorXd& v) {
  const long n = v.size();
  std::vector<double> d;
  d.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) d.push_back(std::abs(v(i) - v(j)));
  const size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<long>(mid), d.end());
  double med = d[mid];
  if (med <= 0.0)
    med = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  return med;
}

struct PreparedSeries {
  bool degenerate = false;
  Eigen::VectorXd v;  // subsampled values (orientation key, see pair_score)
  Eigen::MatrixXd M;  // (K~ + kappa I)^(-1) K~ of the centered Gram
};

PreparedSeries prepare_series(const Eigen::VectorXd& series,
                              const std::vector<long>& idx,
                              const KccaOptions& opts) {
  const long n = static_cast<long>(idx.size());
  Eigen::VectorXd v(n);
  for (long k = 0; k < n; ++k) v(k) = series(idx[static_cast<size_t>(k)]);

  PreparedSeries out;
  out.v = v;
  const double spread = (v.array() - v.mean()).abs().maxCoeff();
  if (!(spread > 0.0)) {
    out.degenerate = true;
    return out;
  }
  const double width = median_distance(v);
  if (!(width > 0.0)) {
    out.degenerate = true;
    return out;
  }

  Eigen::MatrixXd K(n, n);
  const double inv = 1.0 / (2.0 * width * width);
  for (long i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (long j = i + 1; j < n; ++j) {
      const double diff = v(i) - v(j);
      K(i, j) = K(j, i) = std::exp(-diff * diff * inv);
    }
  }
  // double centering, K symmetric so row and column means coincide
  const Eigen::VectorXd rm = K.rowwise().mean();
  const double tm = rm.mean();
  K.colwise() -= rm;
  K.rowwise() -= rm.transpose();
  K.array() += tm;

  Eigen::MatrixXd reg = K;
  reg.diagonal().array() += opts.kappa;
  out.M = reg.ldlt().solve(K);
  return out;
}

/// Largest singular value by alternating power iteration.
double top_singular_value(const Eigen::MatrixXd& C) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(C.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd u = C * v;
    const double nu = u.norm();
    if (nu <= 0.0) return 0.0;
    u /= nu;
    v = C.transpose() * u;
    const double ns = v.norm();
    if (ns <= 0.0) return 0.0;
    v /= ns;
    if (std::abs(ns - sigma) < 1e-10 * std::max(1.0, ns)) return ns;
    sigma = ns;
  }
  return sigma;
}

/**
 * The alternating iteration in top_singular_value is not bitwise symmetric
 * in its two inputs, so the pair is oriented by an intrinsic key (the
 * lexicographic order of the subsampled values) before multiplying. This
 * keeps dependence scores independent of coordinate positions, making
 * dependence_matrix exactly permutation-equivariant.
 */
double pair_score(const PreparedSeries& a, const PreparedSeries& b) {
  const bool swap = std::lexicographical_compare(
      b.v.data(), b.v.data() + b.v.size(), a.v.data(), a.v.data() + a.v.size());
  const Eigen::MatrixXd C = swap ? b.M * a.M : a.M * b.M;
  return std::clamp(top_singular_value(C), 0.0, 1.0);
}

}  // namespace

double kcca_dependence(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const KccaOptions& opts, bool* degenerate) {
  if (a.size() != b.size())
    throw ConfigError("kcca_dependence: series lengths differ");
  if (a.size() < 8) throw ConfigError("kcca_dependence: length >= 8 required");
  if (!(opts.kappa > 0.0)) throw ConfigError("kcca_dependence: kappa > 0 required");
  if (opts.subsample < 8) throw ConfigError("kcca_dependence: subsample >= 8 required");
  if (degenerate) *degenerate = false;

  const auto idx = even_indices(a.size(), opts.subsample);
  const PreparedSeries pa = prepare_series(a, idx, opts);
  const PreparedSeries pb = prepare_series(b, idx, opts);
  if (pa.degenerate || pb.degenerate) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return pair_score(pa, pb);
}

DependenceMatrix dependence_matrix(const TimeSeries& Y, const KccaOptions& opts) {
  Y.validate();
  const long D = Y.dim();
  if (D < 2) throw ConfigError("dependence_matrix: D >= 2 required");
  if (Y.length() < 8) throw ConfigError("dependence_matrix: T >= 8 required");

  const auto idx = even_indices(Y.length(), opts.subsample);
  std::vector<PreparedSeries> prep(static_cast<size_t>(D));
  for (long i = 0; i < D; ++i)
    prep[static_cast<size_t>(i)] = prepare_series(Y.values.col(i), idx, opts);

  DependenceMatrix dep;
  dep.S = Eigen::MatrixXd::Zero(D, D);
  for (long i = 0; i < D; ++i) {
    for (long j = i + 1; j < D; ++j) {
      double s = 0.0;
      if (prep[static_cast<size_t>(i)].degenerate ||
          prep[static_cast<size_t>(j)].degenerate) {
        dep.degenerate.emplace_back(static_cast<int>(i), static_cast<int>(j));
      } else {
        s = pair_score(prep[static_cast<size_t>(i)], prep[static_cast<size_t>(j)]);
      }
      dep.S(i, j) = dep.S(j, i) = s;
    }
  }
  return dep;
}

std::vector<int> Partition::dims() const {
  std::vector<int> d;
  d.reserve(groups.size());
  for (const auto& g : groups) d.push_back(static_cast<int>(g.size()));
  return d;
}

int Partition::total() const {
  int n = 0;
  for (const auto& g : groups) n += static_cast<int>(g.size());
  return n;
}

void Partition::validate(int D) const {
  std::vector<int> seen(static_cast<size_t>(D), 0);
  for (const auto& g : groups) {
    if (g.empty()) throw ConfigError("Partition: empty group");
    for (int i : g) {
      if (i < 0 || i >= D) throw ConfigError("Partition: index out of range");
      if (seen[static_cast<size_t>(i)]++)
        throw ConfigError("Partition: duplicate index");
    }
  }
  for (int c : seen)
    if (!c) throw ConfigError("Partition: indices not covered");
}

Partition Partition::canonical() const {
  Partition out = *this;
  for (auto& g : out.groups) std::sort(g.begin(), g.end());
  std::sort(out.groups.begin(), out.groups.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a.front() < b.front();
            });
  return out;
}

Partition Partition::contiguous(const std::vector<int>& dims) {
  Partition p;
  int next = 0;
  for (int d : dims) {
    if (d < 1) throw ConfigError("Partition: dims must be >= 1");
    std::vector<int> g(static_cast<size_t>(d));
    std::iota(g.begin(), g.end(), next);
    next += d;
    p.groups.push_back(std::move(g));
  }
  return p;
}

namespace {

double within_objective(const Eigen::MatrixXd& S,
                        const std::vector<std::vector<int>>& groups) {
  double acc = 0.0;
  for (const auto& g : groups)
    for (size_t a = 0; a < g.size(); ++a)
      for (size_t b = a + 1; b < g.size(); ++b) acc += S(g[a], g[b]);
  return acc;
}

/// Hill climbing over cross-group element swaps; mutates `groups` in place
/// and returns the final objective.
double improve_by_swaps(const Eigen::MatrixXd& S,
                        std::vector<std::vector<int>>& groups) {
  const double eps = 1e-12;
  while (true) {
    double best_delta = 0.0;
    int best_i = -1, best_j = -1;
    size_t best_ga = 0, best_gb = 0, best_pa = 0, best_pb = 0;
    for (size_t ga = 0; ga < groups.size(); ++ga) {
      for (size_t gb = ga + 1; gb < groups.size(); ++gb) {
        for (size_t pa = 0; pa < groups[ga].size(); ++pa) {
          for (size_t pb = 0; pb < groups[gb].size(); ++pb) {
            const int i = groups[ga][pa];
            const int j = groups[gb][pb];
            double delta = 0.0;
            for (int k : groups[ga])
              if (k != i) delta += S(j, k) - S(i, k);
            for (int k : groups[gb])
              if (k != j) delta += S(i, k) - S(j, k);
            const int lo = std::min(i, j), hi = std::max(i, j);
            const int cur_lo = best_i < 0 ? 0 : std::min(best_i, best_j);
            const int cur_hi = best_i < 0 ? 0 : std::max(best_i, best_j);
            const bool better =
                delta > best_delta + eps ||
                (best_i >= 0 && std::abs(delta - best_delta) <= eps &&
                 (lo < cur_lo || (lo == cur_lo && hi < cur_hi)));
            if (delta > eps && better) {
              best_delta = delta;
              best_i = i;
              best_j = j;
              best_ga = ga;
              best_gb = gb;
              best_pa = pa;
              best_pb = pb;
            }
          }
        }
      }
    }
    if (best_i < 0) break;
    std::swap(groups[best_ga][best_pa], groups[best_gb][best_pb]);
  }
  return within_objective(S, groups);
}

std::vector<std::vector<int>> assignment_from_order(const std::vector<int>& order,
                                                    const std::vector<int>& dims) {
  std::vector<std::vector<int>> groups;
  size_t pos = 0;
  for (int d : dims) {
    groups.emplace_back(order.begin() + static_cast<long>(pos),
                        order.begin() + static_cast<long>(pos + static_cast<size_t>(d)));
    pos += static_cast<size_t>(d);
  }
  return groups;
}

}  // namespace

Partition greedy_cluster(const DependenceMatrix& dep, const std::vector<int>& dims,
                         int restarts, std::uint64_t seed) {
  const long D = dep.S.rows();
  if (dep.S.rows() != dep.S.cols())
    throw ConfigError("greedy_cluster: dependence matrix must be square");
  const int total = std::accumulate(dims.begin(), dims.end(), 0);
  if (total != D)
    throw ConfigError("greedy_cluster: dims must sum to the coordinate count");
  for (int d : dims)
    if (d < 1) throw ConfigError("greedy_cluster: dims must be >= 1");

  std::vector<int> order(static_cast<size_t>(D));
  std::iota(order.begin(), order.end(), 0);
  auto best = assignment_from_order(order, dims);
  double best_obj = improve_by_swaps(dep.S, best);

  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(r)));
    std::vector<int> shuffled = order;
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.uniform_int(i)]);
    auto cand = assignment_from_order(shuffled, dims);
    const double obj = improve_by_swaps(dep.S, cand);
    if (obj > best_obj + 1e-12) {
      best = std::move(cand);
      best_obj = obj;
    }
  }

  Partition p;
  p.groups = std::move(best);
  p.validate(static_cast<int>(D));
  return p.canonical();
}

namespace {

std::vector<std::vector<int>> connected_components(const Eigen::MatrixXd& S) {
  const long D = S.rows();
  std::vector<int> label(static_cast<size_t>(D), -1);
  std::vector<std::vector<int>> comps;
  for (long start = 0; start < D; ++start) {
    if (label[static_cast<size_t>(start)] >= 0) continue;
    std::vector<int> stack{static_cast<int>(start)};
    std::vector<int> comp;
    label[static_cast<size_t>(start)] = static_cast<int>(comps.size());
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (long w = 0; w < D; ++w)
        if (w != u && S(u, w) > 0.0 && label[static_cast<size_t>(w)] < 0) {
          label[static_cast<size_t>(w)] = static_cast<int>(comps.size());
          stack.push_back(static_cast<int>(w));
        }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

struct KmeansRun {
  std::vector<int> labels;
  double sse = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Eigen::MatrixXd& pts, int k, Rng& rng) {
  const long n = pts.rows();
  // k-means++ seeding
  Eigen::MatrixXd centers(k, pts.cols());
  std::vector<double> d2(static_cast<size_t>(n),
                         std::numeric_limits<double>::infinity());
  long first = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  centers.row(0) = pts.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (long i = 0; i < n; ++i) {
      const double d = (pts.row(i) - centers.row(c - 1)).squaredNorm();
      d2[static_cast<size_t>(i)] = std::min(d2[static_cast<size_t>(i)], d);
      total += d2[static_cast<size_t>(i)];
    }
    long pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total, acc = 0.0;
      for (long i = 0; i < n; ++i) {
        acc += d2[static_cast<size_t>(i)];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = pts.row(pick);
  }

  KmeansRun run;
  run.labels.assign(static_cast<size_t>(n), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (long i = 0; i < n; ++i) {
      int best = 0;
      double bd = (pts.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (pts.row(i) - centers.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (run.labels[static_cast<size_t>(i)] != best) {
        run.labels[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    // refill empty clusters with the worst-fitting point
    std::vector<long> count(static_cast<size_t>(k), 0);
    for (long i = 0; i < n; ++i) ++count[static_cast<size_t>(run.labels[static_cast<size_t>(i)])];
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<size_t>(c)] > 0) continue;
      long worst = 0;
      double wd = -1.0;
      for (long i = 0; i < n; ++i) {
        if (count[static_cast<size_t>(run.labels[static_cast<size_t>(i)])] <= 1) continue;
        const double d =
            (pts.row(i) - centers.row(run.labels[static_cast<size_t>(i)])).squaredNorm();
        if (d > wd) {
          wd = d;
          worst = i;
        }
      }
      --count[static_cast<size_t>(run.labels[static_cast<size_t>(worst)])];
      run.labels[static_cast<size_t>(worst)] = c;
      ++count[static_cast<size_t>(c)];
      changed = true;
    }
    centers.setZero();
    for (long i = 0; i < n; ++i)
      centers.row(run.labels[static_cast<size_t>(i)]) += pts.row(i);
    for (int c = 0; c < k; ++c)
      if (count[static_cast<size_t>(c)] > 0)
        centers.row(c) /= static_cast<double>(count[static_cast<size_t>(c)]);
    if (!changed) break;
  }
  run.sse = 0.0;
  for (long i = 0; i < n; ++i)
    run.sse += (pts.row(i) - centers.row(run.labels[static_cast<size_t>(i)])).squaredNorm();
  return run;
}

}  // namespace

Partition ncut_cluster(const DependenceMatrix& dep, std::optional<int> M,
                       std::uint64_t seed) {
  const long D = dep.S.rows();
  if (dep.S.rows() != dep.S.cols() || D < 2)
    throw ConfigError("ncut_cluster: square dependence matrix with D >= 2 required");
  if (M && (*M < 1 || *M > D))
    throw ConfigError("ncut_cluster: group count out of range");

  if (!M) {
    auto comps = connected_components(dep.S);
    if (comps.size() > 1) {
      std::cerr << "ncut_cluster: affinity graph disconnected, returning "
                << comps.size() << " connected components\n";
      Partition p;
      p.groups = std::move(comps);
      p.validate(static_cast<int>(D));
      return p.canonical();
    }
  }

  Eigen::MatrixXd A = dep.S;
  A.diagonal().array() += 1e-12;
  const Eigen::VectorXd deg = A.rowwise().sum();
  const Eigen::VectorXd dinv = deg.array().rsqrt();
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(D, D) -
                      dinv.asDiagonal() * A * dinv.asDiagonal();
  L = 0.5 * (L + L.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success)
    throw NumericError("ncut_cluster: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();  // ascending

  int m = M.value_or(0);
  if (!M) {
    // largest eigengap over 2 <= m < D (m = D has no gap above it)
    m = 2;
    double best_gap = -1.0;
    for (int k = 2; k < D; ++k) {
      const double gap = lam(k) - lam(k - 1);
      if (gap > best_gap + 1e-15) {
        best_gap = gap;
        m = k;
      }
    }
  }

  Partition p;
  if (m == 1) {
    std::vector<int> all(static_cast<size_t>(D));
    std::iota(all.begin(), all.end(), 0);
    p.groups.push_back(std::move(all));
    return p.canonical();
  }
  if (m == D) {
    for (long i = 0; i < D; ++i) p.groups.push_back({static_cast<int>(i)});
    return p.canonical();
  }

  Eigen::MatrixXd E = es.eigenvectors().leftCols(m);
  for (long i = 0; i < D; ++i) {
    const double nrm = E.row(i).norm();
    if (nrm > 1e-300) E.row(i) /= nrm;
  }

  Rng rng(Rng::derive(seed, 0x6b6d65616e73ULL));
  KmeansRun best;
  for (int restart = 0; restart < 20; ++restart) {
    KmeansRun run = kmeans_once(E, m, rng);
    if (run.sse < best.sse) best = std::move(run);
  }

  p.groups.assign(static_cast<size_t>(m), {});
  for (long i = 0; i < D; ++i)
    p.groups[static_cast<size_t>(best.labels[static_cast<size_t>(i)])].push_back(
        static_cast<int>(i));
  p.groups.erase(std::remove_if(p.groups.begin(), p.groups.end(),
                                [](const std::vector<int>& g) { return g.empty(); }),
                 p.groups.end());
  p.validate(static_cast<int>(D));
  return p.canonical();
}

TimeSeries SeparationResult::apply(const TimeSeries& x) const {
  x.validate();
  if (x.dim() != W_isa.cols())
    throw ConfigError("SeparationResult::apply: dimension mismatch");
  return TimeSeries((x.values.rowwise() - mean.transpose()) * W_isa.transpose());
}

SeparationResult assemble_separation(const ica::WhiteningTransform& wt,
                                     const ica::IcaResult& ica,
                                     const Partition& part,
                                     const far::MixingSpec& mixing,
                                     const std::vector<int>& true_dims) {
  const long D = wt.V.rows();
  if (ica.W.rows() != D || ica.W.cols() != D || wt.V.cols() != D)
    throw ConfigError("assemble_separation: stage dimensions disagree");
  part.validate(static_cast<int>(D));
  mixing.validate();
  if (mixing.A.rows() != D)
    throw ConfigError("assemble_separation: mixing dimension mismatch");

  SeparationResult res;
  res.partition = part.canonical();

  // permutation laying the groups out contiguously
  std::vector<int> order;
  order.reserve(static_cast<size_t>(D));
  for (const auto& g : res.partition.groups)
    order.insert(order.end(), g.begin(), g.end());

  const Eigen::MatrixXd w_ica_v = ica.W * wt.V;
  res.W_isa.resize(D, D);
  for (long r = 0; r < D; ++r)
    res.W_isa.row(r) = w_ica_v.row(order[static_cast<size_t>(r)]);

  res.G = res.W_isa * mixing.A;
  res.mean = wt.mean;

  const auto blocks = metrics::BlockStructure::of(res.partition.dims(), true_dims);
  res.amari = metrics::amari_index(res.G, blocks);
  res.block_sum = metrics::block_sums(res.G, blocks);
  res.block_permutation = metrics::is_block_permutation(res.G, blocks, 1e-8);
  return res;
}

}  // namespace faripa::isa
