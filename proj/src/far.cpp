#include "faripa/far.hpp"

#include <cmath>
#include <sstream>

namespace faripa::far {

namespace {

constexpr double kLogUnderflow = -690.77552789821371;  // ln(1e-300)
constexpr double kDivergenceBound = 1e12;

}  // namespace

FarDynamics make_random_sine_dynamics(int D, int p, Rng& rng) {
  if (D < 1 || p < 1)
    throw ConfigError("make_random_sine_dynamics: D >= 1 and p >= 1 required");
  Eigen::MatrixXd F(D, p * D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < p * D; ++j) F(i, j) = rng.uniform();
  FarDynamics dyn;
  dyn.order = p;
  dyn.description = "elementwise sin(F u), F ~ U[0,1]";
  dyn.coeff = F;
  dyn.map = [F](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return (F * u).array().sin().matrix();
  };
  return dyn;
}

void MixingSpec::validate() const {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw ConfigError("MixingSpec: A must be square and nonempty");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0))
    throw DegenerateError("MixingSpec: A is singular or near-singular");
}

KernelSpec KernelSpec::fixed(double h) {
  if (!(h > 0.0)) throw ConfigError("KernelSpec: bandwidth h must be > 0");
  KernelSpec k;
  k.mode = Mode::Fixed;
  k.h = h;
  return k;
}

KernelSpec KernelSpec::recursive(double beta, int d_reg) {
  if (d_reg < 1) throw ConfigError("KernelSpec: d_reg >= 1 required");
  if (!(beta > 0.0) || !(beta < 1.0 / d_reg))
    throw ConfigError("KernelSpec: recursive mode needs 0 < beta < 1/d_reg");
  KernelSpec k;
  k.mode = Mode::Recursive;
  k.beta = beta;
  k.d_reg = d_reg;
  return k;
}

TimeSeries simulate_far(const FarDynamics& dyn, NoiseSource& noise, int T,
                        int burn_in) {
  if (T < 1) throw ConfigError("simulate_far: T >= 1 required");
  if (burn_in < 0) throw ConfigError("simulate_far: burn_in >= 0 required");
  const int p = dyn.order;
  if (p < 1) throw ConfigError("simulate_far: dynamics order >= 1 required");
  const int D = noise.dim();
  if (D < 1) throw ConfigError("simulate_far: noise dimension >= 1 required");

  const long total = static_cast<long>(p) + burn_in + T;
  Eigen::MatrixXd s(total, D);
  for (int t = 0; t < p; ++t) s.row(t) = noise.next().transpose();

  Eigen::VectorXd stacked(p * D);
  for (long t = p; t < total; ++t) {
    for (int lag = 1; lag <= p; ++lag)
      stacked.segment(static_cast<long>(lag - 1) * D, D) = s.row(t - lag).transpose();
    const Eigen::VectorXd mean = dyn.map(stacked);
    if (mean.size() != D)
      throw ConfigError("simulate_far: dynamics map dimension mismatch");
    s.row(t) = (mean + noise.next()).transpose();
    if (!s.row(t).allFinite() || s.row(t).cwiseAbs().maxCoeff() > kDivergenceBound) {
      std::ostringstream msg;
      msg << "simulate_far: trajectory diverged at step " << (t + 1)
          << " (|entry| > 1e12)";
      throw NumericError(msg.str());
    }
  }
  return TimeSeries(s.bottomRows(T));
}

TimeSeries mix(const MixingSpec& spec, const TimeSeries& s) {
  s.validate();
  spec.validate();
  if (spec.A.cols() != s.dim())
    throw ConfigError("mix: matrix and series dimensions disagree");
  return TimeSeries(s.values * spec.A.transpose());
}

namespace {

struct WeightedAverage {
  Eigen::VectorXd value;
  bool out_of_support = false;
};

/**
 * Shared kernel-weighted average. For the fixed bandwidth the log-weight
 * of pair t is -q/2 ln(2pi) - d_t^2 / (2 h^2); the recursive variant uses
 * beta*q ln(t) - q/2 ln(2pi) - t^(2 beta) d_t^2 / 2. The maximum
 * log-weight is subtracted before exponentiation; if even the maximum is
 * below ln(1e-300) the query counts as out of support.
 */
WeightedAverage kernel_average(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                               const std::vector<long>* time_index,
                               const Eigen::VectorXd& query,
                               const KernelSpec& kernel, long exclude_row) {
  const long n = U.rows();
  const long q = U.cols();
  const double log_norm = -0.5 * static_cast<double>(q) * std::log(2.0 * M_PI);

  Eigen::VectorXd d2 =
      (U.rowwise() - query.transpose()).rowwise().squaredNorm();
  Eigen::VectorXd logw(n);
  if (kernel.mode == KernelSpec::Mode::Fixed) {
    logw = (-d2 / (2.0 * kernel.h * kernel.h)).array() + log_norm;
  } else {
    const double bq = kernel.beta * static_cast<double>(q);
    for (long t = 0; t < n; ++t) {
      const double ti = time_index
                            ? static_cast<double>((*time_index)[static_cast<size_t>(t)])
                            : static_cast<double>(t + 1);
      const double scale2 = std::pow(ti, 2.0 * kernel.beta);
      logw(t) = bq * std::log(ti) + log_norm - 0.5 * scale2 * d2(t);
    }
  }
  if (exclude_row >= 0) logw(exclude_row) = -std::numeric_limits<double>::infinity();

  const double top = logw.maxCoeff();
  if (!(top >= kLogUnderflow))  // also catches all-excluded (-inf)
    return {Eigen::VectorXd::Zero(V.cols()), true};

  const Eigen::VectorXd w = (logw.array() - top).exp();
  return {V.transpose() * w / w.sum(), false};
}

void check_regression_args(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                           const Eigen::VectorXd& query) {
  if (U.rows() < 1 || U.rows() != V.rows())
    throw ConfigError("regression: training lists must be nonempty and equal length");
  if (query.size() != U.cols())
    throw ConfigError("regression: query dimension does not match regressors");
}

}  // namespace

Eigen::VectorXd nw_regress(const Eigen::MatrixXd& train_u,
                           const Eigen::MatrixXd& train_v,
                           const Eigen::VectorXd& query,
                           const KernelSpec& kernel) {
  if (kernel.mode != KernelSpec::Mode::Fixed)
    throw ConfigError("nw_regress expects a Fixed-mode kernel");
  check_regression_args(train_u, train_v, query);
  const auto out = kernel_average(train_u, train_v, nullptr, query, kernel, -1);
  if (out.out_of_support)
    throw OutOfSupportError("nw_regress: all kernel weights underflow");
  return out.value;
}

Eigen::VectorXd recursive_nw_regress(const Eigen::MatrixXd& train_u,
                                     const Eigen::MatrixXd& train_v,
                                     const Eigen::VectorXd& query,
                                     const KernelSpec& kernel) {
  if (kernel.mode != KernelSpec::Mode::Recursive)
    throw ConfigError("recursive_nw_regress expects a Recursive-mode kernel");
  if (kernel.d_reg != train_u.cols())
    throw ConfigError("recursive_nw_regress: kernel d_reg must equal regressor dimension");
  check_regression_args(train_u, train_v, query);
  const auto out = kernel_average(train_u, train_v, nullptr, query, kernel, -1);
  if (out.out_of_support)
    throw OutOfSupportError("recursive_nw_regress: all kernel weights underflow");
  return out.value;
}

Eigen::VectorXd recursive_nw_regress(const Eigen::MatrixXd& train_u,
                                     const Eigen::MatrixXd& train_v,
                                     const std::vector<long>& time_index,
                                     const Eigen::VectorXd& query,
                                     const KernelSpec& kernel) {
  if (kernel.mode != KernelSpec::Mode::Recursive)
    throw ConfigError("recursive_nw_regress expects a Recursive-mode kernel");
  if (kernel.d_reg != train_u.cols())
    throw ConfigError("recursive_nw_regress: kernel d_reg must equal regressor dimension");
  if (static_cast<long>(time_index.size()) != train_u.rows())
    throw ConfigError("recursive_nw_regress: time_index length mismatch");
  check_regression_args(train_u, train_v, query);
  const auto out = kernel_average(train_u, train_v, &time_index, query, kernel, -1);
  if (out.out_of_support)
    throw OutOfSupportError("recursive_nw_regress: all kernel weights underflow");
  return out.value;
}

namespace {

/// Stacks the p lags preceding sample t (most recent first) into one row.
void fill_lag_row(const Eigen::MatrixXd& x, long t, int p,
                  Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  const long D = x.cols();
  for (int lag = 1; lag <= p; ++lag)
    row.segment(static_cast<long>(lag - 1) * D, D) = x.row(t - lag);
}

}  // namespace

InnovationEstimate estimate_innovations(const TimeSeries& x, int p,
                                        const KernelSpec& kernel, bool loo,
                                        int n_max) {
  x.validate();
  if (p < 1) throw ConfigError("estimate_innovations: p >= 1 required");
  if (x.length() <= p + 1)
    throw ConfigError("estimate_innovations: T > p + 1 required");
  if (n_max < 1) throw ConfigError("estimate_innovations: n_max >= 1 required");
  if (kernel.mode == KernelSpec::Mode::Recursive &&
      kernel.d_reg != p * x.dim())
    throw ConfigError("estimate_innovations: kernel d_reg must equal p*D");

  const long D = x.dim();
  const long N = x.length() - p;  // pairs (u_t, v_t), v_t = x_t for t = p..T-1

  Eigen::MatrixXd U(N, static_cast<long>(p) * D);
  Eigen::MatrixXd V(N, D);
  for (long j = 0; j < N; ++j) {
    fill_lag_row(x.values, p + j, p, U.row(j));
    V.row(j) = x.values.row(p + j);
  }

  // Even thinning of the training pairs; original 1-based positions are
  // kept so the recursive time weights stay meaningful.
  std::vector<long> keep;
  if (N > n_max) {
    keep.reserve(static_cast<size_t>(n_max));
    for (long k = 0; k < n_max; ++k) keep.push_back(k * N / n_max);
  } else {
    keep.reserve(static_cast<size_t>(N));
    for (long j = 0; j < N; ++j) keep.push_back(j);
  }
  const long K = static_cast<long>(keep.size());
  Eigen::MatrixXd Ut(K, U.cols());
  Eigen::MatrixXd Vt(K, D);
  std::vector<long> tindex(static_cast<size_t>(K));
  std::vector<long> thinned_row(static_cast<size_t>(N), -1);
  for (long k = 0; k < K; ++k) {
    Ut.row(k) = U.row(keep[static_cast<size_t>(k)]);
    Vt.row(k) = V.row(keep[static_cast<size_t>(k)]);
    tindex[static_cast<size_t>(k)] = keep[static_cast<size_t>(k)] + 1;
    thinned_row[static_cast<size_t>(keep[static_cast<size_t>(k)])] = k;
  }
  const Eigen::VectorXd mean_response = Vt.colwise().mean().transpose();

  InnovationEstimate est;
  est.train_size = static_cast<int>(K);
  Eigen::MatrixXd innov(N, D);
  for (long j = 0; j < N; ++j) {
    const long exclude = loo ? thinned_row[static_cast<size_t>(j)] : -1;
    const auto out = kernel_average(Ut, Vt, &tindex, U.row(j).transpose(),
                                    kernel, exclude);
    const Eigen::VectorXd pred = out.out_of_support ? mean_response : out.value;
    if (out.out_of_support) ++est.fallback_count;
    innov.row(j) = V.row(j) - pred.transpose();
  }
  est.innovations = TimeSeries(std::move(innov));
  return est;
}

LinearArFit fit_linear_ar(const TimeSeries& x, int p) {
  x.validate();
  if (p < 1) throw ConfigError("fit_linear_ar: p >= 1 required");
  const long D = x.dim();
  if (x.length() <= static_cast<long>(p) * D + 1)
    throw ConfigError("fit_linear_ar: T > p*D + 1 required");

  const long N = x.length() - p;
  const long cols = 1 + static_cast<long>(p) * D;
  Eigen::MatrixXd Z(N, cols);
  Eigen::MatrixXd Y(N, D);
  for (long j = 0; j < N; ++j) {
    Z(j, 0) = 1.0;
    fill_lag_row(x.values, p + j, p, Z.row(j).segment(1, cols - 1));
    Y.row(j) = x.values.row(p + j);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  if (qr.rank() < cols)
    throw DegenerateError("fit_linear_ar: rank-deficient design matrix");
  const Eigen::MatrixXd B = qr.solve(Y);  // cols x D

  LinearArFit fit;
  fit.intercept = B.row(0).transpose();
  for (int lag = 0; lag < p; ++lag)
    fit.coeffs.push_back(B.middleRows(1 + static_cast<long>(lag) * D, D).transpose());
  fit.residuals = TimeSeries(Y - Z * B);
  return fit;
}

}  // namespace faripa::far
