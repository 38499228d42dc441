#ifndef FARIPA_FAR_HPP
#define FARIPA_FAR_HPP

#include <functional>
#include <string>
#include <vector>

#include "faripa/rng.hpp"
#include "faripa/types.hpp"

namespace faripa::far {

/**
 * Order-p autoregressive dynamics with an arbitrary map: the map receives
 * the stacked p*D vector (s_{t-1}, ..., s_{t-p}), most recent lag first,
 * and returns the next D-dimensional state mean.
 */
struct FarDynamics {
  int order = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
  std::string description;
  Eigen::MatrixXd coeff;  // the defining matrix when the map came from one (e.g. sine dynamics)
};

/**
 * f(u) = sin(F u) elementwise, F a D x (p*D) matrix with i.i.d. uniform
 * [0,1] entries filled row-major from `rng`. F is recorded in `coeff`.
 */
FarDynamics make_random_sine_dynamics(int D, int p, Rng& rng);

/// Invertible mixing matrix plus the seed it was built from.
struct MixingSpec {
  Eigen::MatrixXd A;
  std::uint64_t seed = 0;

  /// Throws DegenerateError unless the smallest singular value exceeds
  /// 1e-10 times the largest.
  void validate() const;
};

/**
 * Gaussian-kernel bandwidth rule. Fixed mode uses a constant bandwidth h;
 * Recursive mode shrinks the bandwidth with the sample index t as t^-beta,
 * with the exponent dimension d_reg equal to the regressor dimension.
 */
struct KernelSpec {
  enum class Mode { Fixed, Recursive };
  Mode mode = Mode::Fixed;
  double h = 1.0;      // Fixed: bandwidth > 0
  double beta = 0.0;   // Recursive: 0 < beta < 1/d_reg
  int d_reg = 1;

  static KernelSpec fixed(double h);
  static KernelSpec recursive(double beta, int d_reg);
};

/// Sequential supplier of driving-noise vectors for simulate_far.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd next() = 0;
};

/// Hands out the rows of a pre-generated matrix in order.
class MatrixNoise final : public NoiseSource {
 public:
  explicit MatrixNoise(Eigen::MatrixXd rows) : rows_(std::move(rows)) {}
  int dim() const override { return static_cast<int>(rows_.cols()); }
  Eigen::VectorXd next() override {
    if (pos_ >= rows_.rows())
      throw ConfigError("MatrixNoise exhausted");
    return rows_.row(pos_++).transpose();
  }

 private:
  Eigen::MatrixXd rows_;
  long pos_ = 0;
};

/// Wraps a callback as a noise source (handy in tests).
class CallbackNoise final : public NoiseSource {
 public:
  CallbackNoise(int dim, std::function<Eigen::VectorXd()> fn)
      : dim_(dim), fn_(std::move(fn)) {}
  int dim() const override { return dim_; }
  Eigen::VectorXd next() override { return fn_(); }

 private:
  int dim_;
  std::function<Eigen::VectorXd()> fn_;
};

/**
 * Simulates s_t = f(s_{t-1}, ..., s_{t-p}) + e_t. The first p states are
 * pure noise draws; the recursion then runs burn_in + T steps and the last
 * T rows are returned. Any |entry| > 1e12 aborts with a NumericError
 * naming the first bad step.
 */
TimeSeries simulate_far(const FarDynamics& dyn, NoiseSource& noise, int T,
                        int burn_in = 100);

/// x_t = A s_t, row-wise. Validates invertibility once.
TimeSeries mix(const MixingSpec& spec, const TimeSeries& s);

/**
 * Nadaraya-Watson regression at a single query point with a fixed
 * bandwidth: the K((u - u_t)/h)-weighted average of the responses,
 * K the Gaussian density. Throws OutOfSupportError when every weight is
 * below 1e-300.
 */
Eigen::VectorXd nw_regress(const Eigen::MatrixXd& train_u,
                           const Eigen::MatrixXd& train_v,
                           const Eigen::VectorXd& query,
                           const KernelSpec& kernel);

/**
 * Recursive Nadaraya-Watson: weights t^(beta*q) K(t^beta (u - u_t)) with
 * q the regressor dimension and t the 1-based sample index. Weights are
 * accumulated in log space and shifted by the maximum log-weight before
 * exponentiation.
 */
Eigen::VectorXd recursive_nw_regress(const Eigen::MatrixXd& train_u,
                                     const Eigen::MatrixXd& train_v,
                                     const Eigen::VectorXd& query,
                                     const KernelSpec& kernel);

/// As above with explicit 1-based time indices per training pair (used
/// when the training set is a thinned subset of a longer record).
Eigen::VectorXd recursive_nw_regress(const Eigen::MatrixXd& train_u,
                                     const Eigen::MatrixXd& train_v,
                                     const std::vector<long>& time_index,
                                     const Eigen::VectorXd& query,
                                     const KernelSpec& kernel);

struct InnovationEstimate {
  TimeSeries innovations;  // (T - p) x D, innovation of x_t for t = p+1..T
  int fallback_count = 0;  // queries that fell back to the mean response
  int train_size = 0;      // training pairs actually used (after thinning)
};

/**
 * Estimates the innovation of an observed series by kernel regression of
 * x_t on its stacked p last values. With `loo` the pair belonging to the
 * query itself is excluded from the weighted average. Training pairs are
 * thinned evenly to at most n_max (original time indices kept for the
 * recursive weights); every query is still evaluated. Out-of-support
 * queries fall back to the mean training response and are counted.
 */
InnovationEstimate estimate_innovations(const TimeSeries& x, int p,
                                        const KernelSpec& kernel,
                                        bool loo = true, int n_max = 5000);

struct LinearArFit {
  Eigen::VectorXd intercept;            // D
  std::vector<Eigen::MatrixXd> coeffs;  // p matrices, D x D, lag 1 first
  TimeSeries residuals;                 // (T - p) x D
};

/**
 * Ordinary least squares of x_t on its stacked p last values plus an
 * intercept. Throws DegenerateError on a rank-deficient design matrix.
 */
LinearArFit fit_linear_ar(const TimeSeries& x, int p);

}  // namespace faripa::far

#endif  // FARIPA_FAR_HPP
