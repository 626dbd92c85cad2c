#pragma once

// Kernels, Gram matrices, an append-only Cholesky factor of (lambda I + K) and
// the kernel ridge regression model with its UCB width.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rfrl {

using Points = std::vector<Eigen::VectorXd>;

enum class KernelKind { linear, rbf, one_hot, finite_feature };

class Kernel {
 public:
  /// <z, z'>; bounded by one on unit-norm inputs.
  static Kernel linear();
  /// exp(-|z - z'|^2 / (2 bandwidth^2)); ker(z, z) = 1.
  static Kernel rbf(double bandwidth);
  /// 1 if z == z' exactly, else 0. The tabular kernel.
  static Kernel one_hot();
  /// <F z, F z'> for a user matrix F (features x input dim).
  static Kernel finite_feature(Eigen::MatrixXd feature_map);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) const;

  KernelKind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }
  const Eigen::MatrixXd& feature_map() const { return feature_map_; }
  std::string name() const;

  /// Explicit features for the finite-dimensional kinds (linear, finite_feature).
  Eigen::VectorXd features(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  /// Whether ker(z, z) <= 1 (+1e-12) for every point. Theory assumes it; violating
  /// inputs are still accepted and only reported.
  bool bounded_on(std::span<const Eigen::VectorXd> points) const;

 private:
  Kernel(KernelKind kind, double bandwidth, Eigen::MatrixXd feature_map);

  KernelKind kind_;
  double bandwidth_ = 1.0;
  Eigen::MatrixXd feature_map_;
};

Eigen::MatrixXd gram(const Kernel& kernel, std::span<const Eigen::VectorXd> points);
Eigen::VectorXd kernel_column(const Kernel& kernel, std::span<const Eigen::VectorXd> points,
                              const Eigen::Ref<const Eigen::VectorXd>& z);

/// Jitter ladder for Cholesky breakdowns: start, multiply by ten, give up past max.
struct JitterPolicy {
  double start = 1e-12;
  double max = 1e-6;
};

/// Lower Cholesky factor L of (lambda I + K) over an append-only point list.
/// Appending a point costs one triangular solve (O(n^2)); the factor grows in
/// place with amortized reallocation.
class GramCholesky {
 public:
  GramCholesky(Kernel kernel, double lambda, JitterPolicy jitter = {});

  /// Factor an entire batch at once with a dense LLT (independent of append()).
  static GramCholesky batch(Kernel kernel, double lambda, Points points, JitterPolicy jitter = {});

  void reserve(std::size_t capacity);

  /// Extends the factor by one point and returns the new row of L (diagonal last).
  Eigen::VectorXd append(const Eigen::VectorXd& z);
  /// Same, when the caller already holds L^{-1} psi(z) and ker(z, z).
  Eigen::VectorXd append_with(const Eigen::VectorXd& z, const Eigen::Ref<const Eigen::VectorXd>& solved,
                              double self_kernel);

  std::size_t size() const { return points_.size(); }
  double lambda() const { return lambda_; }
  const Kernel& kernel() const { return kernel_; }
  const Points& points() const { return points_; }
  /// Total jitter added to diagonal entries so far.
  double jitter_added() const { return jitter_added_; }

  auto lower() const {
    const auto n = static_cast<Eigen::Index>(size());
    return factor_.topLeftCorner(n, n).triangularView<Eigen::Lower>();
  }
  Eigen::MatrixXd dense_lower() const;

  /// L^{-1} rhs.
  Eigen::VectorXd forward_solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const;
  /// (lambda I + K)^{-1} rhs.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const;
  /// log det(lambda I + K) = 2 sum log L_ii.
  double log_det() const;

 private:
  double take_pivot(double radicand, std::size_t index);

  Kernel kernel_;
  double lambda_;
  JitterPolicy jitter_;
  Points points_;
  Eigen::MatrixXd factor_;  // capacity x capacity, valid lower n x n block
  double jitter_added_ = 0.0;
};

/// Immutable kernel ridge regression state: f(z) = psi(z)^T (lambda I + K)^{-1} y
/// and w(z) = lambda^{-1/2} sqrt(ker(z, z) - psi(z)^T (lambda I + K)^{-1} psi(z)).
class KernelModel {
 public:
  /// Empty model: predicts zero, width sqrt(ker(z, z) / lambda).
  KernelModel(Kernel kernel, double lambda);

  static KernelModel fit(Kernel kernel, double lambda, Points points, const Eigen::VectorXd& targets);

  /// Model on the extended dataset; `*this` is left untouched.
  [[nodiscard]] KernelModel update(const Eigen::VectorXd& z, double y) const;
  /// Same points, new targets; reuses the factor.
  [[nodiscard]] KernelModel refit(const Eigen::VectorXd& targets) const;

  double predict_raw(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// Pi_[0, H] of the raw prediction.
  double predict(const Eigen::Ref<const Eigen::VectorXd>& z, double horizon) const;
  double bonus_w(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// min{beta * w(z), H}.
  double bonus_u(const Eigen::Ref<const Eigen::VectorXd>& z, double beta, double horizon) const;

  std::size_t size() const { return factor_->size(); }
  double lambda() const { return factor_->lambda(); }
  const Kernel& kernel() const { return factor_->kernel(); }
  const Points& points() const { return factor_->points(); }
  const Eigen::VectorXd& targets() const { return targets_; }
  const Eigen::VectorXd& coefficients() const { return alpha_; }
  const GramCholesky& factor() const { return *factor_; }

  /// JSON with points, targets and lambda, for fixtures and debugging.
  std::string debug_dump() const;

 private:
  KernelModel(std::shared_ptr<const GramCholesky> factor, Eigen::VectorXd targets);

  std::shared_ptr<const GramCholesky> factor_;
  Eigen::VectorXd targets_;
  Eigen::VectorXd alpha_;
};

double clip(double value, double horizon);
double ucb_bonus(double width, double beta, double horizon);

}  // namespace rfrl
