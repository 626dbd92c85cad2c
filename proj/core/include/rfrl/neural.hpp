#pragma once

// Two-layer ReLU network f(z; W) = (2m)^{-1/2} sum_i v_i relu(W_i^T z) with
// mirrored initialization (f(.; W0) == 0), its gradient features, ridge-style
// training by gradient descent and the Lambda-matrix UCB width.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "rfrl/rng.hpp"

namespace rfrl {

struct GdConfig {
  std::size_t max_iterations = 2000;
  /// Stop once |grad| <= gradient_tolerance * (1 + objective).
  double gradient_tolerance = 1e-6;
  double initial_step = 1.0;
  double armijo = 1e-4;
  double min_step = 1e-20;
  /// Raise OptimizationError after this many consecutive objective increases.
  std::size_t divergence_window = 10;
};

struct GdTrace {
  std::vector<double> objective;  // one entry per accepted iterate, starting point first
  std::size_t iterations = 0;
  bool converged = false;
};

class NeuralModel {
 public:
  /// Mirrored initialization: v_i ~ Unif{-1, 1}, W0_i ~ N(0, I/d) for i < m;
  /// v_{i+m} = -v_i and W0_{i+m} = W0_i.
  static NeuralModel init(std::size_t half_width, std::size_t dim, Rng& rng);

  /// Explicit weights (rows are neurons); no symmetry is required.
  NeuralModel(Eigen::MatrixXd initial_weights, Eigen::MatrixXd weights, Eigen::VectorXd signs);

  std::size_t width() const { return static_cast<std::size_t>(signs_.size()); }
  std::size_t half_width() const { return width() / 2; }
  std::size_t dim() const { return static_cast<std::size_t>(weights_.cols()); }
  std::size_t parameters() const { return width() * dim(); }

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::MatrixXd& initial_weights() const { return initial_weights_; }
  const Eigen::VectorXd& signs() const { return signs_; }

  [[nodiscard]] NeuralModel with_weights(Eigen::MatrixXd weights) const;
  [[nodiscard]] NeuralModel at_initialization() const { return with_weights(initial_weights_); }

  /// Throws DomainError unless |z| = 1 within 1e-9.
  double forward(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// phi(z; W): block i (length d) is (2m)^{-1/2} v_i 1{W_i^T z > 0} z.
  Eigen::VectorXd grad_feature(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// <phi(z; W0), W - W0>, the linearization around the initialization.
  double linearized(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  /// sum (y - f(z; W))^2 + lambda |W - W0|_F^2.
  double objective(std::span<const Eigen::VectorXd> points, std::span<const double> targets, double lambda) const;

  /// Flattened W in the phi block order (row i of W is block i).
  Eigen::VectorXd flat_weights() const;

 private:
  Eigen::MatrixXd initial_weights_;
  Eigen::MatrixXd weights_;
  Eigen::VectorXd signs_;
};

/// Full-batch gradient descent with Armijo backtracking from W0, or from
/// `warm_start` when that starts at a lower objective. The result never has a
/// higher objective than W0.
NeuralModel fit_gd(const NeuralModel& model, std::span<const Eigen::VectorXd> points, std::span<const double> targets,
                   double lambda, const GdConfig& config = {}, GdTrace* trace = nullptr,
                   const Eigen::MatrixXd* warm_start = nullptr);

/// w(z) = sqrt(phi(z)^T Lambda^{-1} phi(z)), Lambda = lambda I + sum_t phi(z_t) phi(z_t)^T,
/// with features taken at `feature_model`'s weights and evaluated in the n x n dual form.
class NeuralBonus {
 public:
  NeuralBonus(const NeuralModel& feature_model, std::span<const Eigen::VectorXd> points, double lambda);

  double width(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  double bonus(const Eigen::Ref<const Eigen::VectorXd>& z, double beta, double horizon) const;
  /// 1/2 log det(I + G / lambda) of the feature Gram matrix G.
  double info_gain() const;

 private:
  Eigen::VectorXd cross(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& pattern) const;
  Eigen::VectorXd pattern(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  Eigen::MatrixXd weights_;
  double lambda_;
  Eigen::MatrixXd inputs_;    // d x n
  Eigen::MatrixXd patterns_;  // 2m x n activation indicators
  Eigen::LLT<Eigen::MatrixXd> system_;
  Eigen::MatrixXd gram_;
};

double neural_bonus(const NeuralModel& model, std::span<const Eigen::VectorXd> points,
                    const Eigen::Ref<const Eigen::VectorXd>& z, double beta, double lambda, double horizon);

}  // namespace rfrl
