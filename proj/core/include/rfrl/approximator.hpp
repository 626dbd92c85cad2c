#pragma once

// Per-step regression learners used by the exploration and planning loops.
//
// A learner owns the data of one step h: the embedded points z_h^tau observed
// so far. fit() regresses a target vector (one entry per observed point) and
// afterwards predictions and UCB widths can be read at any point of the
// environment's embedding. All queries are by flat point index because the
// environments are tabular; the embedding supplies z.

#include <memory>
#include <span>
#include <string>

#include "rfrl/env.hpp"
#include "rfrl/kernel.hpp"
#include "rfrl/neural.hpp"

namespace rfrl {

class StepLearner {
 public:
  virtual ~StepLearner() = default;

  virtual void observe(std::size_t point) = 0;
  virtual std::size_t size() const = 0;

  /// targets.size() must equal size().
  virtual void fit(std::span<const double> targets) = 0;

  /// Unclipped regression value at a point (zero before any data).
  virtual double predict_raw(std::size_t point) const = 0;
  /// UCB width w(z) for the current fit.
  virtual double width(std::size_t point) const = 0;
  /// Realized information gain 1/2 log det(I + K / lambda) of the observed points.
  virtual double info_gain() const = 0;

  double predict_clipped(std::size_t point, double horizon) const { return clip(predict_raw(point), horizon); }
  double bonus(std::size_t point, double beta, double horizon) const { return ucb_bonus(width(point), beta, horizon); }
};

class ApproximatorBackend {
 public:
  virtual ~ApproximatorBackend() = default;

  virtual std::unique_ptr<StepLearner> make_learner(std::shared_ptr<const Embedding> embedding, double lambda,
                                                    std::size_t capacity_hint = 0) const = 0;
  virtual std::string name() const = 0;
  /// Whether the width depends only on the observed points (not on the targets),
  /// so both value functions of the game planner share one bonus.
  virtual bool target_independent_width() const = 0;
};

/// Kernel ridge regression. Keeps L^{-1} Psi over every embedding point so that
/// appending a point of the embedding costs O(n |Z|) and a refit O(n^2).
class KernelBackend final : public ApproximatorBackend {
 public:
  explicit KernelBackend(Kernel kernel) : kernel_(std::move(kernel)) {}

  std::unique_ptr<StepLearner> make_learner(std::shared_ptr<const Embedding> embedding, double lambda,
                                            std::size_t capacity_hint = 0) const override;
  std::string name() const override { return "kernel:" + kernel_.name(); }
  bool target_independent_width() const override { return true; }
  const Kernel& kernel() const { return kernel_; }

 private:
  Kernel kernel_;
};

enum class BonusFeatures { fitted, initial };

struct NeuralBackendConfig {
  std::size_t half_width = 256;
  std::uint64_t init_seed = 0;
  GdConfig gd{};
  /// Features for the width: at the fitted weights, or at W0 for ablation.
  BonusFeatures bonus_features = BonusFeatures::fitted;
  /// Start each refit from the previous solution when it has lower objective.
  bool warm_start = true;
};

/// Overparameterized two-layer network. Every learner built by one backend shares
/// the same initialization W0 (drawn from init_seed).
class NeuralBackend final : public ApproximatorBackend {
 public:
  explicit NeuralBackend(NeuralBackendConfig config) : config_(config) {}

  std::unique_ptr<StepLearner> make_learner(std::shared_ptr<const Embedding> embedding, double lambda,
                                            std::size_t capacity_hint = 0) const override;
  std::string name() const override { return "neural"; }
  bool target_independent_width() const override { return config_.bonus_features == BonusFeatures::initial; }
  const NeuralBackendConfig& config() const { return config_; }

 private:
  NeuralBackendConfig config_;
};

}  // namespace rfrl
