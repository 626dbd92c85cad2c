#include "rfrl/approximator.hpp"

#include <cmath>
#include <optional>

#include "rfrl/errors.hpp"

namespace rfrl {
namespace {

class KernelLearner final : public StepLearner {
 public:
  KernelLearner(Kernel kernel, std::shared_ptr<const Embedding> embedding, double lambda, std::size_t capacity)
      : embedding_(std::move(embedding)), factor_(std::move(kernel), lambda) {
    const auto candidates = static_cast<Eigen::Index>(embedding_->size());
    self_.resize(candidates);
    for (Eigen::Index c = 0; c < candidates; ++c)
      self_[c] = factor_.kernel()(embedding_->point(static_cast<std::size_t>(c)), embedding_->point(static_cast<std::size_t>(c)));
    sumsq_ = Eigen::VectorXd::Zero(candidates);
    prediction_ = Eigen::VectorXd::Zero(candidates);
    reserve(capacity);
  }

  void observe(std::size_t point) override {
    check(point);
    const auto n = static_cast<Eigen::Index>(size());
    const auto p = static_cast<Eigen::Index>(point);
    if (n + 1 > projection_.rows()) reserve(std::max<std::size_t>(16, 2 * size()));
    const Eigen::VectorXd solved = projection_.col(p).head(n);
    const Eigen::VectorXd z = embedding_->point(point);
    const Eigen::VectorXd row = factor_.append_with(z, solved, self_[p]);
    const double pivot = row[n];

    Eigen::VectorXd cross(self_.size());
    for (Eigen::Index c = 0; c < cross.size(); ++c)
      cross[c] = factor_.kernel()(z, embedding_->point(static_cast<std::size_t>(c)));
    Eigen::VectorXd next_row = cross;
    if (n > 0) next_row.noalias() -= projection_.topRows(n).transpose() * solved;
    next_row /= pivot;
    projection_.row(n) = next_row.transpose();
    sumsq_ += next_row.cwiseAbs2();
  }

  std::size_t size() const override { return factor_.size(); }

  void fit(std::span<const double> targets) override {
    if (targets.size() != size()) throw PreconditionError("kernel learner: one target per observed point required");
    const auto n = static_cast<Eigen::Index>(size());
    fitted_size_ = size();
    if (n == 0) {
      prediction_.setZero();
      return;
    }
    const Eigen::VectorXd whitened =
        factor_.forward_solve(Eigen::Map<const Eigen::VectorXd>(targets.data(), n));
    prediction_.noalias() = projection_.topRows(n).transpose() * whitened;
  }

  double predict_raw(std::size_t point) const override {
    check(point);
    if (size() == 0) return 0.0;
    if (fitted_size_ != size()) throw PreconditionError("kernel learner: fit() must follow observe()");
    return prediction_[static_cast<Eigen::Index>(point)];
  }

  double width(std::size_t point) const override {
    check(point);
    const auto p = static_cast<Eigen::Index>(point);
    return std::sqrt(std::max(self_[p] - sumsq_[p], 0.0) / factor_.lambda());
  }

  double info_gain() const override {
    return 0.5 * factor_.log_det() - 0.5 * static_cast<double>(size()) * std::log(factor_.lambda());
  }

 private:
  void check(std::size_t point) const {
    if (point >= embedding_->size()) throw IndexError("point index outside the embedding");
  }

  void reserve(std::size_t capacity) {
    const auto cap = static_cast<Eigen::Index>(capacity);
    if (cap <= projection_.rows()) return;
    Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(cap, self_.size());
    const auto n = static_cast<Eigen::Index>(size());
    if (n > 0) grown.topRows(n) = projection_.topRows(n);
    projection_.swap(grown);
    factor_.reserve(capacity);
  }

  std::shared_ptr<const Embedding> embedding_;
  GramCholesky factor_;
  Eigen::MatrixXd projection_;  // rows: L^{-1} Psi over all embedding points
  Eigen::VectorXd self_;
  Eigen::VectorXd sumsq_;
  Eigen::VectorXd prediction_;
  std::size_t fitted_size_ = 0;
};

class NeuralLearner final : public StepLearner {
 public:
  NeuralLearner(const NeuralBackendConfig& config, std::shared_ptr<const Embedding> embedding, double lambda)
      : config_(config), embedding_(std::move(embedding)), lambda_(lambda), initial_([&] {
          Rng rng(config.init_seed, 0);
          return NeuralModel::init(config.half_width, embedding_->dim(), rng);
        }()) {
    if (!(lambda > 0.0)) throw PreconditionError("neural learner: lambda must be positive");
    if (!embedding_->unit_norm()) throw DomainError("neural backend needs a unit-norm embedding");
    const auto candidates = static_cast<Eigen::Index>(embedding_->size());
    prediction_ = Eigen::VectorXd::Zero(candidates);
    widths_.resize(candidates);
    const NeuralBonus empty(initial_, {}, lambda_);
    for (Eigen::Index c = 0; c < candidates; ++c) widths_[c] = empty.width(embedding_->point(static_cast<std::size_t>(c)));
  }

  void observe(std::size_t point) override {
    if (point >= embedding_->size()) throw IndexError("point index outside the embedding");
    points_.emplace_back(embedding_->point(point));
    info_gain_.reset();
  }

  std::size_t size() const override { return points_.size(); }

  void fit(std::span<const double> targets) override {
    if (targets.size() != size()) throw PreconditionError("neural learner: one target per observed point required");
    const Eigen::MatrixXd* warm = (config_.warm_start && fitted_) ? &fitted_->weights() : nullptr;
    NeuralModel model = fit_gd(initial_, points_, targets, lambda_, config_.gd, nullptr, warm);
    const NeuralModel& feature_model = config_.bonus_features == BonusFeatures::fitted ? model : initial_;
    const NeuralBonus bonus(feature_model, points_, lambda_);
    for (Eigen::Index c = 0; c < prediction_.size(); ++c) {
      const auto z = embedding_->point(static_cast<std::size_t>(c));
      prediction_[c] = model.forward(z);
      widths_[c] = bonus.width(z);
    }
    fitted_ = std::move(model);
    fitted_size_ = size();
  }

  double predict_raw(std::size_t point) const override {
    if (point >= embedding_->size()) throw IndexError("point index outside the embedding");
    if (size() == 0) return 0.0;
    if (fitted_size_ != size()) throw PreconditionError("neural learner: fit() must follow observe()");
    return prediction_[static_cast<Eigen::Index>(point)];
  }

  double width(std::size_t point) const override {
    if (point >= embedding_->size()) throw IndexError("point index outside the embedding");
    return widths_[static_cast<Eigen::Index>(point)];
  }

  double info_gain() const override {
    if (!info_gain_) info_gain_ = NeuralBonus(initial_, points_, lambda_).info_gain();
    return *info_gain_;
  }

 private:
  NeuralBackendConfig config_;
  std::shared_ptr<const Embedding> embedding_;
  double lambda_;
  NeuralModel initial_;
  Points points_;
  std::optional<NeuralModel> fitted_;
  Eigen::VectorXd prediction_;
  Eigen::VectorXd widths_;
  std::size_t fitted_size_ = 0;
  mutable std::optional<double> info_gain_;
};

}  // namespace

std::unique_ptr<StepLearner> KernelBackend::make_learner(std::shared_ptr<const Embedding> embedding, double lambda,
                                                         std::size_t capacity_hint) const {
  return std::make_unique<KernelLearner>(kernel_, std::move(embedding), lambda, capacity_hint);
}

std::unique_ptr<StepLearner> NeuralBackend::make_learner(std::shared_ptr<const Embedding> embedding, double lambda,
                                                         std::size_t) const {
  return std::make_unique<NeuralLearner>(config_, std::move(embedding), lambda);
}

}  // namespace rfrl
