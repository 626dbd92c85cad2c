#include "rfrl/neural.hpp"

#include <cmath>
#include <sstream>

#include "rfrl/errors.hpp"
#include "rfrl/kernel.hpp"

namespace rfrl {
namespace {

void require_unit(const Eigen::Ref<const Eigen::VectorXd>& z) {
  const double norm = z.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    std::ostringstream os;
    os << "network input must have unit norm (got |z| = " << norm << ")";
    throw DomainError(os.str());
  }
}

Eigen::MatrixXd stack_columns(std::span<const Eigen::VectorXd> points, std::size_t dim) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(points.size()));
  for (std::size_t t = 0; t < points.size(); ++t) {
    if (points[t].size() != static_cast<Eigen::Index>(dim)) throw PreconditionError("input dimension mismatch");
    z.col(static_cast<Eigen::Index>(t)) = points[t];
  }
  return z;
}

struct Evaluation {
  double objective;
  Eigen::VectorXd residual;  // y - f
  Eigen::MatrixXd active;    // 2m x n indicators
};

class Problem {
 public:
  Problem(const NeuralModel& model, std::span<const Eigen::VectorXd> points, std::span<const double> targets,
          double lambda)
      : model_(model), inputs_(stack_columns(points, model.dim())), lambda_(lambda),
        scale_(1.0 / std::sqrt(static_cast<double>(model.width()))) {
    targets_ = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
    for (const auto& z : points) require_unit(z);
  }

  Evaluation evaluate(const Eigen::MatrixXd& weights) const {
    Evaluation out;
    const Eigen::MatrixXd pre = weights * inputs_;
    out.active = (pre.array() > 0.0).cast<double>();
    const Eigen::VectorXd prediction = scale_ * (pre.cwiseMax(0.0).transpose() * model_.signs());
    out.residual = targets_ - prediction;
    out.objective = out.residual.squaredNorm() + lambda_ * (weights - model_.initial_weights()).squaredNorm();
    return out;
  }

  Eigen::MatrixXd gradient(const Eigen::MatrixXd& weights, const Evaluation& eval) const {
    Eigen::MatrixXd weighted = eval.active;
    weighted.array().colwise() *= model_.signs().array();
    weighted.array().rowwise() *= eval.residual.transpose().array();
    return -2.0 * scale_ * weighted * inputs_.transpose() + 2.0 * lambda_ * (weights - model_.initial_weights());
  }

 private:
  const NeuralModel& model_;
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  double lambda_;
  double scale_;
};

}  // namespace

NeuralModel NeuralModel::init(std::size_t half_width, std::size_t dim, Rng& rng) {
  if (half_width == 0 || dim == 0) throw PreconditionError("network needs m >= 1 and d >= 1");
  const auto m = static_cast<Eigen::Index>(half_width);
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd w0(2 * m, d);
  Eigen::VectorXd v(2 * m);
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < m; ++i) {
    v[i] = rng.uniform_index(2) == 0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < d; ++j) w0(i, j) = sd * rng.normal();
  }
  v.tail(m) = -v.head(m);
  w0.bottomRows(m) = w0.topRows(m);
  return NeuralModel(w0, w0, v);
}

NeuralModel::NeuralModel(Eigen::MatrixXd initial_weights, Eigen::MatrixXd weights, Eigen::VectorXd signs)
    : initial_weights_(std::move(initial_weights)), weights_(std::move(weights)), signs_(std::move(signs)) {
  if (weights_.rows() != signs_.size() || initial_weights_.rows() != weights_.rows() ||
      initial_weights_.cols() != weights_.cols() || weights_.cols() == 0 || signs_.size() == 0)
    throw PreconditionError("inconsistent network shapes");
}

NeuralModel NeuralModel::with_weights(Eigen::MatrixXd weights) const {
  return NeuralModel(initial_weights_, std::move(weights), signs_);
}

double NeuralModel::forward(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  require_unit(z);
  if (z.size() != weights_.cols()) throw PreconditionError("input dimension mismatch");
  const Eigen::VectorXd pre = weights_ * z;
  auto term = [&](Eigen::Index i) { return signs_[i] * std::max(pre[i], 0.0); };
  // Sum mirrored pairs (i, i + m) first so the output at W0 is exactly zero.
  const Eigen::Index total = signs_.size();
  const Eigen::Index m = total / 2;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) sum += term(i) + term(i + m);
  if (total % 2 == 1) sum += term(total - 1);
  return sum / std::sqrt(static_cast<double>(total));
}

Eigen::VectorXd NeuralModel::grad_feature(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  require_unit(z);
  if (z.size() != weights_.cols()) throw PreconditionError("input dimension mismatch");
  const auto d = weights_.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(width()));
  const Eigen::VectorXd pre = weights_ * z;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameters()));
  for (Eigen::Index i = 0; i < signs_.size(); ++i)
    if (pre[i] > 0.0) phi.segment(i * d, d) = scale * signs_[i] * z;
  return phi;
}

double NeuralModel::linearized(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  require_unit(z);
  const Eigen::VectorXd pre0 = initial_weights_ * z;
  const Eigen::VectorXd delta = (weights_ - initial_weights_) * z;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < signs_.size(); ++i)
    if (pre0[i] > 0.0) sum += signs_[i] * delta[i];
  return sum / std::sqrt(static_cast<double>(width()));
}

double NeuralModel::objective(std::span<const Eigen::VectorXd> points, std::span<const double> targets,
                              double lambda) const {
  if (points.size() != targets.size()) throw PreconditionError("|points| != |targets|");
  if (points.empty()) return lambda * (weights_ - initial_weights_).squaredNorm();
  return Problem(*this, points, targets, lambda).evaluate(weights_).objective;
}

Eigen::VectorXd NeuralModel::flat_weights() const {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = weights_;
  return Eigen::Map<const Eigen::VectorXd>(row_major.data(), row_major.size());
}

NeuralModel fit_gd(const NeuralModel& model, std::span<const Eigen::VectorXd> points, std::span<const double> targets,
                   double lambda, const GdConfig& config, GdTrace* trace, const Eigen::MatrixXd* warm_start) {
  if (points.size() != targets.size()) throw PreconditionError("fit_gd: |points| != |targets|");
  if (!(lambda > 0.0)) throw PreconditionError("fit_gd: lambda must be positive");
  GdTrace local;
  GdTrace& log = trace ? *trace : local;
  log = GdTrace{};
  if (points.empty()) {
    // W0 is the unique minimizer of lambda |W - W0|^2.
    log.objective.push_back(0.0);
    log.converged = true;
    return model.at_initialization();
  }

  const Problem problem(model, points, targets, lambda);
  Eigen::MatrixXd weights = model.initial_weights();
  Evaluation current = problem.evaluate(weights);
  if (warm_start != nullptr) {
    if (warm_start->rows() != weights.rows() || warm_start->cols() != weights.cols())
      throw PreconditionError("warm start has the wrong shape");
    Evaluation warm = problem.evaluate(*warm_start);
    if (warm.objective < current.objective) {
      weights = *warm_start;
      current = std::move(warm);
    }
  }
  log.objective.push_back(current.objective);

  double step = config.initial_step;
  std::size_t increases = 0;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const Eigen::MatrixXd grad = problem.gradient(weights, current);
    const double grad_sq = grad.squaredNorm();
    if (std::sqrt(grad_sq) <= config.gradient_tolerance * (1.0 + current.objective)) {
      log.converged = true;
      break;
    }
    bool accepted = false;
    Eigen::MatrixXd candidate;
    Evaluation next;
    while (step >= config.min_step) {
      candidate = weights - step * grad;
      next = problem.evaluate(candidate);
      if (next.objective <= current.objective - config.armijo * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent left at machine precision
    increases = next.objective > current.objective ? increases + 1 : 0;
    if (increases >= config.divergence_window) {
      std::ostringstream os;
      os << "gradient descent diverged after " << it + 1 << " iterations (objective " << next.objective << ")";
      throw OptimizationError(os.str());
    }
    weights.swap(candidate);
    current = std::move(next);
    log.objective.push_back(current.objective);
    ++log.iterations;
    step *= 2.0;
  }
  return model.with_weights(std::move(weights));
}

NeuralBonus::NeuralBonus(const NeuralModel& feature_model, std::span<const Eigen::VectorXd> points, double lambda)
    : weights_(feature_model.weights()), lambda_(lambda), inputs_(stack_columns(points, feature_model.dim())) {
  if (!(lambda > 0.0)) throw PreconditionError("neural bonus: lambda must be positive");
  patterns_ = ((weights_ * inputs_).array() > 0.0).cast<double>();
  const double inv_width = 1.0 / static_cast<double>(weights_.rows());
  gram_ = ((patterns_.transpose() * patterns_) * inv_width).cwiseProduct(inputs_.transpose() * inputs_);
  Eigen::MatrixXd system = gram_;
  system.diagonal().array() += lambda_;
  system_.compute(system);
  if (system_.info() != Eigen::Success) throw NumericalError("neural bonus: Cholesky of lambda I + G failed");
}

Eigen::VectorXd NeuralBonus::pattern(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  return ((weights_ * z).array() > 0.0).cast<double>();
}

Eigen::VectorXd NeuralBonus::cross(const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& active) const {
  const double inv_width = 1.0 / static_cast<double>(weights_.rows());
  return ((patterns_.transpose() * active) * inv_width).cwiseProduct(inputs_.transpose() * z);
}

double NeuralBonus::width(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  const Eigen::VectorXd active = pattern(z);
  const double self = active.sum() / static_cast<double>(weights_.rows()) * z.squaredNorm();
  double radicand = self;
  if (inputs_.cols() > 0) {
    const Eigen::VectorXd c = cross(z, active);
    radicand -= c.dot(system_.solve(c));
  }
  return std::sqrt(std::max(radicand, 0.0) / lambda_);
}

double NeuralBonus::bonus(const Eigen::Ref<const Eigen::VectorXd>& z, double beta, double horizon) const {
  return ucb_bonus(width(z), beta, horizon);
}

double NeuralBonus::info_gain() const {
  if (inputs_.cols() == 0) return 0.0;
  const Eigen::MatrixXd l = system_.matrixL();
  return l.diagonal().array().log().sum() - 0.5 * static_cast<double>(inputs_.cols()) * std::log(lambda_);
}

double neural_bonus(const NeuralModel& model, std::span<const Eigen::VectorXd> points,
                    const Eigen::Ref<const Eigen::VectorXd>& z, double beta, double lambda, double horizon) {
  return NeuralBonus(model, points, lambda).bonus(z, beta, horizon);
}

}  // namespace rfrl
