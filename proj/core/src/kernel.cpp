#include "rfrl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "rfrl/errors.hpp"

namespace rfrl {

Kernel::Kernel(KernelKind kind, double bandwidth, Eigen::MatrixXd feature_map)
    : kind_(kind), bandwidth_(bandwidth), feature_map_(std::move(feature_map)) {}

Kernel Kernel::linear() { return Kernel(KernelKind::linear, 1.0, {}); }

Kernel Kernel::rbf(double bandwidth) {
  if (!(bandwidth > 0.0)) throw PreconditionError("rbf bandwidth must be positive");
  return Kernel(KernelKind::rbf, bandwidth, {});
}

Kernel Kernel::one_hot() { return Kernel(KernelKind::one_hot, 1.0, {}); }

Kernel Kernel::finite_feature(Eigen::MatrixXd feature_map) {
  if (feature_map.size() == 0) throw PreconditionError("finite-feature kernel needs a nonempty matrix");
  return Kernel(KernelKind::finite_feature, 1.0, std::move(feature_map));
}

std::string Kernel::name() const {
  switch (kind_) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::one_hot: return "one_hot";
    case KernelKind::finite_feature: return "finite_feature";
  }
  return "unknown";
}

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (a.size() != b.size()) throw PreconditionError("kernel arguments differ in dimension");
  switch (kind_) {
    case KernelKind::linear:
      return a.dot(b);
    case KernelKind::rbf:
      return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth_ * bandwidth_));
    case KernelKind::one_hot:
      return (a.array() == b.array()).all() ? 1.0 : 0.0;
    case KernelKind::finite_feature:
      return (feature_map_ * a).dot(feature_map_ * b);
  }
  return 0.0;
}

Eigen::VectorXd Kernel::features(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  switch (kind_) {
    case KernelKind::linear: return z;
    case KernelKind::finite_feature: return feature_map_ * z;
    default: throw PreconditionError("kernel '" + name() + "' has no explicit finite feature map");
  }
}

bool Kernel::bounded_on(std::span<const Eigen::VectorXd> points) const {
  return std::all_of(points.begin(), points.end(),
                     [&](const Eigen::VectorXd& z) { return (*this)(z, z) <= 1.0 + 1e-12; });
}

Eigen::MatrixXd gram(const Kernel& kernel, std::span<const Eigen::VectorXd> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(points[i], points[j]);
  return k;
}

Eigen::VectorXd kernel_column(const Kernel& kernel, std::span<const Eigen::VectorXd> points,
                              const Eigen::Ref<const Eigen::VectorXd>& z) {
  Eigen::VectorXd col(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) col[static_cast<Eigen::Index>(i)] = kernel(points[i], z);
  return col;
}

GramCholesky::GramCholesky(Kernel kernel, double lambda, JitterPolicy jitter)
    : kernel_(std::move(kernel)), lambda_(lambda), jitter_(jitter) {
  if (!(lambda > 0.0)) throw PreconditionError("regularizer lambda must be positive");
}

GramCholesky GramCholesky::batch(Kernel kernel, double lambda, Points points, JitterPolicy jitter) {
  GramCholesky out(std::move(kernel), lambda, jitter);
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) return out;
  Eigen::MatrixXd system = gram(out.kernel_, points);
  system.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  double added = 0.0;
  for (double j = jitter.start; llt.info() != Eigen::Success; j *= 10.0) {
    if (j > jitter.max * (1.0 + 1e-9)) {
      std::ostringstream os;
      os << "Cholesky of lambda I + K failed for n = " << n << ", lambda = " << lambda
         << " after jitter up to " << jitter.max;
      throw NumericalError(os.str());
    }
    Eigen::MatrixXd jittered = system;
    jittered.diagonal().array() += j;
    llt.compute(jittered);
    added = j;
  }
  out.factor_ = llt.matrixL();
  out.points_ = std::move(points);
  out.jitter_added_ = added * static_cast<double>(n);
  return out;
}

void GramCholesky::reserve(std::size_t capacity) {
  const auto cap = static_cast<Eigen::Index>(capacity);
  if (cap <= factor_.rows()) return;
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd grown = Eigen::MatrixXd::Zero(cap, cap);
  grown.topLeftCorner(n, n) = factor_.topLeftCorner(n, n);
  factor_.swap(grown);
  points_.reserve(capacity);
}

double GramCholesky::take_pivot(double radicand, std::size_t index) {
  if (radicand > 0.0 && std::isfinite(radicand)) return std::sqrt(radicand);
  for (double j = jitter_.start; j <= jitter_.max * (1.0 + 1e-9); j *= 10.0) {
    if (radicand + j > 0.0 && std::isfinite(radicand)) {
      jitter_added_ += j;
      return std::sqrt(radicand + j);
    }
  }
  std::ostringstream os;
  os << "Cholesky append failed at point " << index << ": pivot radicand " << radicand
     << " (lambda = " << lambda_ << ") not recoverable with jitter up to " << jitter_.max;
  throw NumericalError(os.str());
}

Eigen::VectorXd GramCholesky::append(const Eigen::VectorXd& z) {
  const Eigen::VectorXd cross = kernel_column(kernel_, points_, z);
  const Eigen::VectorXd solved = forward_solve(cross);
  return append_with(z, solved, kernel_(z, z));
}

Eigen::VectorXd GramCholesky::append_with(const Eigen::VectorXd& z, const Eigen::Ref<const Eigen::VectorXd>& solved,
                                          double self_kernel) {
  const auto n = static_cast<Eigen::Index>(size());
  if (solved.size() != n) throw PreconditionError("append_with: solved row has the wrong length");
  const double pivot = take_pivot(lambda_ + self_kernel - solved.squaredNorm(), size());
  if (n + 1 > factor_.rows()) reserve(std::max<std::size_t>(16, 2 * size()));
  factor_.row(n).head(n) = solved.transpose();
  factor_(n, n) = pivot;
  points_.push_back(z);
  Eigen::VectorXd row(n + 1);
  row.head(n) = solved;
  row[n] = pivot;
  return row;
}

Eigen::MatrixXd GramCholesky::dense_lower() const {
  const auto n = static_cast<Eigen::Index>(size());
  return factor_.topLeftCorner(n, n).triangularView<Eigen::Lower>();
}

Eigen::VectorXd GramCholesky::forward_solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const {
  if (rhs.size() != static_cast<Eigen::Index>(size())) throw PreconditionError("forward_solve: length mismatch");
  if (size() == 0) return Eigen::VectorXd();
  return lower().solve(rhs);
}

Eigen::VectorXd GramCholesky::solve(const Eigen::Ref<const Eigen::VectorXd>& rhs) const {
  Eigen::VectorXd x = forward_solve(rhs);
  if (size() == 0) return x;
  const auto n = static_cast<Eigen::Index>(size());
  return factor_.topLeftCorner(n, n).transpose().triangularView<Eigen::Upper>().solve(x);
}

double GramCholesky::log_det() const {
  const auto n = static_cast<Eigen::Index>(size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += std::log(factor_(i, i));
  return 2.0 * total;
}

KernelModel::KernelModel(Kernel kernel, double lambda)
    : factor_(std::make_shared<const GramCholesky>(std::move(kernel), lambda)) {}

KernelModel::KernelModel(std::shared_ptr<const GramCholesky> factor, Eigen::VectorXd targets)
    : factor_(std::move(factor)), targets_(std::move(targets)) {
  if (targets_.size() != static_cast<Eigen::Index>(factor_->size()))
    throw PreconditionError("number of targets differs from number of points");
  alpha_ = factor_->solve(targets_);
}

KernelModel KernelModel::fit(Kernel kernel, double lambda, Points points, const Eigen::VectorXd& targets) {
  if (targets.size() != static_cast<Eigen::Index>(points.size()))
    throw PreconditionError("fit: |points| != |targets|");
  auto factor = std::make_shared<const GramCholesky>(GramCholesky::batch(std::move(kernel), lambda, std::move(points)));
  return KernelModel(std::move(factor), targets);
}

KernelModel KernelModel::update(const Eigen::VectorXd& z, double y) const {
  auto extended = std::make_shared<GramCholesky>(*factor_);
  extended->append(z);
  Eigen::VectorXd targets(targets_.size() + 1);
  targets << targets_, y;
  return KernelModel(std::move(extended), std::move(targets));
}

KernelModel KernelModel::refit(const Eigen::VectorXd& targets) const { return KernelModel(factor_, targets); }

double KernelModel::predict_raw(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (size() == 0) return 0.0;
  return kernel_column(kernel(), points(), z).dot(alpha_);
}

double KernelModel::predict(const Eigen::Ref<const Eigen::VectorXd>& z, double horizon) const {
  return clip(predict_raw(z), horizon);
}

double KernelModel::bonus_w(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  double radicand = kernel()(z, z);
  if (size() > 0) radicand -= factor_->forward_solve(kernel_column(kernel(), points(), z)).squaredNorm();
  return std::sqrt(std::max(radicand, 0.0) / lambda());
}

double KernelModel::bonus_u(const Eigen::Ref<const Eigen::VectorXd>& z, double beta, double horizon) const {
  return ucb_bonus(bonus_w(z), beta, horizon);
}

std::string KernelModel::debug_dump() const {
  nlohmann::json points_json = nlohmann::json::array();
  for (const auto& z : points()) points_json.push_back(std::vector<double>(z.data(), z.data() + z.size()));
  nlohmann::json doc = {{"kernel", kernel().name()},
                        {"lambda", lambda()},
                        {"points", std::move(points_json)},
                        {"targets", std::vector<double>(targets_.data(), targets_.data() + targets_.size())}};
  return doc.dump();
}

double clip(double value, double horizon) { return std::min(std::max(value, 0.0), horizon); }

double ucb_bonus(double width, double beta, double horizon) { return std::min(beta * width, horizon); }

}  // namespace rfrl
