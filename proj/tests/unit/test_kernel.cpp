#include <gtest/gtest.h>

#include <cmath>

#include "rfrl/approximator.hpp"
#include "rfrl/errors.hpp"
#include "rfrl/kernel.hpp"
#include "test_support.hpp"

using namespace rfrl;

namespace {

struct Instance {
  Eigen::MatrixXd feature_map;
  Points points;
  Eigen::VectorXd targets;
  double lambda;
};

Instance random_instance(Rng& rng, std::size_t d, std::size_t p, std::size_t n) {
  Instance out;
  out.feature_map = Eigen::MatrixXd(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(d));
  for (auto& x : out.feature_map.reshaped()) x = rng.normal() / std::sqrt(static_cast<double>(d));
  for (std::size_t t = 0; t < n; ++t) out.points.push_back(test::random_unit(d, rng));
  out.targets = Eigen::VectorXd(static_cast<Eigen::Index>(n));
  for (auto& y : out.targets) y = 3.0 * rng.uniform();
  out.lambda = 0.1 + rng.uniform();
  return out;
}

// Primal ridge regression in feature space: theta = (lambda I + Phi^T Phi)^{-1} Phi^T y.
struct Primal {
  Eigen::MatrixXd precision;
  Eigen::VectorXd theta;
  Eigen::MatrixXd feature_map;

  explicit Primal(const Instance& in) : feature_map(in.feature_map) {
    const auto p = in.feature_map.rows();
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(in.points.size()), p);
    for (std::size_t t = 0; t < in.points.size(); ++t)
      phi.row(static_cast<Eigen::Index>(t)) = (in.feature_map * in.points[t]).transpose();
    precision = in.lambda * Eigen::MatrixXd::Identity(p, p) + phi.transpose() * phi;
    theta = precision.ldlt().solve(phi.transpose() * in.targets);
  }

  double predict(const Eigen::VectorXd& z) const { return (feature_map * z).dot(theta); }
  double width(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd f = feature_map * z;
    return std::sqrt(f.dot(precision.ldlt().solve(f)));
  }
};

}  // namespace

TEST(Kernel, Values) {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0.6, 0.8;
  EXPECT_DOUBLE_EQ(Kernel::linear()(a, b), 0.6);
  EXPECT_NEAR(Kernel::rbf(0.5)(a, b), std::exp(-(0.16 + 0.64) / (2 * 0.25)), 1e-15);
  EXPECT_EQ(Kernel::one_hot()(a, a), 1.0);
  EXPECT_EQ(Kernel::one_hot()(a, b), 0.0);
  const Eigen::MatrixXd f = (Eigen::MatrixXd(1, 2) << 2, 1).finished();
  EXPECT_DOUBLE_EQ(Kernel::finite_feature(f)(a, b), 2.0 * 2.0);
  EXPECT_THROW(Kernel::rbf(0.0), PreconditionError);
}

TEST(Kernel, DualPredictionMatchesFeatureSpaceRidge) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(8), p = 1 + rng.uniform_index(8), n = 1 + rng.uniform_index(40);
    const Instance in = random_instance(rng, d, p, n);
    const KernelModel model = KernelModel::fit(Kernel::finite_feature(in.feature_map), in.lambda, in.points, in.targets);
    const Primal primal(in);
    for (int q = 0; q < 10; ++q) {
      const Eigen::VectorXd z = test::random_unit(d, rng);
      const double expected = primal.predict(z);
      EXPECT_NEAR(model.predict_raw(z), expected, 1e-9 * std::max(1.0, std::abs(expected)));
      EXPECT_NEAR(model.bonus_w(z), primal.width(z), 1e-8);
    }
  }
}

TEST(Kernel, IncrementalFactorMatchesBatch) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = random_instance(rng, 4, 3, 25);
    const Kernel k = Kernel::rbf(0.7);
    GramCholesky inc(k, in.lambda);
    for (const auto& z : in.points) inc.append(z);
    const GramCholesky batch = GramCholesky::batch(k, in.lambda, in.points);
    EXPECT_TRUE(inc.dense_lower().isApprox(batch.dense_lower(), 1e-10));
    Eigen::MatrixXd system = gram(k, in.points);
    system.diagonal().array() += in.lambda;
    EXPECT_NEAR(inc.log_det(), std::log(system.determinant()), 1e-9);
    const Eigen::VectorXd x = inc.solve(in.targets);
    EXPECT_TRUE((system * x).isApprox(in.targets, 1e-10));
  }
}

TEST(Kernel, UpdateChainEqualsBatchFit) {
  Rng rng(12);
  const Instance in = random_instance(rng, 3, 3, 20);
  const Kernel k = Kernel::rbf(1.0);
  KernelModel model(k, in.lambda);
  for (std::size_t t = 0; t < in.points.size(); ++t) model = model.update(in.points[t], in.targets[static_cast<Eigen::Index>(t)]);
  const KernelModel batch = KernelModel::fit(k, in.lambda, in.points, in.targets);
  for (int q = 0; q < 20; ++q) {
    const Eigen::VectorXd z = test::random_unit(3, rng);
    EXPECT_NEAR(model.predict_raw(z), batch.predict_raw(z), 1e-10);
    EXPECT_NEAR(model.bonus_w(z), batch.bonus_w(z), 1e-10);
  }
}

TEST(Kernel, UpdateLeavesOriginalUntouched) {
  Rng rng(13);
  const Instance in = random_instance(rng, 2, 2, 5);
  const KernelModel model = KernelModel::fit(Kernel::linear(), in.lambda, in.points, in.targets);
  const Eigen::VectorXd probe = test::random_unit(2, rng);
  const double before = model.predict_raw(probe);
  const KernelModel bigger = model.update(test::random_unit(2, rng), 1.0);
  EXPECT_EQ(model.size(), 5u);
  EXPECT_EQ(bigger.size(), 6u);
  EXPECT_EQ(model.predict_raw(probe), before);
}

TEST(Kernel, OneHotRepeatedPointClosedForm) {
  // n copies of one point: f = sum(y) / (n + lambda), w = (n + lambda)^{-1/2}.
  Eigen::VectorXd z = Eigen::VectorXd::Unit(3, 1);
  for (const std::size_t n : {1u, 4u, 9u}) {
    const double lambda = 1.5;
    Points pts(n, z);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 0.0, 1.0);
    const KernelModel m = KernelModel::fit(Kernel::one_hot(), lambda, pts, y);
    EXPECT_NEAR(m.predict_raw(z), y.sum() / (static_cast<double>(n) + lambda), 1e-12);
    EXPECT_NEAR(m.bonus_w(z), 1.0 / std::sqrt(static_cast<double>(n) + lambda), 1e-12);
    EXPECT_NEAR(m.bonus_w(Eigen::VectorXd::Unit(3, 0)), 1.0 / std::sqrt(lambda), 1e-12);
  }
}

TEST(Kernel, EmptyModel) {
  const KernelModel m(Kernel::rbf(1.0), 4.0);
  const Eigen::VectorXd z = Eigen::VectorXd::Unit(2, 0);
  EXPECT_EQ(m.predict_raw(z), 0.0);
  EXPECT_DOUBLE_EQ(m.bonus_w(z), 0.5);
  EXPECT_DOUBLE_EQ(m.bonus_u(z, 3.0, 5.0), 1.5);
  EXPECT_DOUBLE_EQ(m.bonus_u(z, 30.0, 5.0), 5.0);
  EXPECT_THROW(KernelModel(Kernel::linear(), 0.0), PreconditionError);
}

TEST(Kernel, ClipAndBonus) {
  EXPECT_EQ(clip(-1.0, 3.0), 0.0);
  EXPECT_EQ(clip(4.0, 3.0), 3.0);
  EXPECT_EQ(clip(2.5, 3.0), 2.5);
  EXPECT_EQ(ucb_bonus(0.5, 2.0, 3.0), 1.0);
  EXPECT_EQ(ucb_bonus(5.0, 2.0, 3.0), 3.0);
}

TEST(Kernel, WidthNeverGrowsUnderAppend) {
  Rng rng(14);
  const Kernel k = Kernel::rbf(0.8);
  KernelModel model(k, 1.0);
  Points probes;
  for (int i = 0; i < 30; ++i) probes.push_back(test::random_unit(3, rng));
  std::vector<double> last;
  for (const auto& z : probes) last.push_back(model.bonus_w(z));
  for (int t = 0; t < 25; ++t) {
    model = model.update(test::random_unit(3, rng), rng.uniform());
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double w = model.bonus_w(probes[i]);
      EXPECT_LE(w, last[i] + 1e-10);
      last[i] = w;
    }
  }
}

TEST(KernelLearner, MatchesKernelModelOnEmbedding) {
  const EnvShape shape{3, 2, 1, 1};
  EmbeddingSpec spec;
  spec.mode = EmbeddingMode::random_sphere;
  spec.dim = 3;
  spec.seed = 4;
  const auto embedding = std::make_shared<const Embedding>(spec, shape);
  const KernelBackend backend(Kernel::rbf(0.9));
  auto learner = backend.make_learner(embedding, 1.3);
  Rng rng(15);
  Points pts;
  std::vector<double> y;
  for (int t = 0; t < 12; ++t) {
    const std::size_t p = rng.uniform_index(shape.points());
    learner->observe(p);
    pts.emplace_back(embedding->point(p));
    y.push_back(rng.uniform() * 2);
  }
  EXPECT_THROW(learner->predict_raw(0), PreconditionError);
  learner->fit(y);
  const KernelModel model =
      KernelModel::fit(Kernel::rbf(0.9), 1.3, pts, Eigen::Map<const Eigen::VectorXd>(y.data(), 12));
  for (std::size_t p = 0; p < shape.points(); ++p) {
    EXPECT_NEAR(learner->predict_raw(p), model.predict_raw(embedding->point(p)), 1e-10);
    EXPECT_NEAR(learner->width(p), model.bonus_w(embedding->point(p)), 1e-10);
  }
  EXPECT_THROW(learner->observe(shape.points()), IndexError);
  EXPECT_THROW(learner->fit(std::vector<double>(3)), PreconditionError);
}
