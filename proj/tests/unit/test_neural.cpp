#include <gtest/gtest.h>

#include <cmath>

#include "rfrl/approximator.hpp"
#include "rfrl/errors.hpp"
#include "rfrl/neural.hpp"
#include "test_support.hpp"

using namespace rfrl;

namespace {

NeuralModel perturbed(const NeuralModel& model, double scale, Rng& rng) {
  Eigen::MatrixXd w = model.initial_weights();
  for (auto& x : w.reshaped()) x += scale * rng.normal();
  return model.with_weights(w);
}

double min_margin(const NeuralModel& model, const Eigen::VectorXd& z) {
  return (model.weights() * z).cwiseAbs().minCoeff();
}

// Dense primal width sqrt(phi^T (lambda I + sum phi_t phi_t^T)^{-1} phi).
double primal_width(const NeuralModel& features, const Points& pts, const Eigen::VectorXd& z, double lambda) {
  const auto p = static_cast<Eigen::Index>(features.parameters());
  Eigen::MatrixXd lam = lambda * Eigen::MatrixXd::Identity(p, p);
  for (const auto& x : pts) {
    const Eigen::VectorXd g = features.grad_feature(x);
    lam += g * g.transpose();
  }
  const Eigen::VectorXd g = features.grad_feature(z);
  return std::sqrt(g.dot(lam.ldlt().solve(g)));
}

}  // namespace

TEST(Neural, MirroredInitGivesZeroOutput) {
  Rng rng(1);
  const NeuralModel model = NeuralModel::init(64, 5, rng);
  EXPECT_EQ(model.width(), 128u);
  for (Eigen::Index i = 0; i < 64; ++i) {
    EXPECT_EQ(model.signs()[i], -model.signs()[i + 64]);
    EXPECT_EQ(model.initial_weights().row(i), model.initial_weights().row(i + 64));
  }
  for (int q = 0; q < 200; ++q) EXPECT_LE(std::abs(model.forward(test::random_unit(5, rng))), 1e-12);
}

TEST(Neural, RejectsNonUnitInput) {
  Rng rng(2);
  const NeuralModel model = NeuralModel::init(4, 3, rng);
  EXPECT_THROW(model.forward(Eigen::VectorXd::Ones(3)), DomainError);
  EXPECT_THROW(model.grad_feature(Eigen::VectorXd::Zero(3)), DomainError);
}

TEST(Neural, GradFeatureMatchesFiniteDifferences) {
  Rng rng(3);
  for (const std::size_t m : {8u, 64u}) {
    const NeuralModel base = NeuralModel::init(m, 4, rng);
    const NeuralModel model = perturbed(base, 0.3, rng);
    const double h = 1e-5;
    int checked = 0;
    while (checked < 20) {
      const Eigen::VectorXd z = test::random_unit(4, rng);
      if (min_margin(model, z) < 1e-3) continue;
      ++checked;
      const Eigen::VectorXd phi = model.grad_feature(z);
      const Eigen::VectorXd flat = model.flat_weights();
      Eigen::VectorXd fd(flat.size());
      for (Eigen::Index j = 0; j < flat.size(); ++j) {
        Eigen::VectorXd up = flat, down = flat;
        up[j] += h;
        down[j] -= h;
        const auto reshape = [&](const Eigen::VectorXd& v) {
          return Eigen::MatrixXd(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
              v.data(), model.weights().rows(), model.weights().cols()));
        };
        fd[j] = (model.with_weights(reshape(up)).forward(z) - model.with_weights(reshape(down)).forward(z)) / (2 * h);
      }
      EXPECT_LE((phi - fd).norm(), 1e-6 * std::max(1.0, phi.norm()));
    }
  }
}

TEST(Neural, LinearizationIsInnerProductWithInitialFeatures) {
  Rng rng(4);
  const NeuralModel base = NeuralModel::init(16, 3, rng);
  const NeuralModel model = perturbed(base, 0.05, rng);
  for (int q = 0; q < 20; ++q) {
    const Eigen::VectorXd z = test::random_unit(3, rng);
    const double expected = base.grad_feature(z).dot(model.flat_weights() - base.flat_weights());
    EXPECT_NEAR(model.linearized(z), expected, 1e-12);
  }
}

TEST(Neural, GradientDescentDecreasesObjective) {
  Rng rng(5);
  const NeuralModel model = NeuralModel::init(32, 3, rng);
  Points pts;
  std::vector<double> y;
  for (int t = 0; t < 10; ++t) {
    pts.push_back(test::random_unit(3, rng));
    y.push_back(rng.uniform() * 3);
  }
  GdTrace trace;
  const NeuralModel fit = fit_gd(model, pts, y, 0.5, {}, &trace);
  ASSERT_GE(trace.objective.size(), 2u);
  for (std::size_t i = 1; i < trace.objective.size(); ++i) EXPECT_LE(trace.objective[i], trace.objective[i - 1]);
  EXPECT_NEAR(fit.objective(pts, y, 0.5), trace.objective.back(), 1e-9);
  EXPECT_LT(trace.objective.back(), model.objective(pts, y, 0.5));
}

TEST(Neural, WideNetworkApproachesLinearizedOptimum) {
  // With features fixed at W0, the ridge problem has optimum lambda y^T (lambda I + G0)^{-1} y.
  Rng rng(6);
  const double lambda = 1.0;
  Points pts;
  std::vector<double> y;
  for (int t = 0; t < 6; ++t) {
    pts.push_back(test::random_unit(4, rng));
    y.push_back(rng.uniform());
  }
  const NeuralModel model = NeuralModel::init(1024, 4, rng);
  Eigen::MatrixXd g0(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g0(i, j) = model.grad_feature(pts[i]).dot(model.grad_feature(pts[j]));
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), 6);
  Eigen::MatrixXd system = g0;
  system.diagonal().array() += lambda;
  const double linear_optimum = lambda * yv.dot(system.ldlt().solve(yv));
  const NeuralModel fit = fit_gd(model, pts, y, lambda);
  EXPECT_NEAR(fit.objective(pts, y, lambda), linear_optimum, 0.05 * linear_optimum);
}

TEST(NeuralBonus, DualWidthMatchesDensePrimal) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const NeuralModel model = perturbed(NeuralModel::init(4, 3, rng), 0.2, rng);
    Points pts;
    for (int t = 0; t < 7; ++t) pts.push_back(test::random_unit(3, rng));
    const double lambda = 0.3 + rng.uniform();
    const NeuralBonus bonus(model, pts, lambda);
    for (int q = 0; q < 10; ++q) {
      const Eigen::VectorXd z = test::random_unit(3, rng);
      EXPECT_NEAR(bonus.width(z), primal_width(model, pts, z, lambda), 1e-10);
    }
    Eigen::MatrixXd gram(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) gram(i, j) = model.grad_feature(pts[i]).dot(model.grad_feature(pts[j]));
    const Eigen::MatrixXd scaled = Eigen::MatrixXd::Identity(7, 7) + gram / lambda;
    EXPECT_NEAR(bonus.info_gain(), 0.5 * std::log(scaled.determinant()), 1e-10);
  }
}

TEST(NeuralBonus, EmptyDataWidth) {
  Rng rng(8);
  const NeuralModel model = NeuralModel::init(8, 3, rng);
  const NeuralBonus bonus(model, {}, 2.0);
  const Eigen::VectorXd z = test::random_unit(3, rng);
  EXPECT_NEAR(bonus.width(z), model.grad_feature(z).norm() / std::sqrt(2.0), 1e-14);
  EXPECT_EQ(bonus.info_gain(), 0.0);
}

TEST(NeuralLearner, SharedInitializationAcrossLearners) {
  const EnvShape shape{2, 2, 1, 1};
  EmbeddingSpec spec;
  spec.mode = EmbeddingMode::random_sphere;
  spec.dim = 3;
  const auto embedding = std::make_shared<const Embedding>(spec, shape);
  NeuralBackendConfig config;
  config.half_width = 16;
  config.init_seed = 3;
  const NeuralBackend backend(config);
  auto a = backend.make_learner(embedding, 1.0);
  auto b = backend.make_learner(embedding, 1.0);
  for (auto* l : {a.get(), b.get()}) {
    l->observe(0);
    l->observe(3);
    l->fit(std::vector<double>{1.0, 0.5});
  }
  for (std::size_t p = 0; p < shape.points(); ++p) {
    EXPECT_EQ(a->predict_raw(p), b->predict_raw(p));
    EXPECT_EQ(a->width(p), b->width(p));
  }
  spec.normalize = false;
  spec.mode = EmbeddingMode::user_matrix;
  spec.user_rows = Eigen::MatrixXd::Ones(4, 3);
  EXPECT_THROW(backend.make_learner(std::make_shared<const Embedding>(spec, shape), 1.0), DomainError);
}
