#include <benchmark/benchmark.h>

#include "rfrl/approximator.hpp"
#include "rfrl/explore.hpp"
#include "rfrl/generators.hpp"
#include "rfrl/kernel.hpp"
#include "rfrl/matrix_game.hpp"
#include "rfrl/neural.hpp"

using namespace rfrl;

namespace {

Eigen::VectorXd unit(Eigen::Index d, Rng& rng) {
  Eigen::VectorXd z(d);
  for (auto& x : z) x = rng.normal();
  return z / z.norm();
}

void BM_GramAppend(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  Points pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(unit(8, rng));
  for (auto _ : state) {
    GramCholesky factor(Kernel::rbf(1.0), 1.0);
    factor.reserve(n);
    for (const auto& z : pts) factor.append(z);
    benchmark::DoNotOptimize(factor.log_det());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_GramAppend)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_KernelLearnerRefit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const EnvShape shape{5, 3, 1, 5};
  const EnvSpec env = random_env(shape, {}, 2);
  auto learner = KernelBackend(Kernel::one_hot()).make_learner(env.domain().embedding, 1.0, n);
  Rng rng(3);
  std::vector<double> targets;
  for (std::size_t i = 0; i < n; ++i) {
    learner->observe(rng.uniform_index(shape.points()));
    targets.push_back(rng.uniform());
  }
  for (auto _ : state) {
    learner->fit(targets);
    benchmark::DoNotOptimize(learner->predict_raw(0));
  }
}
BENCHMARK(BM_KernelLearnerRefit)->RangeMultiplier(4)->Range(64, 1024);

void BM_NeuralFit(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const NeuralModel model = NeuralModel::init(m, 4, rng);
  Points pts;
  std::vector<double> y;
  for (int i = 0; i < 16; ++i) {
    pts.push_back(unit(4, rng));
    y.push_back(rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_gd(model, pts, y, 1.0).objective(pts, y, 1.0));
}
BENCHMARK(BM_NeuralFit)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MatrixGame(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(5);
  Eigen::MatrixXd m(n, n);
  for (auto& x : m.reshaped()) x = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(solve_matrix_game(m).value);
}
BENCHMARK(BM_MatrixGame)->Arg(2)->Arg(4)->Arg(8);

void BM_Explore(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const EnvShape shape{5, 3, 1, 5};
  const EnvSpec env = random_env(shape, {}, 6);
  const KernelBackend backend(Kernel::one_hot());
  for (auto _ : state) {
    Rng rng(7);
    benchmark::DoNotOptimize(explore(env, backend, {k, 10.0, 1.0}, rng).log.back().initial_value);
  }
}
BENCHMARK(BM_Explore)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
