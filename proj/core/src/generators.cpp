#include "rfrl/generators.hpp"

#include <cmath>

#include "rfrl/errors.hpp"

namespace rfrl {
namespace {

// Marsaglia-Tsang for shape >= 1; boosted for shape < 1.
double gamma_draw(Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_draw(rng, shape + 1.0) * std::pow(1.0 - u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

}  // namespace

EnvSpec random_env(const EnvShape& shape, const EmbeddingSpec& embedding, std::uint64_t seed,
                   double dirichlet_alpha, std::size_t initial_state) {
  shape.validate();
  if (!(dirichlet_alpha > 0.0)) throw PreconditionError("Dirichlet concentration must be positive");
  Rng rng(seed, 0);
  const std::size_t rows = shape.horizon * shape.points();
  std::vector<double> transition(rows * shape.states);
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = transition.data() + r * shape.states;
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < shape.states; ++s2) {
      // alpha == 1 reduces to normalized exponentials, the common case.
      row[s2] = dirichlet_alpha == 1.0 ? -std::log(1.0 - rng.uniform()) : gamma_draw(rng, dirichlet_alpha);
      total += row[s2];
    }
    for (std::size_t s2 = 0; s2 < shape.states; ++s2) row[s2] /= total;
    // Put rounding residue on the largest entry so the row sums to one to within an ulp.
    double sum = 0.0;
    std::size_t largest = 0;
    for (std::size_t s2 = 0; s2 < shape.states; ++s2) {
      sum += row[s2];
      if (row[s2] > row[largest]) largest = s2;
    }
    row[largest] += 1.0 - sum;
  }
  return EnvSpec(shape, std::move(transition), initial_state, embedding, seed);
}

RewardTable random_reward(const EnvShape& shape, std::uint64_t seed) {
  shape.validate();
  Rng rng(seed, 1);
  std::vector<double> values(shape.horizon * shape.points());
  for (double& r : values) r = rng.uniform();
  return RewardTable(shape, std::move(values));
}

EnvSpec chain_env(std::size_t states, std::size_t actions, std::size_t horizon, const EmbeddingSpec& embedding) {
  if (actions < 2) throw PreconditionError("chain needs at least two actions");
  const EnvShape shape{states, actions, 1, horizon};
  shape.validate();
  std::vector<double> transition(horizon * shape.points() * states, 0.0);
  for (std::size_t h = 0; h < horizon; ++h)
    for (std::size_t s = 0; s < states; ++s)
      for (std::size_t a = 0; a < actions; ++a) {
        const std::size_t next = a == 1 ? std::min(s + 1, states - 1) : 0;
        transition[(h * shape.points() + shape.point(s, a)) * states + next] = 1.0;
      }
  return EnvSpec(shape, std::move(transition), 0, embedding, 0);
}

}  // namespace rfrl
