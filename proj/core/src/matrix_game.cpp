#include "rfrl/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rfrl/errors.hpp"

namespace rfrl {
namespace {

// Next k-subset of {0..n-1} in lexicographic order.
bool next_subset(std::vector<Eigen::Index>& idx, Eigen::Index n) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

std::vector<Eigen::Index> first_subset(Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  return idx;
}

// Softmax of log-weights into a distribution.
Eigen::VectorXd normalize_logs(const Eigen::VectorXd& logs) {
  Eigen::VectorXd p = (logs.array() - logs.maxCoeff()).exp();
  return p / p.sum();
}

}  // namespace

std::string to_string(SolverPath path) {
  switch (path) {
    case SolverPath::enumeration:
      return "enumeration";
    case SolverPath::iterative:
      return "iterative";
    case SolverPath::fallback_enumeration:
      return "fallback_enumeration";
  }
  return "unknown";
}

double duality_gap(const Eigen::MatrixXd& payoff, const Eigen::VectorXd& row, const Eigen::VectorXd& col) {
  const double best_row = (payoff * col).maxCoeff();
  const double best_col = (payoff.transpose() * row).minCoeff();
  return std::max(best_row - best_col, 0.0);
}

bool enumerate_equilibrium(const Eigen::MatrixXd& payoff, double tolerance, std::size_t budget,
                           MatrixGameSolution& out) {
  const Eigen::Index rows = payoff.rows();
  const Eigen::Index cols = payoff.cols();
  // Shift so every entry is >= 1; the game value is then positive and every
  // square kernel with a nonsingular submatrix has 1^T M^{-1} 1 > 0.
  const Eigen::MatrixXd shifted = payoff.array() + (1.0 - payoff.minCoeff());
  std::size_t tried = 0;
  for (Eigen::Index k = 1; k <= std::min(rows, cols); ++k) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
    auto row_set = first_subset(k);
    do {
      auto col_set = first_subset(k);
      do {
        if (++tried > budget) return false;
        Eigen::MatrixXd sub(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < k; ++j)
            sub(i, j) = shifted(row_set[static_cast<std::size_t>(i)], col_set[static_cast<std::size_t>(j)]);
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd u = lu.solve(ones);
        const Eigen::VectorXd w = sub.transpose().fullPivLu().solve(ones);
        const double total = u.sum();
        if (!(total > 0.0)) continue;
        if (u.minCoeff() < -1e-12 * u.cwiseAbs().maxCoeff() || w.minCoeff() < -1e-12 * w.cwiseAbs().maxCoeff())
          continue;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(rows);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(cols);
        for (Eigen::Index i = 0; i < k; ++i) {
          x[row_set[static_cast<std::size_t>(i)]] = std::max(w[i], 0.0);
          y[col_set[static_cast<std::size_t>(i)]] = std::max(u[i], 0.0);
        }
        if (!(x.sum() > 0.0) || !(y.sum() > 0.0)) continue;
        x /= x.sum();
        y /= y.sum();
        const double gap = duality_gap(payoff, x, y);
        if (gap <= tolerance) {
          out.row = std::move(x);
          out.col = std::move(y);
          out.value = out.row.dot(payoff * out.col);
          out.gap = gap;
          out.tolerance = tolerance;
          return true;
        }
      } while (next_subset(col_set, cols));
    } while (next_subset(row_set, rows));
  }
  return false;
}

MatrixGameSolution solve_matrix_game(const Eigen::MatrixXd& payoff, const MatrixGameOptions& options) {
  if (payoff.rows() == 0 || payoff.cols() == 0) throw PreconditionError("matrix game needs a non-empty payoff");
  if (!payoff.allFinite()) throw DomainError("matrix game payoff has non-finite entries");

  MatrixGameSolution solution;
  const auto smaller = static_cast<std::size_t>(std::min(payoff.rows(), payoff.cols()));
  if (smaller <= options.enumeration_limit) {
    if (enumerate_equilibrium(payoff, options.exact_tolerance, static_cast<std::size_t>(-1), solution)) {
      solution.path = SolverPath::enumeration;
      return solution;
    }
    throw NumericalError("support enumeration found no equilibrium within tolerance");
  }

  const double low = payoff.minCoeff();
  const double range = payoff.maxCoeff() - low;
  if (range == 0.0) {
    solution.row = Eigen::VectorXd::Constant(payoff.rows(), 1.0 / static_cast<double>(payoff.rows()));
    solution.col = Eigen::VectorXd::Constant(payoff.cols(), 1.0 / static_cast<double>(payoff.cols()));
    solution.value = low;
    solution.path = SolverPath::iterative;
    solution.tolerance = options.iterative_tolerance;
    return solution;
  }

  // Optimistic multiplicative weights in self-play on the payoff rescaled to [0, 1].
  const Eigen::MatrixXd scaled = (payoff.array() - low) / range;
  const double target = options.iterative_tolerance / range;
  const double eta = 0.1;
  Eigen::VectorXd log_x = Eigen::VectorXd::Zero(payoff.rows());
  Eigen::VectorXd log_y = Eigen::VectorXd::Zero(payoff.cols());
  Eigen::VectorXd x = normalize_logs(log_x);
  Eigen::VectorXd y = normalize_logs(log_y);
  Eigen::VectorXd gain_prev = scaled * y;
  Eigen::VectorXd loss_prev = scaled.transpose() * x;
  Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(payoff.rows());
  Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(payoff.cols());
  Eigen::VectorXd best_x = x, best_y = y;
  double best_gap = duality_gap(scaled, x, y);
  std::size_t rounds = 0;
  while (rounds < options.max_rounds && best_gap > target) {
    ++rounds;
    const Eigen::VectorXd gain = scaled * y;
    const Eigen::VectorXd loss = scaled.transpose() * x;
    log_x += eta * (2.0 * gain - gain_prev);
    log_y -= eta * (2.0 * loss - loss_prev);
    log_x.array() -= log_x.maxCoeff();
    log_y.array() -= log_y.maxCoeff();
    gain_prev = gain;
    loss_prev = loss;
    x = normalize_logs(log_x);
    y = normalize_logs(log_y);
    sum_x += x;
    sum_y += y;
    if (rounds % 16 == 0) {
      const double last = duality_gap(scaled, x, y);
      if (last < best_gap) {
        best_gap = last;
        best_x = x;
        best_y = y;
      }
      const Eigen::VectorXd avg_x = sum_x / static_cast<double>(rounds);
      const Eigen::VectorXd avg_y = sum_y / static_cast<double>(rounds);
      const double avg = duality_gap(scaled, avg_x, avg_y);
      if (avg < best_gap) {
        best_gap = avg;
        best_x = avg_x;
        best_y = avg_y;
      }
    }
  }
  solution.rounds = rounds;
  if (best_gap <= target) {
    solution.row = best_x;
    solution.col = best_y;
    solution.value = best_x.dot(payoff * best_y);
    solution.gap = duality_gap(payoff, best_x, best_y);
    solution.path = SolverPath::iterative;
    solution.tolerance = options.iterative_tolerance;
    return solution;
  }
  MatrixGameSolution exact;
  if (enumerate_equilibrium(payoff, options.exact_tolerance, options.fallback_budget, exact)) {
    exact.path = SolverPath::fallback_enumeration;
    exact.rounds = rounds;
    return exact;
  }
  solution.row = best_x;
  solution.col = best_y;
  solution.value = best_x.dot(payoff * best_y);
  solution.gap = duality_gap(payoff, best_x, best_y);
  solution.path = SolverPath::iterative;
  solution.tolerance = options.iterative_tolerance;
  return solution;
}

}  // namespace rfrl
