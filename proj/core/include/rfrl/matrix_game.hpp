#pragma once

// Zero-sum matrix games max_x min_y x^T M y.

#include <Eigen/Dense>
#include <string>

namespace rfrl {

struct MatrixGameOptions {
  /// Acceptance threshold on the duality gap of an enumerated equilibrium.
  double exact_tolerance = 1e-8;
  /// Duality gap certified by the iterative solver.
  double iterative_tolerance = 1e-4;
  std::size_t max_rounds = 100000;
  /// Support enumeration is used while min(rows, cols) <= this.
  std::size_t enumeration_limit = 4;
  /// Upper bound on square subsets tried by the enumeration fallback.
  std::size_t fallback_budget = 5000000;
};

enum class SolverPath { enumeration, iterative, fallback_enumeration };

std::string to_string(SolverPath path);

struct MatrixGameSolution {
  Eigen::VectorXd row;  // maximizer x
  Eigen::VectorXd col;  // minimizer y
  double value = 0.0;   // x^T M y
  /// max_i (M y)_i - min_j (x^T M)_j, always >= 0.
  double gap = 0.0;
  SolverPath path = SolverPath::enumeration;
  double tolerance = 0.0;
  std::size_t rounds = 0;
};

MatrixGameSolution solve_matrix_game(const Eigen::MatrixXd& payoff, const MatrixGameOptions& options = {});

double duality_gap(const Eigen::MatrixXd& payoff, const Eigen::VectorXd& row, const Eigen::VectorXd& col);

/// Square-support enumeration. Returns false when no support yields a
/// certificate within `tolerance` (or the subset budget runs out).
bool enumerate_equilibrium(const Eigen::MatrixXd& payoff, double tolerance, std::size_t budget,
                           MatrixGameSolution& out);

}  // namespace rfrl
