// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale SDP solver for the Gram relaxation, built on an augmented
// Lagrangian of the dual (boundary point scheme): every iteration solves a
// fixed, pre-factorized linear system for the multipliers, projects onto the
// PSD cone, and recovers the primal iterate from the Moreau decomposition of
// the projected matrix. Entrywise nonnegativity rows are handled by a
// dedicated dual block instead of linear-system rows, and the remaining
// inequality rows carry slack variables, so the factored system stays at
// roughly n^2/2 rows for n links.
//
// The returned iterate is PSD by construction (up to eigensolver noise);
// convergence is declared once constraint violations, the dual residual and
// the primal-dual gap all fall below tol_residual and the objective has
// stalled for stall_window iterations.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "sinrcap/sdp_model.hpp"

namespace sinrcap {

struct SolverConfig {
  double tol_residual = 1e-6;  // max permitted (row-normalized) constraint violation
  double tol_psd = 1e-7;       // permitted eigenvalue floor on X
  int max_iterations = 50000;
  int stall_window = 500;  // iterations of objective change < tol before convergence

  void validate() const {
    if (!(tol_residual > 0.0) || !(tol_psd > 0.0))
      throw std::invalid_argument("solver config: tolerances must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("solver config: max_iterations >= 1");
    if (stall_window < 1) throw std::invalid_argument("solver config: stall_window >= 1");
  }
};

struct PsdSplit {
  Matrix positive;  // nearest PSD matrix
  Matrix negative;  // PSD; input = positive - negative
};

// Eigendecompose once and split into the projections onto the PSD cone and
// its polar. Input must be symmetric and finite.
inline PsdSplit psd_split(const Matrix& M) {
  if (!M.allFinite()) throw std::invalid_argument("psd_split: input has non-finite entries");
  if (M.rows() != M.cols()) throw std::invalid_argument("psd_split: input must be square");
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("psd_split: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const Matrix& V = eig.eigenvectors();
  PsdSplit split;
  split.positive = V * lambda.cwiseMax(0.0).asDiagonal() * V.transpose();
  split.positive = 0.5 * (split.positive + split.positive.transpose()).eval();
  split.negative = split.positive - sym;
  split.negative = 0.5 * (split.negative + split.negative.transpose()).eval();
  return split;
}

// Nearest PSD matrix in Frobenius norm: clamp negative eigenvalues to zero.
inline Matrix project_psd(const Matrix& M) { return psd_split(M).positive; }

namespace detail {

// One general row of the normalized system: coefficients scaled so the
// symmetric matrix has unit Frobenius norm; inequality rows own a slack.
struct SolverRow {
  std::vector<SparseSym::Entry> entries;
  double bound = 0.0;
  bool inequality = false;
  int slack = -1;  // index into the slack vector, -1 for equalities
};

struct CompiledModel {
  int dim = 0;
  Matrix cost;                        // dense C
  std::vector<SolverRow> rows;        // general rows (SINR, pair lower, diagonal)
  int n_slack = 0;
  std::vector<std::pair<int, int>> mask;  // entrywise X_{ij} >= 0 cells (i < j)
  Eigen::LLT<Matrix> llt;             // factorization of A A^T
};

inline double row_inner(const SolverRow& row, const Matrix& X) {
  double total = 0.0;
  for (const auto& e : row.entries) total += (e.i == e.j ? 1.0 : 2.0) * e.coef * X(e.i, e.j);
  return total;
}

inline CompiledModel compile(const GramSDP& sdp) {
  CompiledModel model;
  model.dim = sdp.dim;
  model.cost = Matrix::Zero(sdp.dim, sdp.dim);
  for (const auto& e : sdp.cost.entries) {
    model.cost(e.i, e.j) += e.coef;
    if (e.i != e.j) model.cost(e.j, e.i) += e.coef;
  }

  for (const Constraint& c : sdp.constraints) {
    // Single positive off-diagonal entry with zero bound: a pure
    // entrywise nonnegativity row, handled by the entrywise dual block.
    if (c.relation == Relation::kGe && c.bound == 0.0 && c.matrix.entries.size() == 1 &&
        c.matrix.entries[0].i != c.matrix.entries[0].j && c.matrix.entries[0].coef > 0.0) {
      model.mask.emplace_back(c.matrix.entries[0].i, c.matrix.entries[0].j);
      continue;
    }
    const double norm = c.matrix.frob_norm();
    if (norm == 0.0) {
      // Constant row; the model never produces an unsatisfiable one.
      if ((c.relation == Relation::kGe && c.bound > 0.0) ||
          (c.relation == Relation::kEq && c.bound != 0.0))
        throw std::invalid_argument("solve: constraint with empty matrix and nonzero bound");
      continue;
    }
    SolverRow row;
    row.entries = c.matrix.entries;
    for (auto& e : row.entries) e.coef /= norm;
    row.bound = c.bound / norm;
    row.inequality = c.relation == Relation::kGe;
    if (row.inequality) row.slack = model.n_slack++;
    model.rows.push_back(std::move(row));
  }
  std::sort(model.mask.begin(), model.mask.end());
  model.mask.erase(std::unique(model.mask.begin(), model.mask.end()), model.mask.end());

  // Gram matrix of the rows (including slack coordinates) for the y-solve.
  const int m = static_cast<int>(model.rows.size());
  Matrix gram = Matrix::Zero(m, m);
  std::vector<std::vector<std::pair<int, double>>> cell(
      static_cast<std::size_t>(model.dim) * model.dim);
  for (int r = 0; r < m; ++r) {
    for (const auto& e : model.rows[r].entries)
      cell[static_cast<std::size_t>(e.i) * model.dim + e.j].emplace_back(r, e.coef);
  }
  for (std::size_t idx = 0; idx < cell.size(); ++idx) {
    const auto& list = cell[idx];
    if (list.empty()) continue;
    const bool diagonal = idx / model.dim == idx % model.dim;
    const double mult = diagonal ? 1.0 : 2.0;
    for (const auto& [r1, c1] : list) {
      for (const auto& [r2, c2] : list) gram(r1, r2) += mult * c1 * c2;
    }
  }
  for (int r = 0; r < m; ++r) {
    if (model.rows[r].inequality) gram(r, r) += 1.0;
  }
  model.llt.compute(gram);
  if (model.llt.info() != Eigen::Success)
    throw std::runtime_error("solve: failed to factorize the constraint Gram matrix");
  return model;
}

}  // namespace detail

inline GramSolution solve(const GramSDP& sdp, const SolverConfig& config = {},
                          std::ostream* trace = nullptr) {
  config.validate();
  if (sdp.dim < 1) throw std::invalid_argument("solve: model has no reference column");
  const detail::CompiledModel model = detail::compile(sdp);
  const int dim = model.dim;
  const int m = static_cast<int>(model.rows.size());

  // The identity (with matching slacks) satisfies the whole inequality
  // system for this model family; anything else is a malformed model.
  {
    const Matrix eye = Matrix::Identity(dim, dim);
    for (const auto& row : model.rows) {
      const double value = detail::row_inner(row, eye);
      const bool ok = row.inequality ? value >= row.bound - 1e-12
                                     : std::abs(value - row.bound) <= 1e-12;
      if (!ok)
        throw std::invalid_argument("solve: identity start is infeasible; unsupported model");
    }
  }

  Matrix X = Matrix::Identity(dim, dim);
  Vector slack(model.n_slack);
  for (const auto& row : model.rows) {
    if (row.inequality) slack[row.slack] = detail::row_inner(row, X) - row.bound;
  }
  Matrix Z = Matrix::Zero(dim, dim);
  Matrix Smat = Matrix::Zero(dim, dim);
  Vector zslack = Vector::Zero(model.n_slack);
  Vector y = Vector::Zero(m);

  Vector bounds(m);
  for (int r = 0; r < m; ++r) bounds[r] = model.rows[r].bound;
  const double bnorm = 1.0 + bounds.norm();
  const double cnorm = 1.0 + model.cost.norm();

  double sigma = 1.0;
  constexpr double kSigmaGrow = 1.07;
  constexpr double kSigmaRatio = 8.0;
  constexpr double kSigmaMin = 1e-8;
  constexpr double kSigmaMax = 1e8;

  Matrix T(dim, dim), U(dim, dim), W(dim, dim);
  Vector rhs(m);

  double objective = 0.0;
  double prev_objective = 0.0;
  int stall = 0;
  bool converged = false;
  int iterations = 0;

  if (trace) *trace << "iteration,objective,max_residual,min_eigenvalue\n";

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    iterations = iter;

    // Multiplier solve: (A A^T) y = A(C + Z + S + X/sigma) - b/sigma,
    // with the slack coordinates folded in.
    T.noalias() = model.cost + Z + Smat;
    T += X / sigma;
    for (int r = 0; r < m; ++r) {
      const auto& row = model.rows[r];
      double value = detail::row_inner(row, T);
      if (row.inequality) value -= zslack[row.slack] + slack[row.slack] / sigma;
      rhs[r] = value - row.bound / sigma;
    }
    y = model.llt.solve(rhs);

    // U = A^T(y) on the matrix block.
    U.setZero();
    for (int r = 0; r < m; ++r) {
      const double yr = y[r];
      for (const auto& e : model.rows[r].entries) {
        U(e.i, e.j) += yr * e.coef;
        if (e.i != e.j) U(e.j, e.i) += yr * e.coef;
      }
    }

    // Entrywise dual block on the masked cells.
    W.noalias() = U - model.cost - Z;
    W -= X / sigma;
    Smat.setZero();
    for (const auto& [i, j] : model.mask) {
      const double value = std::max(0.0, W(i, j));
      Smat(i, j) = Smat(j, i) = value;
    }

    // PSD split of W = A^T(y) - C - S - X/sigma gives the new dual matrix
    // (positive part) and primal iterate (sigma times the flipped negative
    // part), complementary by construction.
    W.noalias() = U - model.cost - Smat;
    W -= X / sigma;
    const PsdSplit split = psd_split(W);
    const double dual_delta_x = (sigma * split.negative - X).norm();
    Z = split.positive;
    X = sigma * split.negative;

    double dual_delta_s = 0.0;
    for (int r = 0; r < m; ++r) {
      const auto& row = model.rows[r];
      if (!row.inequality) continue;
      const double w = -y[r] - slack[row.slack] / sigma;
      const double fresh = -sigma * std::min(0.0, w);
      dual_delta_s += (fresh - slack[row.slack]) * (fresh - slack[row.slack]);
      zslack[row.slack] = std::max(0.0, w);
      slack[row.slack] = fresh;
    }

    // Residuals. Primal feasibility is measured directly on the model.
    double max_viol = 0.0;
    double slack_res_sq = 0.0;
    for (int r = 0; r < m; ++r) {
      const auto& row = model.rows[r];
      const double value = detail::row_inner(row, X);
      const double direct = row.inequality ? std::max(0.0, row.bound - value)
                                           : std::abs(value - row.bound);
      max_viol = std::max(max_viol, direct);
      const double with_slack =
          row.inequality ? value - slack[row.slack] - row.bound : value - row.bound;
      slack_res_sq += with_slack * with_slack;
    }
    for (const auto& [i, j] : model.mask)
      max_viol = std::max(max_viol, std::sqrt(2.0) * std::max(0.0, -X(i, j)));
    const double primal_rel = std::sqrt(slack_res_sq) / bnorm;
    const double dual_rel =
        std::sqrt(dual_delta_x * dual_delta_x + dual_delta_s) / (sigma * cnorm);

    objective = (model.cost.array() * X.array()).sum();
    const double dual_obj = bounds.dot(y);
    const double rel_gap =
        std::abs(objective - dual_obj) / (1.0 + std::abs(objective) + std::abs(dual_obj));

    if (std::abs(objective - prev_objective) < config.tol_residual * (1.0 + std::abs(objective)))
      ++stall;
    else
      stall = 0;
    prev_objective = objective;

    if (trace) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(X, Eigen::EigenvaluesOnly);
      *trace << iter << ',' << detail::fmt_double(objective) << ','
             << detail::fmt_double(std::max(max_viol, primal_rel)) << ','
             << detail::fmt_double(eig.eigenvalues().minCoeff()) << '\n';
    }

    if (max_viol <= config.tol_residual && primal_rel <= config.tol_residual &&
        dual_rel <= config.tol_residual && rel_gap <= config.tol_residual &&
        stall >= config.stall_window) {
      converged = true;
      break;
    }

    if (dual_rel > kSigmaRatio * primal_rel)
      sigma = std::min(sigma * kSigmaGrow, kSigmaMax);
    else if (primal_rel > kSigmaRatio * dual_rel)
      sigma = std::max(sigma / kSigmaGrow, kSigmaMin);
  }

  GramSolution sol;
  sol.X = X;
  sol.objective = (model.cost.array() * X.array()).sum();
  sol.iterations = iterations;
  sol.converged = converged;
  sol.residuals = check_solution(X, sdp, config.tol_residual);
  return sol;
}

}  // namespace sinrcap
