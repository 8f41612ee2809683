// SPDX-License-Identifier: Apache-2.0
//
// Gram-matrix relaxation of the capacity problem. The variable is a
// symmetric PSD matrix X of side dim = 1 + (number of modeled links);
// column 0 is the reference direction, X_{0v} the fractional extent to
// which link v is selected. For n modeled links the constraint census is
//   n     SINR rows      X_{0v} g_vv - beta * sum_{w != v} X_{vw} g_vw >= 0
//   n     nonnegativity  X_{0v} >= 0
//   n(n-1)/2 pairwise    X_{vw} >= 0
//   n(n-1)/2 pairwise    X_{vw} >= X_{0v} + X_{0w} - 1
//   n + 1 diagonal       X_{ii} = 1
// Links whose self-coefficient g_vv is negative can never be feasible and
// are left out of the model entirely; `links` maps matrix columns back to
// original link indices.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinrcap/instance.hpp"

namespace sinrcap {

enum class Relation { kGe, kEq };

enum class ConstraintKind : int {
  kSinr = 0,
  kLinkNonNeg,   // X_{0v} >= 0
  kPairNonNeg,   // X_{vw} >= 0
  kPairLower,    // X_{vw} >= X_{0v} + X_{0w} - 1
  kDiagOne,      // X_{ii} = 1
};
inline constexpr int kConstraintKindCount = 5;

inline const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kSinr: return "sinr";
    case ConstraintKind::kLinkNonNeg: return "link_nonneg";
    case ConstraintKind::kPairNonNeg: return "pair_nonneg";
    case ConstraintKind::kPairLower: return "pair_lower";
    case ConstraintKind::kDiagOne: return "diag_one";
  }
  return "?";
}

// Symmetric matrix stored as upper-triangle entries (i <= j).
struct SparseSym {
  struct Entry {
    int i = 0;
    int j = 0;
    double coef = 0.0;
  };
  std::vector<Entry> entries;

  void add(int i, int j, double coef) {
    if (i > j) std::swap(i, j);
    entries.push_back({i, j, coef});
  }

  // <A, X> with the off-diagonal entries counted twice (A is symmetric).
  double inner(const Matrix& X) const {
    double total = 0.0;
    for (const Entry& e : entries) total += (e.i == e.j ? 1.0 : 2.0) * e.coef * X(e.i, e.j);
    return total;
  }

  double frob_norm() const {
    double sq = 0.0;
    for (const Entry& e : entries) sq += (e.i == e.j ? 1.0 : 2.0) * e.coef * e.coef;
    return std::sqrt(sq);
  }
};

struct Constraint {
  ConstraintKind kind = ConstraintKind::kSinr;
  Relation relation = Relation::kGe;
  double bound = 0.0;
  SparseSym matrix;

  // Violation of <A,X> (rel) bound, normalized by the row's Frobenius norm
  // so the tolerance is dimensionless.
  double violation(const Matrix& X) const {
    const double value = matrix.inner(X);
    const double raw = relation == Relation::kEq ? std::abs(value - bound)
                                                 : std::max(0.0, bound - value);
    return raw == 0.0 ? 0.0 : raw / matrix.frob_norm();
  }
};

struct GramSDP {
  int dim = 0;             // 1 + modeled links
  std::vector<int> links;  // original link index of matrix column 1 + k
  SparseSym cost;          // <C, X> = sum_v X_{0v}
  std::vector<Constraint> constraints;
  bool psd_required = true;

  int n_modeled() const { return dim - 1; }
};

struct ResidualReport {
  double max_violation = 0.0;  // over all constraints, row-normalized
  std::array<double, kConstraintKindCount> class_violation{};  // max per class
  double min_eigenvalue = 0.0;
  bool passed = false;  // set by check_solution against its tol argument

  bool passes(double tol) const { return max_violation <= tol && min_eigenvalue >= -tol; }
};

struct GramSolution {
  Matrix X;
  double objective = 0.0;  // <C, X> of the stored X
  ResidualReport residuals;
  int iterations = 0;
  bool converged = false;
};

// Builds the relaxation over the links with g_vv >= 0. Constraint order:
// SINR rows (ascending link), link nonnegativity, pairwise nonnegativity
// (lexicographic pairs), pairwise lower bounds, diagonal equalities.
inline GramSDP build_relaxation(const EffectiveCoeffs& coeffs, double beta) {
  GramSDP sdp;
  for (int v = 0; v < coeffs.n; ++v) {
    if (!coeffs.never_feasible(v)) sdp.links.push_back(v);
  }
  const int k = static_cast<int>(sdp.links.size());
  sdp.dim = k + 1;

  for (int a = 1; a <= k; ++a) sdp.cost.add(0, a, 0.5);

  for (int a = 1; a <= k; ++a) {
    const int v = sdp.links[a - 1];
    Constraint row;
    row.kind = ConstraintKind::kSinr;
    row.relation = Relation::kGe;
    row.bound = 0.0;
    row.matrix.add(0, a, coeffs.g(v, v) / 2.0);
    for (int b = 1; b <= k; ++b) {
      if (b == a) continue;
      row.matrix.add(a, b, -beta * coeffs.g(v, sdp.links[b - 1]) / 2.0);
    }
    sdp.constraints.push_back(std::move(row));
  }
  for (int a = 1; a <= k; ++a) {
    Constraint row;
    row.kind = ConstraintKind::kLinkNonNeg;
    row.relation = Relation::kGe;
    row.bound = 0.0;
    row.matrix.add(0, a, 0.5);
    sdp.constraints.push_back(std::move(row));
  }
  for (int a = 1; a <= k; ++a) {
    for (int b = a + 1; b <= k; ++b) {
      Constraint row;
      row.kind = ConstraintKind::kPairNonNeg;
      row.relation = Relation::kGe;
      row.bound = 0.0;
      row.matrix.add(a, b, 0.5);
      sdp.constraints.push_back(std::move(row));
    }
  }
  for (int a = 1; a <= k; ++a) {
    for (int b = a + 1; b <= k; ++b) {
      Constraint row;
      row.kind = ConstraintKind::kPairLower;
      row.relation = Relation::kGe;
      row.bound = -1.0;
      row.matrix.add(a, b, 0.5);
      row.matrix.add(0, a, -0.5);
      row.matrix.add(0, b, -0.5);
      sdp.constraints.push_back(std::move(row));
    }
  }
  for (int i = 0; i < sdp.dim; ++i) {
    Constraint row;
    row.kind = ConstraintKind::kDiagOne;
    row.relation = Relation::kEq;
    row.bound = 1.0;
    row.matrix.add(i, i, 1.0);
    sdp.constraints.push_back(std::move(row));
  }
  return sdp;
}

// Gram matrix of the integral assignment: the reference vector and every
// selected link share one unit vector, every unselected link gets its own
// orthogonal unit vector. Entries are exactly 0 or 1; objective is |S|.
// S need not be feasible.
inline GramSolution embed_integral(const IndexSet& S, int n) {
  for (int v : S) {
    if (v < 0 || v >= n) throw std::invalid_argument("embed_integral: link index out of range");
  }
  GramSolution sol;
  sol.X = Matrix::Identity(n + 1, n + 1);
  for (int v : S) {
    sol.X(0, v + 1) = sol.X(v + 1, 0) = 1.0;
    for (int w : S) {
      if (w != v) sol.X(v + 1, w + 1) = 1.0;
    }
  }
  sol.objective = static_cast<double>(S.size());
  sol.converged = true;
  sol.residuals.min_eigenvalue = 0.0;
  return sol;
}

// Evaluates every constraint of the model against X and the smallest
// eigenvalue of X. Violations are row-normalized (see Constraint::violation).
inline ResidualReport check_solution(const Matrix& X, const GramSDP& sdp, double tol) {
  if (X.rows() != sdp.dim || X.cols() != sdp.dim)
    throw std::invalid_argument("check_solution: X dimension does not match the model");
  ResidualReport report;
  for (const Constraint& c : sdp.constraints) {
    const double viol = c.violation(X);
    auto& slot = report.class_violation[static_cast<int>(c.kind)];
    slot = std::max(slot, viol);
    report.max_violation = std::max(report.max_violation, viol);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(X, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues().minCoeff();
  report.passed = report.passes(tol);
  return report;
}

namespace detail {

// Shortest round-trip decimal form.
inline std::string fmt_double(double value) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

}  // namespace detail

// Plain-text export for cross-checking against external solvers. Layout:
//   gramsdp 1
//   dim <dim>
//   objective <i,j,coef> ...
//   constraint <kind> <ge|eq> <bound> <i,j,coef> ...
// Symmetric matrices list upper-triangle entries only.
inline void export_sdp(const GramSDP& sdp, std::ostream& out) {
  out << "gramsdp 1\n";
  out << "dim " << sdp.dim << '\n';
  out << "objective";
  for (const auto& e : sdp.cost.entries)
    out << ' ' << e.i << ',' << e.j << ',' << detail::fmt_double(e.coef);
  out << '\n';
  for (const Constraint& c : sdp.constraints) {
    out << "constraint " << to_string(c.kind) << ' '
        << (c.relation == Relation::kGe ? "ge" : "eq") << ' ' << detail::fmt_double(c.bound);
    for (const auto& e : c.matrix.entries)
      out << ' ' << e.i << ',' << e.j << ',' << detail::fmt_double(e.coef);
    out << '\n';
  }
}

}  // namespace sinrcap
