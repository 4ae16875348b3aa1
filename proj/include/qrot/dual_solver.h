#ifndef QROT_DUAL_SOLVER_H_
#define QROT_DUAL_SOLVER_H_

// Exact cyclic coordinate ascent on the (rescaled) dual problem.
//
// With g fixed, the marginal equation of row i,
//   sum_j nu_tilde_j (t + g_j - c_ij)_+ = epsilon * mu_i / mu_tilde_i,
// is a continuous piecewise-linear nondecreasing function of t that is
// strictly increasing where positive, so it has exactly one root. Each update
// solves it in closed form and maximizes the concave dual in that coordinate.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qrot/core_model.h"

namespace qrot {

enum class Normalization {
  kAnchorFirstComponentZero,  // f_0 = 0
  kMeanZeroF,                 // sum_i mu_i f_i = 0
  kNone,
};

const char* to_string(Normalization n);
Normalization parse_normalization(std::string_view name);

struct SolverConfig {
  double tol_residual = 1e-10;
  long max_sweeps = 100000;
  Normalization normalization = Normalization::kAnchorFirstComponentZero;
  bool check_monotone = true;
};

// sum_j weights_j * (t - thresholds_j)_+ = target
struct RowEquation {
  std::vector<double> thresholds;
  std::vector<double> weights;
  double target = 0.0;
};

double solve_row_equation(const RowEquation& eq);

// Same equation on caller-owned scratch; `order` is reordered in place.
double solve_row_equation(std::span<const double> thresholds,
                          std::span<const double> weights, double target,
                          std::vector<int>& order);

// One exact f-update per row with g held fixed (and vice versa).
void row_pass(const Instance& inst, Potentials& p);
void column_pass(const Instance& inst, Potentials& p);

// Full Gauss-Seidel cycle: all rows, then all columns.
Potentials sweep(const Instance& inst, const Potentials& p);

// Symmetric mode: one exact update of each f_i against the diagonal-aware
// equation sum_{j != i} mu_tilde_j (f_i + f_j - c_ij)_+
//                + mu_tilde_i (2 f_i - c_ii)_+ = epsilon mu_i / mu_tilde_i.
void symmetric_pass(const Instance& inst, Vector& f);

Potentials normalize(const Instance& inst, const Potentials& p,
                     Normalization mode);

std::pair<Potentials, SolveReport> solve(
    const Instance& inst, const SolverConfig& cfg = {},
    const std::optional<Potentials>& init = std::nullopt);

// Requires n = m, mu = nu, mu_tilde = nu_tilde and a symmetric cost; returns
// potentials with f = g and symmetric = true. The normalization setting is
// ignored since f = g leaves no free shift.
std::pair<Potentials, SolveReport> solve_symmetric(
    const Instance& inst, const SolverConfig& cfg = {},
    const std::optional<Vector>& init = std::nullopt);

}  // namespace qrot

#endif  // QROT_DUAL_SOLVER_H_
