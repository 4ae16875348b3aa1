#ifndef QROT_CORE_MODEL_H_
#define QROT_CORE_MODEL_H_

// Domain types for quadratically regularized optimal transport between two
// finitely supported marginals, measured against a product reference P.
//
// Potentials are stored in rescaled form (multiplied by epsilon), so the
// optimal density reads z = ((f (+) g - c) / epsilon)_+ for every epsilon.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qrot/errors.h"

namespace qrot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Unvalidated input, e.g. straight from a file.
struct RawInstance {
  std::vector<double> mu;
  std::vector<double> nu;
  std::vector<double> mu_tilde;
  std::vector<double> nu_tilde;
  std::vector<std::vector<double>> cost;  // rows indexed by mu
  double epsilon = 1.0;
};

struct Instance {
  Vector mu;
  Vector nu;
  Vector mu_tilde;
  Vector nu_tilde;
  Matrix cost;
  double epsilon = 1.0;

  std::size_t n() const { return static_cast<std::size_t>(mu.size()); }
  std::size_t m() const { return static_cast<std::size_t>(nu.size()); }

  // dmu/dmu_tilde and dnu/dnu_tilde.
  Vector mu_ratio() const { return mu.cwiseQuotient(mu_tilde); }
  Vector nu_ratio() const { return nu.cwiseQuotient(nu_tilde); }

  // Same marginals with cost c / epsilon and epsilon = 1.
  Instance unit_scaled() const;
  Instance transposed() const;
};

struct Potentials {
  Vector f;
  Vector g;
  bool symmetric = false;
};

struct CouplingDensity {
  Matrix z;   // dpi/dP
  Matrix pi;  // z_ij * mu_tilde_i * nu_tilde_j
};

struct SolveReport {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double duality_gap = 0.0;
  double marginal_residual = 0.0;  // L-infinity over both marginal systems
  long iterations = 0;
  bool converged = false;
  // Sweeps in which the dual objective decreased beyond round-off.
  long ascent_violations = 0;
  // Coordinates re-solved by the bisection safeguard (symmetric mode only).
  long safeguard_steps = 0;
};

struct MarginalResiduals {
  Vector rows;  // sum_j nu_tilde_j z_ij - mu_i / mu_tilde_i
  Vector cols;  // sum_i mu_tilde_i z_ij - nu_j / nu_tilde_j

  double max_abs() const;
};

// Validates and renormalizes. Weight vectors whose raw sum deviates from 1 by
// more than 1e-6 produce a warning in `warnings` (if given).
Instance validate_instance(const RawInstance& raw,
                           std::vector<std::string>* warnings = nullptr);

// Validates an already-assembled instance without renormalizing.
void check_instance(const Instance& inst);

// Throws InstanceError(kNotSymmetric) unless n = m, mu = nu,
// mu_tilde = nu_tilde and the cost is symmetric.
void check_symmetric(const Instance& inst, double tol = 1e-12);

CouplingDensity make_density(const Instance& inst, Matrix z);

CouplingDensity density_from_potentials(const Instance& inst,
                                        const Potentials& p);

MarginalResiduals marginal_residuals(const Instance& inst, const Matrix& z);
inline MarginalResiduals marginal_residuals(const Instance& inst,
                                            const CouplingDensity& d) {
  return marginal_residuals(inst, d.z);
}

double primal_objective(const Instance& inst, const Matrix& z);
inline double primal_objective(const Instance& inst,
                               const CouplingDensity& d) {
  return primal_objective(inst, d.z);
}

double dual_objective(const Instance& inst, const Potentials& p);

// Symmetric dual restricted to f = g.
double symmetric_dual_objective(const Instance& inst, const Vector& f);

// Fills values, gap and residual; iteration count and convergence are left
// for the caller.
SolveReport duality_gap(const Instance& inst, const Potentials& p,
                        const Matrix& z);

// (f + alpha, g - alpha). Symmetric potentials have no free shift.
Potentials shift_potentials(const Potentials& p, double alpha);

}  // namespace qrot

#endif  // QROT_CORE_MODEL_H_
