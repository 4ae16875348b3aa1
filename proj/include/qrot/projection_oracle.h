#ifndef QROT_PROJECTION_ORACLE_H_
#define QROT_PROJECTION_ORACLE_H_

// Primal route to the optimal density: the metric projection of -c/epsilon
// onto the set of coupling densities in L2(P), computed by Dykstra's
// alternating projections. Independent of the dual solver; used to check it.

#include "qrot/core_model.h"

namespace qrot {

struct DykstraState {
  Matrix z;
  // Pre-clip minus post-clip of the nonnegativity step; always >= 0.
  Matrix correction;
  long iteration = 0;
  double last_change = 0.0;
};

struct ProjectionOptions {
  double tol = 1e-10;
  long max_iter = 1000000;
};

class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& what, DykstraState best,
                  MarginalResiduals residuals)
      : Error(what), best_(std::move(best)), residuals_(std::move(residuals)) {}

  const DykstraState& best() const { return best_; }
  const MarginalResiduals& residuals() const { return residuals_; }

 private:
  DykstraState best_;
  MarginalResiduals residuals_;
};

// Projects an arbitrary matrix onto the coupling densities of `inst` in the
// inner product <A, B> = sum_ij A_ij B_ij mu_tilde_i nu_tilde_j.
// Throws ProjectionError when max_iter is exhausted.
DykstraState project_matrix(const Instance& inst, const Matrix& start,
                            const ProjectionOptions& opts = {});

// The optimal density: projection of -c / epsilon.
CouplingDensity project(const Instance& inst, const ProjectionOptions& opts = {});

// <A, B>_P
double inner_product(const Instance& inst, const Matrix& a, const Matrix& b);

}  // namespace qrot

#endif  // QROT_PROJECTION_ORACLE_H_
