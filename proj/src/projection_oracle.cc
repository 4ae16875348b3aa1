#include "qrot/projection_oracle.h"

#include <sstream>

namespace qrot {

double inner_product(const Instance& inst, const Matrix& a, const Matrix& b) {
  return (inst.mu_tilde.asDiagonal() * a.cwiseProduct(b) *
          inst.nu_tilde.asDiagonal())
      .sum();
}

DykstraState project_matrix(const Instance& inst, const Matrix& start,
                            const ProjectionOptions& opts) {
  check_instance(inst);
  if (start.rows() != inst.cost.rows() || start.cols() != inst.cost.cols()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "start");
  }
  const Vector row_target = inst.mu_ratio();
  const Vector col_target = inst.nu_ratio();

  DykstraState s;
  s.z = start;
  s.correction = Matrix::Zero(start.rows(), start.cols());
  Matrix previous;
  while (s.iteration < opts.max_iter) {
    previous = s.z;
    // Affine marginal sets: the weighted projection adds a constant per row
    // (column) because the reference weights sum to one.
    s.z.colwise() += row_target - s.z * inst.nu_tilde;
    s.z.rowwise() += (col_target - s.z.transpose() * inst.mu_tilde).transpose();
    // Nonnegativity, the only set that needs a Dykstra correction.
    const Matrix shifted = s.z + s.correction;
    s.z = shifted.cwiseMax(0.0);
    s.correction = shifted - s.z;
    ++s.iteration;
    s.last_change = (s.z - previous).cwiseAbs().maxCoeff();
    if (s.last_change <= opts.tol &&
        marginal_residuals(inst, s.z).max_abs() <= 10.0 * opts.tol) {
      return s;
    }
  }
  MarginalResiduals res = marginal_residuals(inst, s.z);
  std::ostringstream os;
  os << "Dykstra projection did not converge in " << opts.max_iter
     << " iterations (last change " << s.last_change << ", residual "
     << res.max_abs() << ")";
  throw ProjectionError(os.str(), std::move(s), std::move(res));
}

CouplingDensity project(const Instance& inst, const ProjectionOptions& opts) {
  DykstraState s = project_matrix(inst, -inst.cost / inst.epsilon, opts);
  return make_density(inst, std::move(s.z));
}

}  // namespace qrot
