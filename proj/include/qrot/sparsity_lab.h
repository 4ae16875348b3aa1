#ifndef QROT_SPARSITY_LAB_H_
#define QROT_SPARSITY_LAB_H_

// Experiments around the regularization parameter: shrinking supports as
// epsilon -> 0 on 1D quadratic-cost problems, closed forms for zero cost, and
// grid refinement of continuous problems.

#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "qrot/core_model.h"
#include "qrot/dual_solver.h"

namespace qrot {

// Order-preserving (north-west corner) plan between sorted 1D atoms; the
// optimal unregularized plan for convex costs of x - y.
Matrix monotone_coupling_1d(const std::vector<double>& xs,
                            const std::vector<double>& mu,
                            const std::vector<double>& ys,
                            const std::vector<double>& nu);

// c_ij = (x_i - y_j)^2 with reference weights equal to the marginals.
Instance quadratic_1d_instance(const std::vector<double>& xs,
                               const std::vector<double>& mu,
                               const std::vector<double>& ys,
                               const std::vector<double>& nu, double epsilon);

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<int> support_sizes;
  std::vector<double> containment;  // pi_eps mass inside the delta-neighborhood
  double delta = 0.0;
  std::vector<Potentials> potentials_trace;
  std::vector<double> primal_values;
  std::vector<double> dual_values;
  std::vector<bool> converged;
  std::vector<long> sweeps;
  // sup-norm change of (f, g) against the previous epsilon; 0 for the first.
  std::vector<double> potential_changes;
};

struct SweepOptions {
  SolverConfig solver;
  bool warm_start = true;
};

// Epsilons must be positive and strictly decreasing. The neighborhood of the
// unregularized support uses Euclidean distance between (x_i, y_j) points.
SweepResult epsilon_sweep(const std::vector<double>& xs,
                          const std::vector<double>& mu,
                          const std::vector<double>& ys,
                          const std::vector<double>& nu,
                          const std::vector<double>& epsilons, double delta,
                          const SweepOptions& opts = {});

void write_sweep_csv(const SweepResult& r, std::ostream& os);

// For c = 0: if mu_i / mu_tilde_i + nu_j / nu_tilde_j > 1 everywhere the
// optimum has full support, z = r (+) s - 1 and (epsilon (r - 1/2),
// epsilon (s - 1/2)) are potentials. Otherwise returns nullopt and the solver
// must be used. Throws InstanceError(kNonzeroCost) for a nonzero cost.
std::optional<std::pair<Potentials, CouplingDensity>> zero_cost_closed_form(
    const Instance& inst);

struct ContinuousSpec {
  std::function<double(double)> mu_density;  // on [0, 1]
  std::function<double(double)> nu_density;
  std::function<double(double, double)> cost;
  double epsilon = 1.0;
};

// c = (2 + gamma) outside the block diagonal [0,1/2)^2 U (1/2,1]^2, uniform
// marginals.
ContinuousSpec block_cost_spec(double gamma);
ContinuousSpec quadratic_uniform_spec(double epsilon = 1.0);

// Midpoint discretization on k cells; reference weights equal the marginals.
Instance discretize(const ContinuousSpec& spec, int k);

struct RefinementRow {
  int grid = 0;
  int n_components = 0;
  int dimension = 0;
  double max_finite_slack = 0.0;  // largest finite off-diagonal a_ij
  bool converged = false;
};

std::vector<RefinementRow> refinement_study(const ContinuousSpec& spec,
                                            const std::vector<int>& grid_sizes,
                                            const SolverConfig& cfg = {});

}  // namespace qrot

#endif  // QROT_SPARSITY_LAB_H_
