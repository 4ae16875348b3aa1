#include "qrot/sparsity_lab.h"

#include <cmath>
#include <limits>
#include <ostream>

#include "qrot/potential_polytope.h"
#include "qrot/support_analysis.h"

namespace qrot {

namespace {

void check_sorted(const std::vector<double>& v, const char* field) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) {
      throw InstanceError(InstanceError::Kind::kUnsorted, field, i);
    }
  }
}

std::vector<std::vector<double>> quadratic_cost(const std::vector<double>& xs,
                                                const std::vector<double>& ys) {
  std::vector<std::vector<double>> c(xs.size(), std::vector<double>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      c[i][j] = (xs[i] - ys[j]) * (xs[i] - ys[j]);
    }
  }
  return c;
}

double sup_change(const Potentials& a, const Potentials& b) {
  return std::max((a.f - b.f).cwiseAbs().maxCoeff(),
                  (a.g - b.g).cwiseAbs().maxCoeff());
}

}  // namespace

Matrix monotone_coupling_1d(const std::vector<double>& xs,
                            const std::vector<double>& mu,
                            const std::vector<double>& ys,
                            const std::vector<double>& nu) {
  if (xs.size() != mu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "mu");
  }
  if (ys.size() != nu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "nu");
  }
  check_sorted(xs, "xs");
  check_sorted(ys, "ys");
  // Validates positivity and normalizes.
  RawInstance raw{mu, nu, mu, nu, quadratic_cost(xs, ys), 1.0};
  const Instance inst = validate_instance(raw);

  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto m = static_cast<Eigen::Index>(ys.size());
  Matrix plan = Matrix::Zero(n, m);
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double left = inst.mu[0];
  double right = inst.nu[0];
  constexpr double kTie = 1e-12;
  while (i < n && j < m) {
    const double moved = std::min(left, right);
    plan(i, j) += moved;
    left -= moved;
    right -= moved;
    const bool row_done = left <= kTie;
    const bool col_done = right <= kTie;
    if (row_done && ++i < n) left = inst.mu[i];
    if (col_done && ++j < m) right = inst.nu[j];
    if (!row_done && !col_done) break;  // unreachable
  }
  return plan;
}

Instance quadratic_1d_instance(const std::vector<double>& xs,
                               const std::vector<double>& mu,
                               const std::vector<double>& ys,
                               const std::vector<double>& nu, double epsilon) {
  if (xs.size() != mu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "mu");
  }
  if (ys.size() != nu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "nu");
  }
  return validate_instance(
      RawInstance{mu, nu, mu, nu, quadratic_cost(xs, ys), epsilon});
}

SweepResult epsilon_sweep(const std::vector<double>& xs,
                          const std::vector<double>& mu,
                          const std::vector<double>& ys,
                          const std::vector<double>& nu,
                          const std::vector<double>& epsilons, double delta,
                          const SweepOptions& opts) {
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0)) {
      throw InstanceError(InstanceError::Kind::kNonpositiveEpsilon, "epsilons",
                          k);
    }
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) {
      throw InstanceError(InstanceError::Kind::kUnsorted, "epsilons", k,
                          "epsilons must be strictly decreasing");
    }
  }
  const Matrix plan0 = monotone_coupling_1d(xs, mu, ys, nu);
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto m = static_cast<Eigen::Index>(ys.size());

  BoolMatrix near(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      bool inside = false;
      for (Eigen::Index k = 0; k < n && !inside; ++k) {
        for (Eigen::Index l = 0; l < m && !inside; ++l) {
          if (plan0(k, l) <= 0.0) continue;
          const double dx = xs[static_cast<std::size_t>(i)] -
                            xs[static_cast<std::size_t>(k)];
          const double dy = ys[static_cast<std::size_t>(j)] -
                            ys[static_cast<std::size_t>(l)];
          inside = std::hypot(dx, dy) <= delta;
        }
      }
      near(i, j) = inside;
    }
  }

  SweepResult r;
  r.delta = delta;
  std::optional<Potentials> warm;
  for (double eps : epsilons) {
    const Instance inst = quadratic_1d_instance(xs, mu, ys, nu, eps);
    auto [p, report] =
        solve(inst, opts.solver, opts.warm_start ? warm : std::nullopt);
    const CouplingDensity d = density_from_potentials(inst, p);
    const SupportSet s = support_set(d);
    // Summing the outside mass keeps full containment exactly 1.
    double outside = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!near(i, j)) outside += d.pi(i, j);
      }
    }
    r.epsilons.push_back(eps);
    r.support_sizes.push_back(s.size());
    r.containment.push_back(1.0 - outside / d.pi.sum());
    r.primal_values.push_back(report.primal_value);
    r.dual_values.push_back(report.dual_value);
    r.converged.push_back(report.converged);
    r.sweeps.push_back(report.iterations);
    r.potential_changes.push_back(
        r.potentials_trace.empty() ? 0.0
                                   : sup_change(p, r.potentials_trace.back()));
    r.potentials_trace.push_back(p);
    warm = std::move(p);
  }
  return r;
}

void write_sweep_csv(const SweepResult& r, std::ostream& os) {
  const auto old_precision = os.precision(17);
  os << "epsilon,support_size,containment,primal_value,dual_value,converged,"
        "sweeps,potential_change\n";
  for (std::size_t k = 0; k < r.epsilons.size(); ++k) {
    os << r.epsilons[k] << ',' << r.support_sizes[k] << ','
       << r.containment[k] << ',' << r.primal_values[k] << ','
       << r.dual_values[k] << ',' << (r.converged[k] ? 1 : 0) << ','
       << r.sweeps[k] << ',' << r.potential_changes[k] << '\n';
  }
  os.precision(old_precision);
}

std::optional<std::pair<Potentials, CouplingDensity>> zero_cost_closed_form(
    const Instance& inst) {
  check_instance(inst);
  for (Eigen::Index i = 0; i < inst.cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.cost.cols(); ++j) {
      if (inst.cost(i, j) != 0.0) {
        throw InstanceError(InstanceError::Kind::kNonzeroCost, "cost",
                            static_cast<std::size_t>(i * inst.cost.cols() + j));
      }
    }
  }
  const Vector r = inst.mu_ratio();
  const Vector s = inst.nu_ratio();
  if (r.minCoeff() + s.minCoeff() <= 1.0) return std::nullopt;

  Potentials p;
  p.f = inst.epsilon * (r.array() - 0.5).matrix();
  p.g = inst.epsilon * (s.array() - 0.5).matrix();
  Matrix z = (r.replicate(1, s.size()) + s.transpose().replicate(r.size(), 1))
                 .array() -
             1.0;
  return std::make_pair(std::move(p), make_density(inst, std::move(z)));
}

ContinuousSpec block_cost_spec(double gamma) {
  ContinuousSpec spec;
  spec.mu_density = [](double) { return 1.0; };
  spec.nu_density = [](double) { return 1.0; };
  spec.cost = [gamma](double x, double y) {
    const bool block = (x < 0.5 && y < 0.5) || (x > 0.5 && y > 0.5);
    return block ? 0.0 : 2.0 + gamma;
  };
  return spec;
}

ContinuousSpec quadratic_uniform_spec(double epsilon) {
  ContinuousSpec spec;
  spec.mu_density = [](double) { return 1.0; };
  spec.nu_density = [](double) { return 1.0; };
  spec.cost = [](double x, double y) { return (x - y) * (x - y); };
  spec.epsilon = epsilon;
  return spec;
}

Instance discretize(const ContinuousSpec& spec, int k) {
  if (k < 1) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "grid");
  }
  RawInstance raw;
  std::vector<double> pts(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    pts[static_cast<std::size_t>(i)] = (i + 0.5) / k;
  }
  for (double x : pts) {
    raw.mu.push_back(spec.mu_density(x));
    raw.nu.push_back(spec.nu_density(x));
  }
  raw.mu_tilde = raw.mu;
  raw.nu_tilde = raw.nu;
  raw.cost.assign(pts.size(), std::vector<double>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      raw.cost[i][j] = spec.cost(pts[i], pts[j]);
    }
  }
  raw.epsilon = spec.epsilon;
  return validate_instance(raw);
}

std::vector<RefinementRow> refinement_study(const ContinuousSpec& spec,
                                            const std::vector<int>& grid_sizes,
                                            const SolverConfig& cfg) {
  std::vector<RefinementRow> rows;
  for (int k : grid_sizes) {
    const Instance inst = discretize(spec, k);
    const auto [p, report] = solve(inst, cfg);
    const CouplingDensity d = density_from_potentials(inst, p);
    const SupportSet s = support_set(d);
    const ComponentDecomposition dec = components(s);
    const PolytopeDescription pd = compute_polytope(inst, p, dec, s);

    RefinementRow row;
    row.grid = k;
    row.n_components = dec.count;
    row.dimension = pd.dimension;
    row.converged = report.converged;
    for (int i = 0; i < pd.n_components; ++i) {
      for (int j = 0; j < pd.n_components; ++j) {
        if (i != j && std::isfinite(pd.a(i, j))) {
          row.max_finite_slack = std::max(row.max_finite_slack, pd.a(i, j));
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qrot
