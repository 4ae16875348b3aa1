#include "qrot/dual_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qrot {

namespace {

bool dual_decreased(double before, double after) {
  return after < before - 1e-12 * (1.0 + std::abs(before));
}

struct Scratch {
  std::vector<double> thresholds;
  std::vector<double> weights;
  std::vector<int> order;

  void resize(std::size_t k) {
    thresholds.resize(k);
    weights.resize(k);
  }
};

// F(t) = sum_k w_k (t - theta_k)_+, evaluated directly.
double piecewise_value(std::span<const double> thresholds,
                       std::span<const double> weights, double t) {
  double v = 0.0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    v += weights[k] * std::max(0.0, t - thresholds[k]);
  }
  return v;
}

// Bisection on F(t) = target; slower than the segment scan but independent of
// the breakpoint ordering. Used by the symmetric-mode safeguard.
double bisect_row_equation(std::span<const double> thresholds,
                           std::span<const double> weights, double target) {
  const auto [lo_it, hi_it] =
      std::minmax_element(thresholds.begin(), thresholds.end());
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double lo = *lo_it - 1.0;
  double hi = *hi_it + target / total + 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (piecewise_value(thresholds, weights, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void fill_symmetric_row(const Instance& inst, const Vector& f, Eigen::Index i,
                        Scratch& s) {
  const auto n = static_cast<Eigen::Index>(inst.n());
  s.resize(inst.n());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (j == i) {
      // mu_tilde_i (2t - c_ii)_+ = 2 mu_tilde_i (t - c_ii / 2)_+
      s.thresholds[k] = 0.5 * inst.cost(i, i);
      s.weights[k] = 2.0 * inst.mu_tilde[i];
    } else {
      s.thresholds[k] = inst.cost(i, j) - f[j];
      s.weights[k] = inst.mu_tilde[j];
    }
  }
}

double residual_of(const Instance& inst, const Potentials& p) {
  return marginal_residuals(inst, density_from_potentials(inst, p)).max_abs();
}

}  // namespace

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::kAnchorFirstComponentZero:
      return "anchor_first_component_zero";
    case Normalization::kMeanZeroF:
      return "mean_zero_f";
    case Normalization::kNone:
      return "none";
  }
  return "none";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "anchor_first_component_zero") {
    return Normalization::kAnchorFirstComponentZero;
  }
  if (name == "mean_zero_f") return Normalization::kMeanZeroF;
  if (name == "none") return Normalization::kNone;
  throw Error("unknown normalization '" + std::string(name) + "'");
}

double solve_row_equation(std::span<const double> thresholds,
                          std::span<const double> weights, double target,
                          std::vector<int>& order) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw Error("nonpositive target in row equation");
  }
  if (thresholds.size() != weights.size() || thresholds.empty()) {
    throw Error("row equation needs matching, nonempty thresholds and weights");
  }
  const std::size_t k = thresholds.size();
  order.resize(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return thresholds[static_cast<std::size_t>(a)] <
           thresholds[static_cast<std::size_t>(b)];
  });

  // On [theta_(r), theta_(r+1)], F(t) = value + slope * (t - theta_(r)).
  double slope = 0.0;
  double value = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const auto idx = static_cast<std::size_t>(order[r]);
    if (!(weights[idx] > 0.0)) {
      throw Error("nonpositive weight in row equation");
    }
    slope += weights[idx];
    const double left = thresholds[idx];
    if (r + 1 == k) return left + (target - value) / slope;
    const double right = thresholds[static_cast<std::size_t>(order[r + 1])];
    const double next_value = value + slope * (right - left);
    if (next_value >= target) return left + (target - value) / slope;
    value = next_value;
  }
  return std::numeric_limits<double>::quiet_NaN();  // unreachable
}

double solve_row_equation(const RowEquation& eq) {
  std::vector<int> order;
  return solve_row_equation(eq.thresholds, eq.weights, eq.target, order);
}

void row_pass(const Instance& inst, Potentials& p) {
  const auto n = static_cast<Eigen::Index>(inst.n());
  const auto m = static_cast<Eigen::Index>(inst.m());
  Scratch s;
  s.resize(inst.m());
  for (Eigen::Index j = 0; j < m; ++j) {
    s.weights[static_cast<std::size_t>(j)] = inst.nu_tilde[j];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      s.thresholds[static_cast<std::size_t>(j)] = inst.cost(i, j) - p.g[j];
    }
    p.f[i] = solve_row_equation(s.thresholds, s.weights,
                                inst.epsilon * inst.mu[i] / inst.mu_tilde[i],
                                s.order);
  }
}

void column_pass(const Instance& inst, Potentials& p) {
  const auto n = static_cast<Eigen::Index>(inst.n());
  const auto m = static_cast<Eigen::Index>(inst.m());
  Scratch s;
  s.resize(inst.n());
  for (Eigen::Index i = 0; i < n; ++i) {
    s.weights[static_cast<std::size_t>(i)] = inst.mu_tilde[i];
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      s.thresholds[static_cast<std::size_t>(i)] = inst.cost(i, j) - p.f[i];
    }
    p.g[j] = solve_row_equation(s.thresholds, s.weights,
                                inst.epsilon * inst.nu[j] / inst.nu_tilde[j],
                                s.order);
  }
}

Potentials sweep(const Instance& inst, const Potentials& p) {
  Potentials out = p;
  row_pass(inst, out);
  column_pass(inst, out);
  return out;
}

void symmetric_pass(const Instance& inst, Vector& f) {
  Scratch s;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    fill_symmetric_row(inst, f, i, s);
    f[i] = solve_row_equation(s.thresholds, s.weights,
                              inst.epsilon * inst.mu[i] / inst.mu_tilde[i],
                              s.order);
  }
}

Potentials normalize(const Instance& inst, const Potentials& p,
                     Normalization mode) {
  if (p.symmetric) return p;
  switch (mode) {
    case Normalization::kAnchorFirstComponentZero:
      return shift_potentials(p, -p.f[0]);
    case Normalization::kMeanZeroF:
      return shift_potentials(p, -p.f.dot(inst.mu));
    case Normalization::kNone:
      return p;
  }
  return p;
}

std::pair<Potentials, SolveReport> solve(const Instance& inst,
                                         const SolverConfig& cfg,
                                         const std::optional<Potentials>& init) {
  check_instance(inst);
  if (!(cfg.tol_residual > 0.0) || cfg.max_sweeps < 1) {
    throw Error("solver config needs tol_residual > 0 and max_sweeps >= 1");
  }
  Potentials p;
  if (init) {
    p = *init;
    p.symmetric = false;
    if (static_cast<std::size_t>(p.f.size()) != inst.n() ||
        static_cast<std::size_t>(p.g.size()) != inst.m()) {
      throw InstanceError(InstanceError::Kind::kDimensionMismatch,
                          "initial potentials");
    }
  } else {
    p.f = Vector::Zero(static_cast<Eigen::Index>(inst.n()));
    p.g = Vector::Zero(static_cast<Eigen::Index>(inst.m()));
  }

  long sweeps = 0;
  long violations = 0;
  double residual = residual_of(inst, p);
  double last_dual = cfg.check_monotone ? dual_objective(inst, p)
                                        : std::numeric_limits<double>::lowest();
  while (residual > cfg.tol_residual && sweeps < cfg.max_sweeps) {
    row_pass(inst, p);
    column_pass(inst, p);
    ++sweeps;
    residual = residual_of(inst, p);
    if (cfg.check_monotone) {
      const double d = dual_objective(inst, p);
      if (dual_decreased(last_dual, d)) ++violations;
      last_dual = d;
    }
  }

  p = normalize(inst, p, cfg.normalization);
  SolveReport report =
      duality_gap(inst, p, density_from_potentials(inst, p).z);
  report.iterations = sweeps;
  report.converged = report.marginal_residual <= cfg.tol_residual;
  report.ascent_violations = violations;
  return {std::move(p), report};
}

std::pair<Potentials, SolveReport> solve_symmetric(
    const Instance& inst, const SolverConfig& cfg,
    const std::optional<Vector>& init) {
  check_instance(inst);
  check_symmetric(inst);
  if (!(cfg.tol_residual > 0.0) || cfg.max_sweeps < 1) {
    throw Error("solver config needs tol_residual > 0 and max_sweeps >= 1");
  }
  Vector f = init ? *init : Vector::Zero(static_cast<Eigen::Index>(inst.n()));
  if (static_cast<std::size_t>(f.size()) != inst.n()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch,
                        "initial potentials");
  }

  auto as_potentials = [](const Vector& v) { return Potentials{v, v, true}; };

  long sweeps = 0;
  long violations = 0;
  long safeguard_steps = 0;
  double residual = residual_of(inst, as_potentials(f));
  double last_dual = symmetric_dual_objective(inst, f);
  Scratch s;
  while (residual > cfg.tol_residual && sweeps < cfg.max_sweeps) {
    const Vector previous = f;
    symmetric_pass(inst, f);
    double d = symmetric_dual_objective(inst, f);
    if (dual_decreased(last_dual, d)) {
      // Redo the sweep with a bracketing line search per coordinate.
      ++violations;
      f = previous;
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        fill_symmetric_row(inst, f, i, s);
        f[i] = bisect_row_equation(
            s.thresholds, s.weights,
            inst.epsilon * inst.mu[i] / inst.mu_tilde[i]);
        ++safeguard_steps;
      }
      d = symmetric_dual_objective(inst, f);
    }
    last_dual = d;
    ++sweeps;
    residual = residual_of(inst, as_potentials(f));
  }

  Potentials p = as_potentials(f);
  SolveReport report =
      duality_gap(inst, p, density_from_potentials(inst, p).z);
  report.iterations = sweeps;
  report.converged = report.marginal_residual <= cfg.tol_residual;
  report.ascent_violations = violations;
  report.safeguard_steps = safeguard_steps;
  return {std::move(p), report};
}

}  // namespace qrot
