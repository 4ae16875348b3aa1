#include "qrot/core_model.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qrot {

namespace {

std::string describe(InstanceError::Kind kind, const std::string& field,
                     const std::optional<std::size_t>& index,
                     const std::string& detail) {
  std::ostringstream os;
  os << to_string(kind) << " at " << field;
  if (index) os << "[" << *index << "]";
  if (!detail.empty()) os << ": " << detail;
  return os.str();
}

Vector checked_weights(const std::vector<double>& w, const char* field,
                       std::vector<std::string>* warnings) {
  if (w.empty()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, field,
                        std::nullopt, "empty weight vector");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) {
      throw InstanceError(InstanceError::Kind::kNonfiniteValue, field, i);
    }
    if (!(w[i] > 0.0)) {
      throw InstanceError(InstanceError::Kind::kNonpositiveWeight, field, i);
    }
    sum += w[i];
  }
  if (warnings != nullptr && std::abs(sum - 1.0) > 1e-6) {
    std::ostringstream os;
    os << field << " sums to " << sum << "; renormalized";
    warnings->push_back(os.str());
  }
  Vector out(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = w[i] / sum;
  }
  return out;
}

void check_weights(const Vector& w, const char* field) {
  if (w.size() == 0) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, field,
                        std::nullopt, "empty weight vector");
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) {
      throw InstanceError(InstanceError::Kind::kNonfiniteValue, field,
                          static_cast<std::size_t>(i));
    }
    if (!(w[i] > 0.0)) {
      throw InstanceError(InstanceError::Kind::kNonpositiveWeight, field,
                          static_cast<std::size_t>(i));
    }
  }
  if (std::abs(w.sum() - 1.0) > 1e-12) {
    throw InstanceError(InstanceError::Kind::kNonpositiveWeight, field,
                        std::nullopt, "weights do not sum to 1");
  }
}

void check_dims(const Instance& inst, const Potentials& p) {
  if (static_cast<std::size_t>(p.f.size()) != inst.n()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "f");
  }
  if (static_cast<std::size_t>(p.g.size()) != inst.m()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "g");
  }
}

void check_dims(const Instance& inst, const Matrix& z) {
  if (static_cast<std::size_t>(z.rows()) != inst.n() ||
      static_cast<std::size_t>(z.cols()) != inst.m()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "z");
  }
}

}  // namespace

InstanceError::InstanceError(Kind kind, std::string field,
                             std::optional<std::size_t> index,
                             std::string detail)
    : Error(describe(kind, field, index, detail)),
      kind_(kind),
      field_(std::move(field)),
      index_(index) {}

const char* to_string(InstanceError::Kind kind) {
  switch (kind) {
    case InstanceError::Kind::kDimensionMismatch:
      return "dimension mismatch";
    case InstanceError::Kind::kNonpositiveWeight:
      return "nonpositive weight";
    case InstanceError::Kind::kNonfiniteValue:
      return "nonfinite value";
    case InstanceError::Kind::kNonpositiveEpsilon:
      return "nonpositive epsilon";
    case InstanceError::Kind::kNotSymmetric:
      return "asymmetric input";
    case InstanceError::Kind::kNonzeroCost:
      return "nonzero cost";
    case InstanceError::Kind::kUnsorted:
      return "unsorted input";
  }
  return "invalid instance";
}

double MarginalResiduals::max_abs() const {
  double r = 0.0;
  if (rows.size() > 0) r = std::max(r, rows.cwiseAbs().maxCoeff());
  if (cols.size() > 0) r = std::max(r, cols.cwiseAbs().maxCoeff());
  return r;
}

Instance Instance::unit_scaled() const {
  Instance out = *this;
  out.cost = cost / epsilon;
  out.epsilon = 1.0;
  return out;
}

Instance Instance::transposed() const {
  Instance out;
  out.mu = nu;
  out.nu = mu;
  out.mu_tilde = nu_tilde;
  out.nu_tilde = mu_tilde;
  out.cost = cost.transpose();
  out.epsilon = epsilon;
  return out;
}

Instance validate_instance(const RawInstance& raw,
                           std::vector<std::string>* warnings) {
  const std::size_t n = raw.mu.size();
  const std::size_t m = raw.nu.size();
  if (raw.mu_tilde.size() != n) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "mu_tilde",
                        std::nullopt, "length differs from mu");
  }
  if (raw.nu_tilde.size() != m) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "nu_tilde",
                        std::nullopt, "length differs from nu");
  }
  if (raw.cost.size() != n) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "cost",
                        std::nullopt, "row count differs from mu");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (raw.cost[i].size() != m) {
      throw InstanceError(InstanceError::Kind::kDimensionMismatch, "cost", i,
                          "row length differs from nu");
    }
  }

  Instance inst;
  inst.mu = checked_weights(raw.mu, "mu", warnings);
  inst.nu = checked_weights(raw.nu, "nu", warnings);
  inst.mu_tilde = checked_weights(raw.mu_tilde, "mu_tilde", warnings);
  inst.nu_tilde = checked_weights(raw.nu_tilde, "nu_tilde", warnings);

  inst.cost.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = raw.cost[i][j];
      if (!std::isfinite(c)) {
        throw InstanceError(InstanceError::Kind::kNonfiniteValue, "cost",
                            i * m + j);
      }
      inst.cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
    }
  }

  if (!std::isfinite(raw.epsilon)) {
    throw InstanceError(InstanceError::Kind::kNonfiniteValue, "epsilon");
  }
  if (!(raw.epsilon > 0.0)) {
    throw InstanceError(InstanceError::Kind::kNonpositiveEpsilon, "epsilon");
  }
  inst.epsilon = raw.epsilon;
  return inst;
}

void check_instance(const Instance& inst) {
  check_weights(inst.mu, "mu");
  check_weights(inst.nu, "nu");
  check_weights(inst.mu_tilde, "mu_tilde");
  check_weights(inst.nu_tilde, "nu_tilde");
  if (inst.mu_tilde.size() != inst.mu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "mu_tilde");
  }
  if (inst.nu_tilde.size() != inst.nu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "nu_tilde");
  }
  if (inst.cost.rows() != inst.mu.size() ||
      inst.cost.cols() != inst.nu.size()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "cost");
  }
  if (!inst.cost.allFinite()) {
    throw InstanceError(InstanceError::Kind::kNonfiniteValue, "cost");
  }
  if (!(inst.epsilon > 0.0) || !std::isfinite(inst.epsilon)) {
    throw InstanceError(InstanceError::Kind::kNonpositiveEpsilon, "epsilon");
  }
}

void check_symmetric(const Instance& inst, double tol) {
  using K = InstanceError::Kind;
  if (inst.n() != inst.m()) {
    throw InstanceError(K::kNotSymmetric, "cost", std::nullopt,
                        "cost matrix is not square");
  }
  const auto n = static_cast<Eigen::Index>(inst.n());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(inst.mu[i] - inst.nu[i]) > tol) {
      throw InstanceError(K::kNotSymmetric, "nu", static_cast<std::size_t>(i),
                          "mu and nu differ");
    }
    if (std::abs(inst.mu_tilde[i] - inst.nu_tilde[i]) > tol) {
      throw InstanceError(K::kNotSymmetric, "nu_tilde",
                          static_cast<std::size_t>(i),
                          "mu_tilde and nu_tilde differ");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(inst.cost(i, j) - inst.cost(j, i)) > tol) {
        throw InstanceError(K::kNotSymmetric, "cost",
                            static_cast<std::size_t>(i * n + j),
                            "c(x, y) != c(y, x)");
      }
    }
  }
}

CouplingDensity make_density(const Instance& inst, Matrix z) {
  check_dims(inst, z);
  CouplingDensity d;
  d.pi = inst.mu_tilde.asDiagonal() * z * inst.nu_tilde.asDiagonal();
  d.z = std::move(z);
  return d;
}

CouplingDensity density_from_potentials(const Instance& inst,
                                        const Potentials& p) {
  check_dims(inst, p);
  Matrix z = ((p.f.replicate(1, inst.cost.cols()) +
               p.g.transpose().replicate(inst.cost.rows(), 1) - inst.cost) /
              inst.epsilon)
                 .cwiseMax(0.0);
  return make_density(inst, std::move(z));
}

MarginalResiduals marginal_residuals(const Instance& inst, const Matrix& z) {
  check_dims(inst, z);
  MarginalResiduals r;
  r.rows = z * inst.nu_tilde - inst.mu_ratio();
  r.cols = z.transpose() * inst.mu_tilde - inst.nu_ratio();
  return r;
}

double primal_objective(const Instance& inst, const Matrix& z) {
  check_dims(inst, z);
  const Matrix weighted =
      inst.mu_tilde.asDiagonal() * z * inst.nu_tilde.asDiagonal();
  return (inst.cost.array() * weighted.array()).sum() +
         0.5 * inst.epsilon * (z.array() * weighted.array()).sum();
}

double dual_objective(const Instance& inst, const Potentials& p) {
  const CouplingDensity d = density_from_potentials(inst, p);
  return p.f.dot(inst.mu) + p.g.dot(inst.nu) -
         0.5 * inst.epsilon * (d.z.array() * d.pi.array()).sum();
}

double symmetric_dual_objective(const Instance& inst, const Vector& f) {
  return dual_objective(inst, Potentials{f, f, true});
}

SolveReport duality_gap(const Instance& inst, const Potentials& p,
                        const Matrix& z) {
  SolveReport r;
  r.primal_value = primal_objective(inst, z);
  r.dual_value = dual_objective(inst, p);
  r.duality_gap = r.primal_value - r.dual_value;
  r.marginal_residual = marginal_residuals(inst, z).max_abs();
  return r;
}

Potentials shift_potentials(const Potentials& p, double alpha) {
  if (p.symmetric) {
    throw Error("symmetric potentials admit no additive shift");
  }
  Potentials out = p;
  out.f.array() += alpha;
  out.g.array() -= alpha;
  return out;
}

}  // namespace qrot
