#include "qrot/potential_polytope.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qrot/union_find.h"

namespace qrot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All-pairs shortest paths; +inf entries are missing edges.
Matrix floyd_warshall(Matrix dist) {
  const Eigen::Index n = dist.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dist(i, k) == kInf) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double via = dist(i, k) + dist(k, j);
        if (via < dist(i, j)) dist(i, j) = via;
      }
    }
  }
  return dist;
}

}  // namespace

PolytopeDescription compute_polytope(const Instance& inst, const Potentials& p,
                                     const ComponentDecomposition& d,
                                     const SupportSet& s) {
  if (p.f.size() != inst.cost.rows() || p.g.size() != inst.cost.cols() ||
      d.labels.rows() != inst.cost.rows() ||
      d.labels.cols() != inst.cost.cols() ||
      s.mask.rows() != inst.cost.rows() || s.mask.cols() != inst.cost.cols()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "polytope");
  }
  PolytopeDescription pd;
  const int n_comp = d.count;
  pd.n_components = n_comp;
  pd.a = Matrix::Constant(n_comp, n_comp, kInf);

  const std::vector<int> row_comp = d.row_component();
  const std::vector<int> col_comp = d.col_component();
  for (std::size_t i = 0; i < row_comp.size(); ++i) {
    if (row_comp[i] < 0) pd.excluded_rows.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < col_comp.size(); ++j) {
    if (col_comp[j] < 0) pd.excluded_cols.push_back(static_cast<int>(j));
  }

  // Slack of the epsilon = 1 problem: (c - f - g) / epsilon.
  for (Eigen::Index i = 0; i < inst.cost.rows(); ++i) {
    const int ci = row_comp[static_cast<std::size_t>(i)];
    if (ci < 0) continue;
    for (Eigen::Index j = 0; j < inst.cost.cols(); ++j) {
      const int cj = col_comp[static_cast<std::size_t>(j)];
      if (cj < 0 || s.mask(i, j)) continue;
      const double slack = (inst.cost(i, j) - p.f[i] - p.g[j]) / inst.epsilon;
      pd.a(ci, cj) = std::min(pd.a(ci, cj), slack);
    }
  }
  for (int k = 0; k < n_comp; ++k) pd.a(k, k) = 0.0;

  pd.dist = floyd_warshall(pd.a);
  for (int k = 0; k < n_comp; ++k) {
    if (pd.dist(k, k) < -kPolytopeTol) {
      std::ostringstream os;
      os << "potentials inconsistent with support (negative cycle through "
            "component "
         << k << ", length " << pd.dist(k, k) << ")";
      throw PolytopeError(os.str());
    }
  }

  UnionFind rigid(n_comp);
  for (int i = 0; i < n_comp; ++i) {
    for (int j = i + 1; j < n_comp; ++j) {
      if (pd.dist(i, j) + pd.dist(j, i) <= kPolytopeTol) {
        pd.rigid_pairs.emplace_back(i, j);
        rigid.unite(i, j);
      }
    }
  }
  pd.dimension = rigid.count();
  return pd;
}

bool in_polytope(const PolytopeDescription& pd, const Vector& alpha,
                 double tol) {
  if (alpha.size() != pd.n_components) return false;
  for (int i = 0; i < pd.n_components; ++i) {
    for (int j = 0; j < pd.n_components; ++j) {
      if (alpha[i] - alpha[j] > pd.a(i, j) + tol) return false;
    }
  }
  return true;
}

std::vector<Vector> sample_shifts(const PolytopeDescription& pd, int k,
                                  std::uint64_t seed) {
  const int n = pd.n_components;
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int s = 0; s < k; ++s) {
    Vector alpha = Vector::Zero(n);
    for (int i = 1; i < n; ++i) {
      double lo = -kInf;
      double hi = kInf;
      for (int j = 0; j < i; ++j) {
        lo = std::max(lo, alpha[j] - pd.dist(j, i));
        hi = std::min(hi, alpha[j] + pd.dist(i, j));
      }
      if (!std::isfinite(lo) && !std::isfinite(hi)) {
        lo = -1.0;
        hi = 1.0;
      } else if (!std::isfinite(lo)) {
        lo = hi - 1.0;
      } else if (!std::isfinite(hi)) {
        hi = lo + 1.0;
      }
      if (hi <= lo) {
        alpha[i] = 0.5 * (lo + hi);  // rigid up to round-off
      } else {
        alpha[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
      }
    }
    if (!in_polytope(pd, alpha)) {
      throw PolytopeError("sampled shift violates the polytope constraints");
    }
    out.push_back(std::move(alpha));
  }
  return out;
}

Potentials apply_shifts(const Potentials& p, const ComponentDecomposition& d,
                        const PolytopeDescription& pd, const Vector& alpha,
                        double epsilon) {
  if (alpha.size() != d.count || pd.n_components != d.count) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "alpha");
  }
  if (!in_polytope(pd, alpha)) {
    throw PolytopeError("shift vector violates alpha_i - alpha_j <= a_ij");
  }
  Potentials out = p;
  for (int k = 0; k < d.count; ++k) {
    for (int i : d.row_projections[static_cast<std::size_t>(k)]) {
      out.f[i] += epsilon * alpha[k];
    }
    for (int j : d.col_projections[static_cast<std::size_t>(k)]) {
      out.g[j] -= epsilon * alpha[k];
    }
  }
  out.symmetric = p.symmetric && out.f.size() == out.g.size() &&
                  (out.f - out.g).cwiseAbs().maxCoeff() <= 1e-12;
  return out;
}

bool verify_potentials(const Instance& inst, const Potentials& p,
                       const Matrix& z_star, double tol) {
  const CouplingDensity d = density_from_potentials(inst, p);
  if (d.z.rows() != z_star.rows() || d.z.cols() != z_star.cols()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "z_star");
  }
  return (d.z - z_star).cwiseAbs().maxCoeff() <= tol;
}

RecoveredShift recover_shifts(const Potentials& base,
                              const Potentials& candidate,
                              const ComponentDecomposition& d,
                              double epsilon) {
  RecoveredShift r;
  r.alpha = Vector::Zero(d.count);
  for (int k = 0; k < d.count; ++k) {
    const auto& rows = d.row_projections[static_cast<std::size_t>(k)];
    double mean = 0.0;
    for (int i : rows) mean += (candidate.f[i] - base.f[i]) / epsilon;
    mean /= static_cast<double>(rows.size());
    r.alpha[k] = mean;
    for (int i : rows) {
      r.residual = std::max(
          r.residual, std::abs((candidate.f[i] - base.f[i]) / epsilon - mean));
    }
    for (int j : d.col_projections[static_cast<std::size_t>(k)]) {
      r.residual = std::max(
          r.residual, std::abs((base.g[j] - candidate.g[j]) / epsilon - mean));
    }
  }
  return r;
}

SymmetricSlice symmetric_slice(const PolytopeDescription& pd,
                               const ComponentDecomposition& d) {
  if (d.labels.rows() != d.labels.cols()) {
    throw InstanceError(InstanceError::Kind::kNotSymmetric, "support",
                        std::nullopt, "support is not square");
  }
  const int n = d.count;
  SymmetricSlice slice;
  slice.mirror.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < d.labels.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.labels.cols(); ++j) {
      const int k = d.labels(i, j);
      const int r = d.labels(j, i);
      if ((k < 0) != (r < 0)) {
        throw InstanceError(InstanceError::Kind::kNotSymmetric, "support",
                            std::nullopt, "support is not symmetric");
      }
      if (k < 0) continue;
      int& mk = slice.mirror[static_cast<std::size_t>(k)];
      if (mk >= 0 && mk != r) {
        throw InstanceError(InstanceError::Kind::kNotSymmetric, "support",
                            std::nullopt, "component has no unique mirror");
      }
      mk = r;
    }
  }

  // Unit two-variable-per-inequality system on nodes +alpha_k (2k) and
  // -alpha_k (2k + 1); w(u, v) bounds value(u) - value(v).
  Matrix w = Matrix::Constant(2 * n, 2 * n, kInf);
  for (int k = 0; k < 2 * n; ++k) w(k, k) = 0.0;
  auto plus = [](int k) { return 2 * k; };
  auto minus = [](int k) { return 2 * k + 1; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || pd.a(i, j) == kInf) continue;
      w(plus(i), plus(j)) = std::min(w(plus(i), plus(j)), pd.a(i, j));
      w(minus(j), minus(i)) = std::min(w(minus(j), minus(i)), pd.a(i, j));
    }
  }
  for (int k = 0; k < n; ++k) {
    const int r = slice.mirror[static_cast<std::size_t>(k)];
    // alpha_k + alpha_r = 0, as two inequalities.
    w(plus(k), minus(r)) = std::min(w(plus(k), minus(r)), 0.0);
    w(plus(r), minus(k)) = std::min(w(plus(r), minus(k)), 0.0);
    w(minus(k), plus(r)) = std::min(w(minus(k), plus(r)), 0.0);
    w(minus(r), plus(k)) = std::min(w(minus(r), plus(k)), 0.0);
  }
  const Matrix dist = floyd_warshall(w);

  slice.feasible = true;
  for (int k = 0; k < 2 * n; ++k) {
    if (dist(k, k) < -kPolytopeTol) slice.feasible = false;
  }
  slice.lower.resize(n);
  slice.upper.resize(n);
  for (int k = 0; k < n; ++k) {
    slice.upper[k] = 0.5 * dist(plus(k), minus(k));
    slice.lower[k] = -0.5 * dist(minus(k), plus(k));
  }
  return slice;
}

}  // namespace qrot
