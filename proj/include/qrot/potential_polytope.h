#ifndef QROT_POTENTIAL_POLYTOPE_H_
#define QROT_POTENTIAL_POLYTOPE_H_

// The family of all potentials of a discrete problem. Given one pair (f, g)
// and the components C_1..C_N of the optimal support, every other pair is
//   f + sum_k alpha_k 1[rows of C_k],  g - sum_k alpha_k 1[cols of C_k]
// for alpha in the difference-constraint polytope
//   T = { alpha : alpha_i - alpha_j <= a_ij },
// where a_ij is the smallest slack c - f - g over off-support cells in
// rows(C_i) x cols(C_j). Shifts are expressed in units of epsilon, i.e. for
// the potentials of the problem with cost c / epsilon and epsilon = 1.

#include <cstdint>
#include <utility>
#include <vector>

#include "qrot/core_model.h"
#include "qrot/support_analysis.h"

namespace qrot {

class PolytopeError : public Error {
 public:
  using Error::Error;
};

struct PolytopeDescription {
  int n_components = 0;
  Matrix a;     // +inf where the defining set is empty; a_ii = 0
  Matrix dist;  // dist(i, j) bounds alpha_i - alpha_j
  int dimension = 0;
  std::vector<std::pair<int, int>> rigid_pairs;  // i < j, alpha_i = alpha_j
  // Rows / columns that miss every component. They are left out of the
  // constraints and keep their solver values under apply_shifts.
  std::vector<int> excluded_rows;
  std::vector<int> excluded_cols;
};

inline constexpr double kPolytopeTol = 1e-9;

PolytopeDescription compute_polytope(const Instance& inst, const Potentials& p,
                                     const ComponentDecomposition& d,
                                     const SupportSet& s);

bool in_polytope(const PolytopeDescription& pd, const Vector& alpha,
                 double tol = kPolytopeTol);

// k points of T with alpha_0 = 0, drawn coordinate by coordinate uniformly
// from the interval left feasible by the already-drawn coordinates.
std::vector<Vector> sample_shifts(const PolytopeDescription& pd, int k,
                                  std::uint64_t seed);

Potentials apply_shifts(const Potentials& p, const ComponentDecomposition& d,
                        const PolytopeDescription& pd, const Vector& alpha,
                        double epsilon);

bool verify_potentials(const Instance& inst, const Potentials& p,
                       const Matrix& z_star, double tol = 1e-8);

struct RecoveredShift {
  Vector alpha;
  // Largest deviation of (f' - f) / epsilon, resp. (g - g') / epsilon, from
  // the per-component average.
  double residual = 0.0;
};

// Maps a candidate pair back to component shifts relative to `base`.
RecoveredShift recover_shifts(const Potentials& base,
                              const Potentials& candidate,
                              const ComponentDecomposition& d, double epsilon);

// Slice of T producing f' = g' for symmetric problems whose base potentials
// already satisfy f = g: alpha_k = -alpha_mirror(k), where mirror(k) is the
// component holding the reflected cells of C_k.
struct SymmetricSlice {
  std::vector<int> mirror;
  Vector lower;  // per-component range of alpha_k over the slice
  Vector upper;
  bool feasible = false;
};

SymmetricSlice symmetric_slice(const PolytopeDescription& pd,
                               const ComponentDecomposition& d);

}  // namespace qrot

#endif  // QROT_POTENTIAL_POLYTOPE_H_
