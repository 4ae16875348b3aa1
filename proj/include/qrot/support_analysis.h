#ifndef QROT_SUPPORT_ANALYSIS_H_
#define QROT_SUPPORT_ANALYSIS_H_

// Support of a coupling density and its decomposition into components.
//
// Two support cells are connected when an alternating path joins them, each
// step changing only the row or only the column and staying in the support.
// That is connectivity in the bipartite graph whose nodes are rows and
// columns and whose edges are the support cells.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "qrot/core_model.h"

namespace qrot {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct SupportSet {
  BoolMatrix mask;  // z_ij > tau
  double tau = 0.0;
  // Cells whose density lies within 10 machine epsilons (relative to max z)
  // of tau; their classification is fragile.
  int near_threshold = 0;

  int size() const { return static_cast<int>(mask.count()); }
};

struct ComponentDecomposition {
  IntMatrix labels;  // -1 off support, else component id
  std::vector<std::vector<int>> row_projections;
  std::vector<std::vector<int>> col_projections;
  int count = 0;

  // Component owning row i / column j, or -1 if it misses the support.
  std::vector<int> row_component() const;
  std::vector<int> col_component() const;
};

inline constexpr double kDefaultTauRel = 1e-8;

// Default threshold is tau_rel * max(z).
SupportSet support_set(const Matrix& z, std::optional<double> tau = std::nullopt);
inline SupportSet support_set(const CouplingDensity& d,
                              std::optional<double> tau = std::nullopt) {
  return support_set(d.z, tau);
}
double default_tau(const Matrix& z, double tau_rel = kDefaultTauRel);

// Component ids follow the first cell met in row-major order, i.e. the
// smallest row index, then the smallest column index.
ComponentDecomposition components(const SupportSet& s);
ComponentDecomposition components(const BoolMatrix& mask);

// True iff the row (column) projections, recomputed from the labels, are
// pairwise disjoint, cover every row (column) meeting the support, and agree
// with the stored projections.
bool partition_check(const ComponentDecomposition& d);

}  // namespace qrot

#endif  // QROT_SUPPORT_ANALYSIS_H_
