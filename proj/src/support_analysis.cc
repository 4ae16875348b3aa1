#include "qrot/support_analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrot/union_find.h"

namespace qrot {

namespace {

std::vector<int> owner(const std::vector<std::vector<int>>& projections,
                       int size) {
  std::vector<int> out(static_cast<std::size_t>(size), -1);
  for (std::size_t k = 0; k < projections.size(); ++k) {
    for (int idx : projections[k]) {
      out[static_cast<std::size_t>(idx)] = static_cast<int>(k);
    }
  }
  return out;
}

}  // namespace

std::vector<int> ComponentDecomposition::row_component() const {
  return owner(row_projections, static_cast<int>(labels.rows()));
}

std::vector<int> ComponentDecomposition::col_component() const {
  return owner(col_projections, static_cast<int>(labels.cols()));
}

double default_tau(const Matrix& z, double tau_rel) {
  if (z.size() == 0) return 0.0;
  return tau_rel * std::max(0.0, z.maxCoeff());
}

SupportSet support_set(const Matrix& z, std::optional<double> tau) {
  SupportSet s;
  s.tau = tau ? *tau : default_tau(z);
  if (s.tau < 0.0) throw Error("support threshold must be nonnegative");
  s.mask = (z.array() > s.tau).matrix();
  const double scale = z.size() > 0 ? std::max(1.0, z.cwiseAbs().maxCoeff()) : 1.0;
  const double band = 10.0 * std::numeric_limits<double>::epsilon() * scale;
  s.near_threshold =
      static_cast<int>(((z.array() - s.tau).abs() <= band).count());
  return s;
}

ComponentDecomposition components(const BoolMatrix& mask) {
  const int n = static_cast<int>(mask.rows());
  const int m = static_cast<int>(mask.cols());
  // Nodes 0..n-1 are rows, n..n+m-1 are columns.
  UnionFind uf(n + m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (mask(i, j)) uf.unite(i, n + j);
    }
  }

  ComponentDecomposition d;
  d.labels = IntMatrix::Constant(n, m, -1);
  std::vector<int> id_of_root(static_cast<std::size_t>(n + m), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!mask(i, j)) continue;
      int& id = id_of_root[static_cast<std::size_t>(uf.find(i))];
      if (id < 0) id = d.count++;
      d.labels(i, j) = id;
    }
  }

  d.row_projections.resize(static_cast<std::size_t>(d.count));
  d.col_projections.resize(static_cast<std::size_t>(d.count));
  for (int i = 0; i < n; ++i) {
    const int id = id_of_root[static_cast<std::size_t>(uf.find(i))];
    if (id >= 0) d.row_projections[static_cast<std::size_t>(id)].push_back(i);
  }
  for (int j = 0; j < m; ++j) {
    const int id = id_of_root[static_cast<std::size_t>(uf.find(n + j))];
    if (id >= 0) d.col_projections[static_cast<std::size_t>(id)].push_back(j);
  }
  return d;
}

ComponentDecomposition components(const SupportSet& s) {
  return components(s.mask);
}

bool partition_check(const ComponentDecomposition& d) {
  const int n = static_cast<int>(d.labels.rows());
  const int m = static_cast<int>(d.labels.cols());
  if (d.labels.size() > 0 && d.labels.maxCoeff() >= d.count) return false;
  const auto count = static_cast<std::size_t>(d.count);
  if (d.row_projections.size() != count || d.col_projections.size() != count) {
    return false;
  }

  std::vector<std::vector<int>> rows(count), cols(count);
  std::vector<int> row_owner(static_cast<std::size_t>(n), -1);
  std::vector<int> col_owner(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = d.labels(i, j);
      if (k < 0) continue;
      int& ro = row_owner[static_cast<std::size_t>(i)];
      if (ro >= 0 && ro != k) return false;  // row in two projections
      if (ro < 0) rows[static_cast<std::size_t>(k)].push_back(i);
      ro = k;
      int& co = col_owner[static_cast<std::size_t>(j)];
      if (co >= 0 && co != k) return false;
      if (co < 0) cols[static_cast<std::size_t>(k)].push_back(j);
      co = k;
    }
  }
  for (std::size_t k = 0; k < count; ++k) {
    std::sort(cols[k].begin(), cols[k].end());
    std::vector<int> stored_rows = d.row_projections[k];
    std::vector<int> stored_cols = d.col_projections[k];
    std::sort(stored_rows.begin(), stored_rows.end());
    std::sort(stored_cols.begin(), stored_cols.end());
    if (rows[k].empty() || rows[k] != stored_rows || cols[k] != stored_cols) {
      return false;
    }
  }
  return true;
}

}  // namespace qrot
