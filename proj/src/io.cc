#include "qrot/io.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename T>
T get_field(const Json& j, const char* field) {
  if (!j.contains(field)) {
    throw FormatError(std::string("missing field '") + field + "'");
  }
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + field + "': " + e.what());
  }
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return get_field<T>(j, field);
}

Json vec_to_json(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vec_from_json(const Json& j, const char* field) {
  const auto v = get_field<std::vector<double>>(j, field);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename M, typename Cell>
Json mat_to_json(const M& a, Cell cell) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(cell(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json mat_to_json(const Matrix& a) {
  return mat_to_json(a, [](double v) { return Json(v); });
}

// +inf becomes the string "inf".
Json extended_to_json(const Matrix& a) {
  return mat_to_json(a, [](double v) {
    if (v == kInf) return Json("inf");
    return Json(v);
  });
}

template <typename Scalar, typename Convert>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> mat_from_json(
    const Json& j, const char* field, Convert convert) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw FormatError(std::string("field '") + field +
                      "' must be an array of rows");
  }
  const Json& rows = j.at(field);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw FormatError(std::string("field '") + field + "' is ragged");
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      try {
        out(i, k) = convert(row[static_cast<std::size_t>(k)]);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + field + "': " + e.what());
      }
    }
  }
  return out;
}

Matrix extended_from_json(const Json& j, const char* field) {
  return mat_from_json<double>(j, field, [](const Json& v) {
    if (v.is_string()) {
      if (v.get<std::string>() == "inf") return kInf;
      throw FormatError("unexpected string in numeric matrix");
    }
    return v.get<double>();
  });
}

Json solve_report_to_json(const SolveReport& r) {
  return Json{{"primal_value", r.primal_value},
              {"dual_value", r.dual_value},
              {"duality_gap", r.duality_gap},
              {"marginal_residual", r.marginal_residual},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"ascent_violations", r.ascent_violations},
              {"safeguard_steps", r.safeguard_steps}};
}

SolveReport solve_report_from_json(const Json& j) {
  SolveReport r;
  r.primal_value = get_field<double>(j, "primal_value");
  r.dual_value = get_field<double>(j, "dual_value");
  r.duality_gap = get_field<double>(j, "duality_gap");
  r.marginal_residual = get_field<double>(j, "marginal_residual");
  r.iterations = get_field<long>(j, "iterations");
  r.converged = get_field<bool>(j, "converged");
  r.ascent_violations = get_optional<long>(j, "ascent_violations").value_or(0);
  r.safeguard_steps = get_optional<long>(j, "safeguard_steps").value_or(0);
  return r;
}

}  // namespace

RawInstance InstanceFile::to_raw() const {
  RawInstance raw;
  raw.mu = mu;
  raw.nu = nu;
  raw.mu_tilde = mu_tilde.value_or(mu);
  raw.nu_tilde = nu_tilde.value_or(nu);
  raw.epsilon = epsilon;
  if (cost) {
    raw.cost = *cost;
    return raw;
  }
  const CostGenerator& gen = *generator;
  if (gen.kind == "quadratic_1d") {
    if (gen.x.size() != mu.size()) {
      throw InstanceError(InstanceError::Kind::kDimensionMismatch,
                          "cost_generator.x", std::nullopt,
                          "length differs from mu");
    }
    if (gen.y.size() != nu.size()) {
      throw InstanceError(InstanceError::Kind::kDimensionMismatch,
                          "cost_generator.y", std::nullopt,
                          "length differs from nu");
    }
    raw.cost.assign(gen.x.size(), std::vector<double>(gen.y.size()));
    for (std::size_t i = 0; i < gen.x.size(); ++i) {
      for (std::size_t j = 0; j < gen.y.size(); ++j) {
        const double d = gen.x[i] - gen.y[j];
        raw.cost[i][j] = d * d;
      }
    }
  } else if (gen.kind == "indicator_offdiag") {
    if (mu.size() != nu.size()) {
      throw InstanceError(InstanceError::Kind::kDimensionMismatch, "nu",
                          std::nullopt,
                          "indicator_offdiag needs equal support sizes");
    }
    raw.cost.assign(mu.size(), std::vector<double>(nu.size(), 0.0));
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t j = 0; j < nu.size(); ++j) {
        if (i != j) raw.cost[i][j] = 2.0 + gen.gamma;
      }
    }
  } else {
    throw FormatError("unknown cost_generator kind '" + gen.kind + "'");
  }
  return raw;
}

InstanceFile parse_instance_file(const Json& j) {
  if (!j.is_object()) throw FormatError("instance file must be a JSON object");
  InstanceFile f;
  f.schema_version = get_field<int>(j, "schema_version");
  if (f.schema_version != 1) {
    throw FormatError("unsupported schema_version " +
                      std::to_string(f.schema_version));
  }
  f.mu = get_field<std::vector<double>>(j, "mu");
  f.nu = get_field<std::vector<double>>(j, "nu");
  f.mu_tilde = get_optional<std::vector<double>>(j, "mu_tilde");
  f.nu_tilde = get_optional<std::vector<double>>(j, "nu_tilde");
  f.epsilon = get_optional<double>(j, "epsilon").value_or(1.0);
  f.symmetric = get_optional<bool>(j, "symmetric").value_or(false);

  const bool has_cost = j.contains("cost") && !j.at("cost").is_null();
  const bool has_gen =
      j.contains("cost_generator") && !j.at("cost_generator").is_null();
  if (has_cost == has_gen) {
    throw FormatError(
        "exactly one of 'cost' and 'cost_generator' must be present");
  }
  if (has_cost) {
    f.cost = get_field<std::vector<std::vector<double>>>(j, "cost");
  } else {
    const Json& g = j.at("cost_generator");
    CostGenerator gen;
    gen.kind = get_field<std::string>(g, "kind");
    if (gen.kind == "quadratic_1d") {
      gen.x = get_field<std::vector<double>>(g, "x");
      gen.y = get_field<std::vector<double>>(g, "y");
    } else if (gen.kind == "indicator_offdiag") {
      gen.gamma = get_field<double>(g, "gamma");
    } else {
      throw FormatError("unknown cost_generator kind '" + gen.kind + "'");
    }
    f.generator = std::move(gen);
  }
  return f;
}

Json instance_file_to_json(const InstanceFile& f) {
  Json j{{"schema_version", f.schema_version},
         {"mu", f.mu},
         {"nu", f.nu},
         {"epsilon", f.epsilon},
         {"symmetric", f.symmetric}};
  if (f.mu_tilde) j["mu_tilde"] = *f.mu_tilde;
  if (f.nu_tilde) j["nu_tilde"] = *f.nu_tilde;
  if (f.cost) j["cost"] = *f.cost;
  if (f.generator) {
    Json g{{"kind", f.generator->kind}};
    if (f.generator->kind == "quadratic_1d") {
      g["x"] = f.generator->x;
      g["y"] = f.generator->y;
    } else {
      g["gamma"] = f.generator->gamma;
    }
    j["cost_generator"] = std::move(g);
  }
  return j;
}

Json components_to_json(const ComponentDecomposition& d) {
  return Json{{"count", d.count},
              {"labels", mat_to_json(d.labels, [](int v) { return Json(v); })},
              {"row_projections", d.row_projections},
              {"col_projections", d.col_projections}};
}

ComponentDecomposition components_from_json(const Json& j) {
  ComponentDecomposition d;
  d.count = get_field<int>(j, "count");
  d.labels = mat_from_json<int>(j, "labels",
                                [](const Json& v) { return v.get<int>(); });
  d.row_projections = get_field<std::vector<std::vector<int>>>(j, "row_projections");
  d.col_projections = get_field<std::vector<std::vector<int>>>(j, "col_projections");
  return d;
}

Json polytope_to_json(const PolytopeDescription& pd) {
  Json rigid = Json::array();
  for (const auto& [i, k] : pd.rigid_pairs) rigid.push_back({i, k});
  return Json{{"n_components", pd.n_components},
              {"a", extended_to_json(pd.a)},
              {"dist", extended_to_json(pd.dist)},
              {"dimension", pd.dimension},
              {"rigid_pairs", std::move(rigid)},
              {"excluded_rows", pd.excluded_rows},
              {"excluded_cols", pd.excluded_cols}};
}

PolytopeDescription polytope_from_json(const Json& j) {
  PolytopeDescription pd;
  pd.n_components = get_field<int>(j, "n_components");
  pd.a = extended_from_json(j, "a");
  pd.dist = extended_from_json(j, "dist");
  if (pd.n_components == 0) {
    pd.a.resize(0, 0);
    pd.dist.resize(0, 0);
  }
  pd.dimension = get_field<int>(j, "dimension");
  for (const auto& pair :
       get_field<std::vector<std::vector<int>>>(j, "rigid_pairs")) {
    if (pair.size() != 2) throw FormatError("rigid pair must have 2 entries");
    pd.rigid_pairs.emplace_back(pair[0], pair[1]);
  }
  pd.excluded_rows =
      get_optional<std::vector<int>>(j, "excluded_rows").value_or(std::vector<int>{});
  pd.excluded_cols =
      get_optional<std::vector<int>>(j, "excluded_cols").value_or(std::vector<int>{});
  return pd;
}

Json report_to_json(const ReportFile& r) {
  const Provenance& pv = r.provenance;
  return Json{
      {"schema_version", 1},
      {"report", solve_report_to_json(r.report)},
      {"potentials",
       {{"f", vec_to_json(r.potentials.f)},
        {"g", vec_to_json(r.potentials.g)},
        {"symmetric", r.potentials.symmetric}}},
      {"density",
       {{"z", mat_to_json(r.density.z)}, {"pi", mat_to_json(r.density.pi)}}},
      {"support",
       {{"tau", r.support.tau},
        {"near_threshold", r.support.near_threshold},
        {"mask", mat_to_json(r.support.mask, [](bool b) { return Json(b); })}}},
      {"components", components_to_json(r.components)},
      {"polytope", r.polytope ? polytope_to_json(*r.polytope) : Json(nullptr)},
      {"provenance",
       {{"tol_residual", pv.tol_residual},
        {"max_sweeps", pv.max_sweeps},
        {"sweeps", pv.sweeps},
        {"normalization", pv.normalization},
        {"tau_rel", pv.tau_rel},
        {"seed", pv.seed},
        {"epsilon", pv.epsilon},
        {"symmetric", pv.symmetric}}}};
}

ReportFile report_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("report must be a JSON object");
  ReportFile r;
  r.report = solve_report_from_json(get_field<Json>(j, "report"));

  const Json pj = get_field<Json>(j, "potentials");
  r.potentials.f = vec_from_json(pj, "f");
  r.potentials.g = vec_from_json(pj, "g");
  r.potentials.symmetric = get_field<bool>(pj, "symmetric");

  const Json dj = get_field<Json>(j, "density");
  auto as_double = [](const Json& v) { return v.get<double>(); };
  r.density.z = mat_from_json<double>(dj, "z", as_double);
  r.density.pi = mat_from_json<double>(dj, "pi", as_double);

  const Json sj = get_field<Json>(j, "support");
  r.support.tau = get_field<double>(sj, "tau");
  r.support.near_threshold = get_field<int>(sj, "near_threshold");
  r.support.mask =
      mat_from_json<bool>(sj, "mask", [](const Json& v) { return v.get<bool>(); });

  r.components = components_from_json(get_field<Json>(j, "components"));
  if (j.contains("polytope") && !j.at("polytope").is_null()) {
    r.polytope = polytope_from_json(j.at("polytope"));
  }

  const Json vj = get_field<Json>(j, "provenance");
  Provenance& pv = r.provenance;
  pv.tol_residual = get_field<double>(vj, "tol_residual");
  pv.max_sweeps = get_field<long>(vj, "max_sweeps");
  pv.sweeps = get_field<long>(vj, "sweeps");
  pv.normalization = get_field<std::string>(vj, "normalization");
  pv.tau_rel = get_field<double>(vj, "tau_rel");
  pv.seed = get_field<std::uint64_t>(vj, "seed");
  pv.epsilon = get_field<double>(vj, "epsilon");
  pv.symmetric = get_field<bool>(vj, "symmetric");
  return r;
}

bool operator==(const SolveReport& a, const SolveReport& b) {
  return a.primal_value == b.primal_value && a.dual_value == b.dual_value &&
         a.duality_gap == b.duality_gap &&
         a.marginal_residual == b.marginal_residual &&
         a.iterations == b.iterations && a.converged == b.converged &&
         a.ascent_violations == b.ascent_violations &&
         a.safeguard_steps == b.safeguard_steps;
}

namespace {

template <typename M>
bool same_matrix(const M& a, const M& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_polytope(const PolytopeDescription& a, const PolytopeDescription& b) {
  return a.n_components == b.n_components && same_matrix(a.a, b.a) &&
         same_matrix(a.dist, b.dist) && a.dimension == b.dimension &&
         a.rigid_pairs == b.rigid_pairs && a.excluded_rows == b.excluded_rows &&
         a.excluded_cols == b.excluded_cols;
}

}  // namespace

bool operator==(const ReportFile& a, const ReportFile& b) {
  if (a.polytope.has_value() != b.polytope.has_value()) return false;
  if (a.polytope && !same_polytope(*a.polytope, *b.polytope)) return false;
  return a.report == b.report && same_matrix(a.potentials.f, b.potentials.f) &&
         same_matrix(a.potentials.g, b.potentials.g) &&
         a.potentials.symmetric == b.potentials.symmetric &&
         same_matrix(a.density.z, b.density.z) &&
         same_matrix(a.density.pi, b.density.pi) &&
         a.support.tau == b.support.tau &&
         a.support.near_threshold == b.support.near_threshold &&
         same_matrix(a.support.mask, b.support.mask) &&
         a.components.count == b.components.count &&
         same_matrix(a.components.labels, b.components.labels) &&
         a.components.row_projections == b.components.row_projections &&
         a.components.col_projections == b.components.col_projections &&
         a.provenance == b.provenance;
}

Potentials parse_potentials(const Json& j) {
  const Json& src = j.contains("potentials") ? j.at("potentials") : j;
  Potentials p;
  p.f = vec_from_json(src, "f");
  p.g = vec_from_json(src, "g");
  p.symmetric = get_optional<bool>(src, "symmetric").value_or(false);
  return p;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace qrot
