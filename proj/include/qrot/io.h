#ifndef QROT_IO_H_
#define QROT_IO_H_

// File formats: JSON instance files (schema_version 1) and JSON reports.
//
// Instance file:
//   {
//     "schema_version": 1,
//     "mu": [...], "nu": [...],
//     "mu_tilde": [...], "nu_tilde": [...],      // optional, default mu / nu
//     "cost": [[...], ...]                       // dense, row-major
//       or "cost_generator": {"kind": "quadratic_1d", "x": [...], "y": [...]}
//       or "cost_generator": {"kind": "indicator_offdiag", "gamma": g}
//     "epsilon": 1.0,                            // optional
//     "symmetric": false                         // optional
//   }
// Exactly one of "cost" and "cost_generator" must be present.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrot/core_model.h"
#include "qrot/dual_solver.h"
#include "qrot/potential_polytope.h"
#include "qrot/support_analysis.h"

namespace qrot {

using Json = nlohmann::json;

class FormatError : public Error {
 public:
  using Error::Error;
};

struct CostGenerator {
  std::string kind;  // "quadratic_1d" or "indicator_offdiag"
  std::vector<double> x;
  std::vector<double> y;
  double gamma = 0.0;
};

struct InstanceFile {
  int schema_version = 1;
  std::vector<double> mu;
  std::vector<double> nu;
  std::optional<std::vector<double>> mu_tilde;
  std::optional<std::vector<double>> nu_tilde;
  std::optional<std::vector<std::vector<double>>> cost;
  std::optional<CostGenerator> generator;
  double epsilon = 1.0;
  bool symmetric = false;

  // Expands the generator and fills default reference weights.
  RawInstance to_raw() const;
};

InstanceFile parse_instance_file(const Json& j);
Json instance_file_to_json(const InstanceFile& f);

struct Provenance {
  double tol_residual = 1e-10;
  long max_sweeps = 100000;
  long sweeps = 0;
  std::string normalization = "anchor_first_component_zero";
  double tau_rel = kDefaultTauRel;
  std::uint64_t seed = 0;
  double epsilon = 1.0;
  bool symmetric = false;

  bool operator==(const Provenance&) const = default;
};

struct ReportFile {
  SolveReport report;
  Potentials potentials;
  CouplingDensity density;
  SupportSet support;
  ComponentDecomposition components;
  std::optional<PolytopeDescription> polytope;
  Provenance provenance;
};

bool operator==(const SolveReport& a, const SolveReport& b);
bool operator==(const ReportFile& a, const ReportFile& b);

Json report_to_json(const ReportFile& r);
ReportFile report_from_json(const Json& j);

Json polytope_to_json(const PolytopeDescription& pd);
PolytopeDescription polytope_from_json(const Json& j);
Json components_to_json(const ComponentDecomposition& d);
ComponentDecomposition components_from_json(const Json& j);

// {"f": [...], "g": [...]} or any report holding a "potentials" block.
Potentials parse_potentials(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace qrot

#endif  // QROT_IO_H_
