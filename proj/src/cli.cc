#include "qrot/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qrot/dual_solver.h"
#include "qrot/io.h"
#include "qrot/potential_polytope.h"
#include "qrot/projection_oracle.h"
#include "qrot/sparsity_lab.h"
#include "qrot/support_analysis.h"

namespace qrot {

namespace {

struct SolveFlags {
  std::string input;
  std::optional<double> eps;
  double tol = 1e-10;
  long max_sweeps = 100000;
  bool symmetric = false;
  std::string normalization = "anchor_first_component_zero";
  double tau_rel = kDefaultTauRel;
  std::uint64_t seed = 0;
  std::string out;
};

struct Loaded {
  InstanceFile file;
  Instance inst;
  bool symmetric = false;
};

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("QROT_SEED"); env != nullptr && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw FormatError(std::string("QROT_SEED is not an integer: '") + env +
                        "'");
    }
  }
  return flag_seed;
}

Loaded load_instance(const std::string& path, std::optional<double> eps,
                     bool symmetric_flag, std::ostream& err) {
  Loaded l;
  l.file = parse_instance_file(read_json_file(path));
  if (eps) l.file.epsilon = *eps;
  std::vector<std::string> warnings;
  l.inst = validate_instance(l.file.to_raw(), &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  l.symmetric = symmetric_flag || l.file.symmetric;
  return l;
}

SolverConfig solver_config(const SolveFlags& f) {
  SolverConfig cfg;
  cfg.tol_residual = f.tol;
  cfg.max_sweeps = f.max_sweeps;
  cfg.normalization = parse_normalization(f.normalization);
  return cfg;
}

std::pair<Potentials, SolveReport> run_solver(const Loaded& l,
                                              const SolverConfig& cfg) {
  return l.symmetric ? solve_symmetric(l.inst, cfg) : solve(l.inst, cfg);
}

ReportFile build_report(const Loaded& l, const SolveFlags& f,
                        const SolverConfig& cfg, const Potentials& p,
                        const SolveReport& report) {
  ReportFile r;
  r.report = report;
  r.potentials = p;
  r.density = density_from_potentials(l.inst, p);
  r.support = support_set(r.density, default_tau(r.density.z, f.tau_rel));
  r.components = components(r.support);
  if (report.converged) {
    try {
      r.polytope = compute_polytope(l.inst, p, r.components, r.support);
    } catch (const PolytopeError&) {
      r.polytope.reset();
    }
  }
  Provenance& pv = r.provenance;
  pv.tol_residual = cfg.tol_residual;
  pv.max_sweeps = cfg.max_sweeps;
  pv.sweeps = report.iterations;
  pv.normalization = to_string(cfg.normalization);
  pv.tau_rel = f.tau_rel;
  pv.seed = effective_seed(f.seed);
  pv.epsilon = l.inst.epsilon;
  pv.symmetric = l.symmetric;
  return r;
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw FormatError("cannot write '" + path + "'");
  file << text;
}

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--eps", f.eps, "Regularization parameter (overrides file)");
  cmd->add_option("--tol", f.tol, "L-infinity marginal residual tolerance")
      ->capture_default_str();
  cmd->add_option("--max-sweeps", f.max_sweeps, "Sweep budget")
      ->capture_default_str();
  cmd->add_flag("--symmetric", f.symmetric, "Solve with f = g");
  cmd->add_option("--normalization", f.normalization,
                  "anchor_first_component_zero | mean_zero_f | none")
      ->capture_default_str();
  cmd->add_option("--tau-rel", f.tau_rel,
                  "Support threshold relative to max density")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed (QROT_SEED overrides)")
      ->capture_default_str();
  cmd->add_option("--out", f.out, "Output path (default stdout)");
}

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err) {
  const Loaded l = load_instance(f.input, f.eps, f.symmetric, err);
  const SolverConfig cfg = solver_config(f);
  const auto [p, report] = run_solver(l, cfg);
  emit(report_to_json(build_report(l, f, cfg, p, report)), f.out, out);
  if (!report.converged) {
    err << "not converged: residual " << report.marginal_residual << " after "
        << report.iterations << " sweeps\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_analyze(const SolveFlags& f, const std::string& instance_path,
                int samples, std::ostream& out, std::ostream& err) {
  const Json input = read_json_file(f.input);
  Loaded l;
  Potentials p;
  SolveReport report;
  if (input.contains("report")) {
    if (instance_path.empty()) {
      throw FormatError("analyzing a report needs --instance");
    }
    l = load_instance(instance_path, f.eps, f.symmetric, err);
    const ReportFile r = report_from_json(input);
    p = r.potentials;
    report = r.report;
  } else {
    l = load_instance(f.input, f.eps, f.symmetric, err);
    std::tie(p, report) = run_solver(l, solver_config(f));
  }
  const CouplingDensity d = density_from_potentials(l.inst, p);
  const SupportSet s = support_set(d, default_tau(d.z, f.tau_rel));
  const ComponentDecomposition dec = components(s);
  Json j{{"support_size", s.size()},
         {"tau", s.tau},
         {"near_threshold", s.near_threshold},
         {"components", components_to_json(dec)},
         {"partition_ok", partition_check(dec)},
         {"converged", report.converged}};
  if (s.near_threshold > 0) {
    err << "warning: " << s.near_threshold
        << " density entries lie at the support threshold\n";
  }
  const PolytopeDescription pd = compute_polytope(l.inst, p, dec, s);
  j["polytope"] = polytope_to_json(pd);
  if (samples > 0) {
    Json arr = Json::array();
    for (const Vector& a : sample_shifts(pd, samples, effective_seed(f.seed))) {
      arr.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    }
    j["samples"] = std::move(arr);
  }
  if (l.symmetric && p.symmetric) {
    const SymmetricSlice slice = symmetric_slice(pd, dec);
    j["symmetric_slice"] = {
        {"mirror", slice.mirror},
        {"feasible", slice.feasible},
        {"lower", std::vector<double>(slice.lower.data(),
                                      slice.lower.data() + slice.lower.size())},
        {"upper", std::vector<double>(slice.upper.data(),
                                      slice.upper.data() + slice.upper.size())}};
  }
  emit(j, f.out, out);
  return report.converged ? kExitOk : kExitNotConverged;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw FormatError("--eps-list entry '" + item + "' is not a number");
    }
  }
  return values;
}

int cmd_sweep(const SolveFlags& f, const std::string& eps_list, double delta,
              std::ostream& out, std::ostream& err) {
  const Loaded l = load_instance(f.input, std::nullopt, false, err);
  if (!l.file.generator || l.file.generator->kind != "quadratic_1d") {
    throw FormatError("sweep needs a quadratic_1d cost_generator");
  }
  SweepOptions opts;
  opts.solver = solver_config(f);
  std::vector<double> mu(l.inst.mu.data(), l.inst.mu.data() + l.inst.mu.size());
  std::vector<double> nu(l.inst.nu.data(), l.inst.nu.data() + l.inst.nu.size());
  const SweepResult r =
      epsilon_sweep(l.file.generator->x, mu, l.file.generator->y, nu,
                    parse_list(eps_list), delta, opts);
  std::ostringstream csv;
  write_sweep_csv(r, csv);
  if (f.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(f.out);
    if (!file) throw FormatError("cannot write '" + f.out + "'");
    file << csv.str();
  }
  const bool all = std::all_of(r.converged.begin(), r.converged.end(),
                               [](bool c) { return c; });
  return all ? kExitOk : kExitNotConverged;
}

int cmd_verify(const SolveFlags& f, const std::string& potentials_path,
               double tol, std::ostream& out, std::ostream& err) {
  const Loaded l = load_instance(f.input, f.eps, f.symmetric, err);
  const Potentials candidate = parse_potentials(read_json_file(potentials_path));
  if (static_cast<std::size_t>(candidate.f.size()) != l.inst.n() ||
      static_cast<std::size_t>(candidate.g.size()) != l.inst.m()) {
    throw InstanceError(InstanceError::Kind::kDimensionMismatch, "potentials");
  }
  const auto [p, report] = run_solver(l, solver_config(f));
  if (!report.converged) {
    err << "reference solve did not converge\n";
    return kExitNotConverged;
  }
  const Matrix z_star = density_from_potentials(l.inst, p).z;
  const bool ok = verify_potentials(l.inst, candidate, z_star, tol);
  const double error =
      (density_from_potentials(l.inst, candidate).z - z_star).cwiseAbs().maxCoeff();
  emit(Json{{"valid", ok}, {"max_density_error", error}, {"tol", tol}}, f.out,
       out);
  return ok ? kExitOk : kExitRejected;
}

int cmd_oracle(const SolveFlags& f, double proj_tol, long max_iter,
               std::ostream& out, std::ostream& err) {
  const Loaded l = load_instance(f.input, f.eps, f.symmetric, err);
  const auto [p, report] = run_solver(l, solver_config(f));
  ProjectionOptions opts;
  opts.tol = proj_tol;
  opts.max_iter = max_iter;
  CouplingDensity projected;
  try {
    projected = project(l.inst, opts);
  } catch (const ProjectionError& e) {
    err << e.what() << '\n';
    return kExitNotConverged;
  }
  const CouplingDensity dual = density_from_potentials(l.inst, p);
  const double diff = (dual.z - projected.z).cwiseAbs().maxCoeff();
  const bool agree = diff <= 1e-6;
  emit(Json{{"max_abs_difference", diff},
            {"agree", agree},
            {"primal_dual_solver", primal_objective(l.inst, dual)},
            {"primal_projection", primal_objective(l.inst, projected)},
            {"dual_value", report.dual_value},
            {"dual_converged", report.converged}},
       f.out, out);
  if (!report.converged) return kExitNotConverged;
  return agree ? kExitOk : kExitRejected;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Quadratically regularized optimal transport toolkit", "qrot"};
  app.require_subcommand(1);

  SolveFlags flags;
  std::string instance_path;
  std::string eps_list = "1,0.1,0.01,0.001";
  std::string potentials_path;
  double delta = 0.1;
  double verify_tol = 1e-8;
  double proj_tol = 1e-10;
  long max_iter = 1000000;
  int samples = 0;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("input", flags.input, "Instance file")->required();
  add_solver_flags(solve_cmd, flags);

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Support components and potential polytope");
  analyze_cmd->add_option("input", flags.input, "Instance or report file")
      ->required();
  analyze_cmd->add_option("--instance", instance_path,
                          "Instance file when the input is a report");
  analyze_cmd->add_option("--samples", samples, "Number of sampled shifts");
  add_solver_flags(analyze_cmd, flags);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Epsilon sweep (CSV)");
  sweep_cmd->add_option("input", flags.input, "quadratic_1d instance file")
      ->required();
  sweep_cmd->add_option("--eps-list", eps_list, "Comma-separated epsilons")
      ->capture_default_str();
  sweep_cmd->add_option("--delta", delta, "Neighborhood radius")
      ->capture_default_str();
  add_solver_flags(sweep_cmd, flags);

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Check a user-supplied potential pair");
  verify_cmd->add_option("input", flags.input, "Instance file")->required();
  verify_cmd->add_option("--potentials", potentials_path, "Potentials file")
      ->required();
  verify_cmd->add_option("--verify-tol", verify_tol,
                         "L-infinity tolerance on the density")
      ->capture_default_str();
  add_solver_flags(verify_cmd, flags);

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Compare the dual solver with Dykstra");
  oracle_cmd->add_option("input", flags.input, "Instance file")->required();
  oracle_cmd->add_option("--proj-tol", proj_tol, "Dykstra tolerance")
      ->capture_default_str();
  oracle_cmd->add_option("--max-iter", max_iter, "Dykstra iteration budget")
      ->capture_default_str();
  add_solver_flags(oracle_cmd, flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*solve_cmd) return cmd_solve(flags, out, err);
    if (*analyze_cmd) {
      return cmd_analyze(flags, instance_path, samples, out, err);
    }
    if (*sweep_cmd) return cmd_sweep(flags, eps_list, delta, out, err);
    if (*verify_cmd) {
      return cmd_verify(flags, potentials_path, verify_tol, out, err);
    }
    if (*oracle_cmd) return cmd_oracle(flags, proj_tol, max_iter, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace qrot
