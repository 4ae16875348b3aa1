// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "property_checks.h"
#include "qrot/core_model.h"
#include "qrot/dual_solver.h"
#include "qrot/potential_polytope.h"
#include "qrot/projection_oracle.h"
#include "qrot/sparsity_lab.h"
#include "qrot/support_analysis.h"
#include "test_support.h"

namespace {

using namespace qrot;
using namespace qrot::testing;

// Collects failed sub-checks of one criterion.
class Checks {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && first_.empty()) first_ = what;
    ok_ = ok_ && cond;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, os.str());
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }

  bool ok() const { return ok_; }
  const std::string& first() const { return first_; }
  const std::string& notes() const { return notes_; }

 private:
  bool ok_ = true;
  std::string first_;
  std::string notes_;
};

struct Solved {
  Potentials p;
  SolveReport report;
  Matrix z;
  SupportSet s;
  ComponentDecomposition d;
  PolytopeDescription pd;
};

Solved solve_and_analyze(const Instance& inst) {
  Solved r;
  std::tie(r.p, r.report) = solve(inst);
  r.z = density_from_potentials(inst, r.p).z;
  r.s = support_set(r.z);
  r.d = components(r.s);
  r.pd = compute_polytope(inst, r.p, r.d, r.s);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// 1. Two-point diagonal transport: z, gap, components, slack and the
//    accepted/rejected potential family.
void diagonal_regime(Checks& c) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    const std::string tag = "gamma=" + fmt(gamma);
    const Instance inst = diagonal_example(gamma);
    const Solved s = solve_and_analyze(inst);
    Matrix expected(2, 2);
    expected << 2.0, 0.0, 0.0, 2.0;
    c.expect(s.report.converged, tag + " converged");
    c.near(max_abs_diff(s.z, expected), 0.0, 1e-8, tag + " z");
    c.near(s.report.duality_gap, 0.0, 1e-10, tag + " gap");
    c.expect(s.d.count == 2, tag + " N=2");
    c.near(s.pd.a(0, 1), gamma, 1e-8, tag + " a12");
    c.near(s.pd.a(1, 0), gamma, 1e-8, tag + " a21");
    for (int u = 0; u < 5; ++u) {
      for (int v = 0; v < 5; ++v) {
        const double alpha = 1.0 - gamma / 2.0 + gamma * u / 4.0;
        const double beta = 1.0 - gamma / 2.0 + gamma * v / 4.0;
        c.expect(verify_potentials(inst, diagonal_family(alpha, beta), s.z),
                 tag + " accepts (" + fmt(alpha) + "," + fmt(beta) + ")");
      }
    }
    c.expect(!verify_potentials(inst, diagonal_family(1.0, 1.0 + gamma + 0.1),
                                s.z),
             tag + " rejects |alpha-beta| = gamma + 0.1");
  }
}

// 2. Cheap off-diagonal cost: full support, one component.
void full_support_regime(Checks& c) {
  for (double eta : {0.5, 1.0, 1.5}) {
    const std::string tag = "eta=" + fmt(eta);
    const Solved s = solve_and_analyze(offdiag_cost_example(eta));
    Matrix expected(2, 2);
    expected << 1.0 + eta / 2.0, 1.0 - eta / 2.0, 1.0 - eta / 2.0,
        1.0 + eta / 2.0;
    c.near(max_abs_diff(s.z, expected), 0.0, 1e-8, tag + " z");
    c.expect(s.d.count == 1, tag + " N=1");
    c.expect(s.pd.dimension == 1, tag + " dimension 1");
  }
}

// 3. gamma = 0: two components tied by a rigid pair.
void boundary_regime(Checks& c) {
  const Solved s = solve_and_analyze(diagonal_example(0.0));
  c.expect(s.d.count == 2, "N=2");
  c.expect(s.pd.rigid_pairs.size() == 1, "one rigid pair");
  c.expect(s.pd.dimension == 1, "dimension 1");
}

// 4. Symmetric solve on the off-diagonal counterexample.
void symmetric_regime(Checks& c) {
  const Instance inst = symmetric_counterexample(1.0);
  const auto [p, rep] = solve_symmetric(inst);
  c.expect(rep.converged, "converged");
  c.expect(p.f == p.g, "f = g");
  const Matrix z = density_from_potentials(inst, p).z;
  Matrix expected(2, 2);
  expected << 0.0, 2.0, 2.0, 0.0;
  c.near(max_abs_diff(z, expected), 0.0, 1e-8, "z");
  auto pair = [](double a) {
    Vector f(2);
    f << a, 2.0 - a;
    return Potentials{f, f, true};
  };
  for (double a : {0.5, 1.0, 1.5}) {
    c.expect(verify_potentials(inst, pair(a), z), "accepts f(0)=" + fmt(a));
  }
  c.expect(!verify_potentials(inst, pair(1.6), z), "rejects f(0)=1.6");
}

// 5. Zero cost with uniform references and skewed marginals.
void reference_regime(Checks& c) {
  for (double lambda : {0.1, 0.25}) {
    const std::string tag = "lambda=" + fmt(lambda);
    const Instance inst = zero_cost_reference_example(lambda);
    const Solved s = solve_and_analyze(inst);
    BoolMatrix want(2, 2);
    want << true, true, true, false;
    c.expect(s.s.mask == want, tag + " support {(0,0),(0,1),(1,0)}");
    Vector f(2);
    f << 2.0 - 4.0 * lambda, -2.0 + 8.0 * lambda;
    c.expect(verify_potentials(inst, Potentials{f, f, true}, s.z, 1e-8),
             tag + " paper pair verifies");
  }
  const Instance inst = zero_cost_reference_example(0.3);
  const auto closed = zero_cost_closed_form(inst);
  c.expect(closed.has_value(), "lambda=0.3 closed-form branch");
  const Solved s = solve_and_analyze(inst);
  const Vector r = inst.mu_ratio();
  const Vector q = inst.nu_ratio();
  Matrix expected(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) expected(i, j) = r[i] + q[j] - 1.0;
  }
  c.near(max_abs_diff(s.z, expected), 0.0, 1e-8, "lambda=0.3 z");
  c.expect(s.s.size() == 4, "lambda=0.3 full support");
  if (closed) {
    c.near(max_abs_diff(closed->second.z, expected), 0.0, 1e-12,
           "lambda=0.3 closed form z");
  }
}

// 6. Zero cost with references equal to marginals: the product coupling.
void product_regime(Checks& c) {
  std::mt19937_64 rng(6006);
  for (int k = 0; k < 10; ++k) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int m = 2 + static_cast<int>(rng() % 7);
    Instance inst = random_instance(rng, n, m);
    inst.cost.setZero();
    inst.mu_tilde = inst.mu;
    inst.nu_tilde = inst.nu;
    const Matrix product = inst.mu * inst.nu.transpose();
    const auto [p, rep] = solve(inst);
    c.near(max_abs_diff(density_from_potentials(inst, p).pi, product), 0.0,
           1e-8, "dual solver pi, pair " + std::to_string(k));
    c.near(max_abs_diff(project(inst).pi, product), 0.0, 1e-8,
           "projection pi, pair " + std::to_string(k));
  }
}

// 7. Dual solver against the projection oracle.
void oracle_agreement(Checks& c) {
  std::mt19937_64 rng(7007);
  double worst_z = 0.0;
  double worst_gap = 0.0;
  for (int k = 0; k < 25; ++k) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const int m = 1 + static_cast<int>(rng() % 12);
    const Instance inst = random_instance(rng, n, m);
    const auto [p, rep] = solve(inst);
    const CouplingDensity oracle = project(inst);
    const double dz =
        max_abs_diff(density_from_potentials(inst, p).z, oracle.z);
    const double gap =
        std::abs(primal_objective(inst, oracle) - rep.dual_value);
    worst_z = std::max(worst_z, dz);
    worst_gap = std::max(worst_gap, gap);
    c.expect(rep.converged, "converged, instance " + std::to_string(k));
    c.near(dz, 0.0, 1e-6, "z difference, instance " + std::to_string(k));
    c.near(gap, 0.0, 1e-8, "|P - D|, instance " + std::to_string(k));
  }
  c.note("max |dz| " + fmt(worst_z) + ", max |P-D| " + fmt(worst_gap));
}

// 8. Invariant suites.
void invariant_suites(Checks& c) {
  constexpr int kCases = 200;
  const std::vector<std::pair<std::string, PropertyResult>> results = {
      {"weak duality", check_weak_duality(8001, kCases)},
      {"shift invariance", check_shift_invariance(8002, kCases)},
      {"eps rescaling", check_epsilon_rescaling(8003, kCases)},
      {"oscillation", check_oscillation_bound(8004, kCases)},
      {"boundedness", check_boundedness(8005, kCases)},
      {"determinism given g", check_potential_determinism(8006, kCases)},
      {"component oracle", check_component_oracle(8007, kCases)},
      {"polytope soundness", check_polytope_soundness(8008, kCases)},
      {"variational inequality", check_variational_inequality(8009, kCases)},
  };
  for (const auto& [name, r] : results) {
    c.expect(r.cases == kCases && r.ok(),
             name + ": " + std::to_string(r.failures) + " failures (" +
                 r.first_failure + ")");
    c.note(name + " worst " + fmt(r.worst));
  }
}

// 9. Sparsity sweep on a 20-point grid with quadratic cost.
void sparsity_sweep(Checks& c) {
  std::vector<double> xs(20);
  for (int i = 0; i < 20; ++i) xs[static_cast<std::size_t>(i)] = (i + 0.5) / 20;
  const std::vector<double> w(20, 0.05);
  const SweepResult r =
      epsilon_sweep(xs, w, xs, w, {1.0, 0.1, 0.01, 0.001}, 0.1);
  for (std::size_t k = 0; k < r.epsilons.size(); ++k) {
    c.expect(r.converged[k], "converged at eps=" + fmt(r.epsilons[k]));
  }
  c.expect(r.containment.back() == 1.0,
           "terminal containment " + fmt(r.containment.back()));
  c.expect(r.support_sizes.back() < r.support_sizes.front(),
           "support shrinks");
  const auto& t = r.potentials_trace;
  const double late = (t[2].f - t[3].f).cwiseAbs().maxCoeff();
  const double early = (t[1].f - t[2].f).cwiseAbs().maxCoeff();
  c.expect(late < early, "Cauchy: " + fmt(late) + " < " + fmt(early));
  std::string sizes;
  for (int s : r.support_sizes) sizes += (sizes.empty() ? "" : "/") + std::to_string(s);
  c.note("support " + sizes + ", f steps " + fmt(early) + " -> " + fmt(late));
}

// 10. Block cost on the unit interval, discretized on ten midpoints.
void block_refinement(Checks& c) {
  for (double gamma : {0.5, 1.0, 2.0}) {
    const std::string tag = "gamma=" + fmt(gamma);
    const Solved s = solve_and_analyze(discretize(block_cost_spec(gamma), 10));
    c.expect(s.pd.n_components == 2, tag + " N=2");
    c.expect(s.pd.dimension == 2, tag + " dimension 2");
    if (s.pd.n_components == 2) {
      c.near(s.pd.a(0, 1), gamma, 1e-6, tag + " a12");
      c.near(s.pd.a(1, 0), gamma, 1e-6, tag + " a21");
    }
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Checks&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "diagonal transport, gamma in {0.5, 1, 2}", 1.0, diagonal_regime},
      {2, "full-support regime, eta in {0.5, 1, 1.5}", 1.0, full_support_regime},
      {3, "boundary gamma = 0 is rigid", 1.0, boundary_regime},
      {4, "symmetric off-diagonal transport", 1.0, symmetric_regime},
      {5, "zero cost with uniform references", 1.0, reference_regime},
      {6, "zero cost product coupling", 5.0, product_regime},
      {7, "dual solver vs projection oracle", 30.0, oracle_agreement},
      {8, "invariant suites", 60.0, invariant_suites},
      {9, "1D sparsity sweep", 10.0, sparsity_sweep},
      {10, "block cost at grid 10", 1.0, block_refinement},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    Checks c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    c.expect(secs < cr.budget_seconds, "runtime " + fmt(secs) + " s over budget");
    const bool ok = c.ok();
    failed += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.3f s)%s%s\n", ok ? "PASS" : "FAIL",
                cr.id, cr.name, secs, ok ? "" : " -- ",
                ok ? "" : c.first().c_str());
    if (!c.notes().empty()) std::printf("    %s\n", c.notes().c_str());
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
