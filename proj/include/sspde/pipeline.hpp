#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sspde/solver.hpp"

namespace sspde {

struct PipelineConfig {
  OperatorSpec op;
  ReactionSpec reaction;
  int N_dim = 2;
  int n_max = 4;           // balls B_1 .. B_{n_max}
  int cells_per_unit = 512;
  double eps1 = -1.0;      // < 0 picks min(alpha/4, 0.1)
  SolveSettings solver;
  double verify_tol = 1e-6;   // barrier inequality slack
  double super_scale = 1.0;   // diagnostic knob; != 1 breaks the upper barrier
  std::string output_dir;     // empty = no files

  ExponentData exponents() const;
  double eps_shift(int n) const;  // eps1 * 2^{-(n-1)}
};

struct SuperSolution {
  RadialField u_tilde;  // convective fixed point on B_{n_max}, Dirichlet zero
  RadialField u_bar;    // u_tilde + 1
  double trap_radius = 0;
  int picard_iterations = 0;
  std::vector<double> grad_norms;
};

// Builds u_bar on the largest ball and verifies the barrier inequality
// node-wise for every shift. Throws ConstructionError with the worst node.
SuperSolution build_supersolution(const PipelineConfig& cfg, TraceLog* trace = nullptr);

struct SubSolution {
  RadialField u;
  double delta = 0;
  int ladder_steps = 0;
};

// Truncation-ladder minimizer on B_n, verified as a sub-solution for every
// shift eps_m with m >= n (and eps = 0).
SubSolution build_subsolution(const PipelineConfig& cfg, int n, TraceLog* trace = nullptr);

struct RegularizedRun {
  int n = 0;
  double eps = 0;
  double delta = 0;
  RadialField u;
  int picard_iterations = 0;
  double self_residual = 0;
  double margin_lower = 0, margin_upper = 0;
  double max_value = 0;
  double wp = 0;  // W^{1,p} norm on B_n
};

// Hole-filling energy profile Psi(l) = int_{B_l cap {u > level}} |grad u|^p
// sampled at the given radii.
std::vector<double> energy_profile(const RadialField& u, double p, double level,
                                   const std::vector<double>& radii);

struct PsiDiagnostic {
  int j = 0;
  std::vector<double> radii;
  std::vector<double> psi;
  double bound_ratio = 0;  // Psi(j) / (A + B), reported not asserted
};

struct PipelineReport {
  int n_max = 0;
  double p = 0;
  std::vector<double> eps;      // shifts per ball
  std::vector<double> delta;    // accepted truncation levels per ball
  SuperSolution super_sol;
  std::vector<SubSolution> sub_sols;   // index n-1
  std::vector<RegularizedRun> runs;    // index n-1
  RadialField limit;                   // unshifted trapped solve on B_{n_max}
  double limit_self_residual = 0;
  int limit_iterations = 0;
  std::vector<double> omega;           // omega_j = min_{B_j} usub_{j+1}, j = 1..n_max-1
  std::vector<double> C_monitor;       // sup_{n>j} wp_norm(u_n, p, j)
  std::vector<std::vector<double>> d;  // d[n-1][j-1] = ||grad u_n - grad u||_{L^p(B_j)}
  std::vector<PsiDiagnostic> psi;
  double unshifted_residual = 0;       // inf-norm on B_{n_max - 1}
  bool positivity_ok = false;          // u_n >= omega_j on B_j for all n > j
  bool sandwich_ok = false;            // lower <= u_n <= upper for all n
  double sandwich_slack = 0;           // most negative margin observed

  nlohmann::json to_json() const;
};

// Full constructive run: barriers, regularized solves on the exhausting
// balls, limit solve, monitors. Writes report.json, fields/*.csv and
// trace.jsonl under cfg.output_dir when set.
PipelineReport run_pipeline(const PipelineConfig& cfg);

}  // namespace sspde
