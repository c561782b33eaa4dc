#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "sspde/grid.hpp"
#include "sspde/reaction.hpp"

namespace sspde {

struct SolveSettings {
  double newton_tol = 1e-10;  // residual inf-norm
  int max_newton = 200;
  double picard_tol = 1e-8;   // successive W^{1,p} distance
  int max_picard = 500;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
  double jac_floor = 1e-12;   // tangent regularization for degenerate operators
};

// One JSON line per solver iteration.
class TraceLog {
public:
  TraceLog() = default;
  explicit TraceLog(const std::string& path);
  ~TraceLog();
  TraceLog(const TraceLog&) = delete;
  TraceLog& operator=(const TraceLog&) = delete;

  void record(const std::string& stage, int ball, int k, double residual,
              double energy, double grad_pnorm);
  bool open() const { return f_ != nullptr; }

private:
  std::FILE* f_ = nullptr;
};

struct TrapPair {
  RadialField lower, upper;
  // lower <= upper node-wise, lower boundary value 0 <= upper boundary value.
  // Throws ConstructionError naming the worst node.
  void validate() const;
};

struct FrozenResult {
  RadialField u;
  int iterations = 0;
  double residual_inf = 0;
  double min_value = 0;
  bool positive = true;  // min_value >= -newton_tol
};

// Damped Newton (Armijo on the discrete energy) for -div a(grad u) = rhs,
// Dirichlet zero. rhs must be nonnegative and finite node-wise.
FrozenResult solve_frozen(const OperatorSpec& op, const RadialGrid& g,
                          const RadialField& rhs, const SolveSettings& s,
                          TraceLog* trace = nullptr, int ball_tag = 0,
                          const RadialField* initial = nullptr);

// Sharp Sobolev embedding constant for D^{1,p}(R^N) -> L^{p*}, 1 < p < N.
double sobolev_constant(double p, double N_dim);

// Radial W^{1,p}_0(B_R) -> L^q(B_R) constant in the borderline case p = N.
double radial_limit_embedding_constant(double p, int N_dim, double q, double R);

// Barrier radius C solving C^{p-1} = c (1 + C^r) with c assembled from the
// energy estimate of the frozen convective problem on the ball of radius R.
double trapping_radius(const OperatorSpec& op, const ExponentData& ed,
                       const ReactionSpec& rs, double R, double m_growth);

struct FixedPointResult {
  RadialField u;
  int iterations = 0;
  std::vector<double> grad_norms;  // per-iterate gradient p-norm
  double trap_radius = 0;
  bool within_trap = true;
  double last_step = 0;
};

// Picard iteration v -> solve_frozen(h + k |grad v|^r) for the convective
// problem without the singular term. Throws NoConvergenceError at max_picard.
FixedPointResult fixed_point_convective(const OperatorSpec& op, const RadialGrid& g,
                                        const ReactionSpec& rs, const ExponentData& ed,
                                        const SolveSettings& s, TraceLog* trace = nullptr,
                                        int ball_tag = 0,
                                        double trap_radius_R = -1.0);

struct SubEnergyResult {
  RadialField u;
  int iterations = 0;
  double energy = 0;
  double residual_inf = 0;
  bool degenerate = false;  // converged to ~0 although f_delta(.,0) != 0
};

// Global minimizer of J(u) = int A(|grad u|) - F_delta(x,u) over the Dirichlet
// space (strictly convex since f_delta is nonincreasing in s).
SubEnergyResult minimize_sub_energy(const OperatorSpec& op, const RadialGrid& g,
                                    const TruncatedSubReaction& fd,
                                    const SolveSettings& s, TraceLog* trace = nullptr,
                                    int ball_tag = 0);

struct DeltaSelection {
  double delta = 0;
  RadialField u;
  int ladder_steps = 0;
};

// Halving ladder delta = 2^-1, 2^-2, ... accepting the first level whose
// minimizer stays in (0, 1]. Throws ConstructionError below 2^-30.
DeltaSelection select_delta(const OperatorSpec& op, const RadialGrid& g,
                            const SubReaction& f, double eps1,
                            const SolveSettings& s, TraceLog* trace = nullptr,
                            int ball_tag = 0);

struct TrappedResult {
  RadialField u;
  int iterations = 0;
  double self_residual = 0;   // res(u) vs f(x,u+eps)+g(x,grad u) at the last iterate
  double margin_lower = 0;    // min(u - lower)
  double margin_upper = 0;    // min(upper - u)
  double last_step = 0;
};

// Picard iteration with barrier-clamped reaction arguments for the shifted
// singular problem. eps_n = 0 is allowed: the clamp keeps arguments >= lower
// which is positive in the interior. Stops when the successive W^{1,p}
// distance <= picard_tol, the unclamped iterate lies inside the barriers and
// (when finite) the self-consistency residual <= self_residual_tol.
TrappedResult solve_trapped(const OperatorSpec& op, const RadialGrid& g,
                            const ReactionSpec& rs, double eps_n, const TrapPair& trap,
                            const SolveSettings& s, TraceLog* trace = nullptr,
                            int ball_tag = 0,
                            double self_residual_tol = -1.0,
                            const RadialField* initial = nullptr);

}  // namespace sspde
