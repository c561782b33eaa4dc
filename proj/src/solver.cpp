#include "sspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sspde/errors.hpp"
#include "sspde/kernels.hpp"

namespace sspde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solves the symmetric positive tridiagonal system in place (Thomas).
// sub/sup have size n-1, diag and rhs size n; rhs becomes the solution.
void thomas_solve(std::vector<double>& sub, std::vector<double>& diag,
                  std::vector<double>& sup, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i - 1] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

// Solves t a_0(t) = y for t >= 0 (strictly increasing). Safeguarded Newton.
double invert_flux_magnitude(const OperatorSpec& op, double y) {
  if (y <= 0.0) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (hi * op.a0(hi) < y) {
    hi *= 2.0;
    if (++guard > 4000) throw NoConvergenceError("flux inversion: bracket blew up", y, guard);
  }
  double lo = 0.0, t = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double g = t * op.a0(t) - y;
    if (g > 0) hi = t; else lo = t;
    const double slope = op.lambda1(std::max(t, 1e-300));
    double step = slope > 0 ? t - g / slope : -1.0;
    if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
    if (std::abs(step - t) <= 1e-16 * std::max(1.0, t)) return step;
    t = step;
  }
  return t;
}

// Exact solution of the discrete flux balance W_i q_i = -sum_{k<=i} v_k rhs_k;
// the interval gradients come from inverting the scalar flux and u from the
// backward sum with u(R) = 0.
RadialField flux_integration_solution(const OperatorSpec& op, const RadialGrid& g,
                                      const RadialField& rhs) {
  const int n = g.n_cells();
  const auto& W = g.interval_weight();
  const auto& v = g.node_volume();
  std::vector<double> du(n);
  double Q = 0.0;
  for (int i = 0; i < n; ++i) {
    Q += v[i] * rhs.values[i];
    du[i] = -invert_flux_magnitude(op, Q / W[i]);
  }
  RadialField u = zero_field(g);
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    acc -= g.h() * du[i];
    u.values[i] = acc;
  }
  return u;
}

double inf_norm_interior(const std::vector<double>& res, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(res[i]));
  return m;
}

struct NewtonWork {
  std::vector<double> du, q, lam, res, sub, diag, sup, step;
};

// Keeps early steps bounded when the floored tangent is tiny (degenerate
// operators started far from the solution); the direction stays a descent
// direction under scaling.
void cap_direction(std::vector<double>& d, const std::vector<double>& u) {
  double dmax = 0.0;
  for (double x : d) dmax = std::max(dmax, std::abs(x));
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, std::abs(x));
  const double cap = 10.0 * (1.0 + umax);
  if (dmax > cap)
    for (double& x : d) x *= cap / dmax;
}

// One Newton direction for the flux part plus an optional nonnegative
// diagonal reaction term; res must already hold the scaled gradient
// res_i = grad J_i / (angular v_i).
void newton_direction(const RadialGrid& g, NewtonWork& w,
                      const std::vector<double>& react_diag) {
  const int n = g.n_cells();
  const auto& W = g.interval_weight();
  const auto& v = g.node_volume();
  const double h = g.h();
  w.sub.assign(n - 1, 0.0);
  w.diag.assign(n, 0.0);
  w.sup.assign(n - 1, 0.0);
  w.step.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double d = W[i] * w.lam[i] / h;
    if (i > 0) d += W[i - 1] * w.lam[i - 1] / h;
    if (!react_diag.empty()) d += react_diag[i];
    w.diag[i] = d;
    if (i < n - 1) {
      w.sub[i] = -W[i] * w.lam[i] / h;
      w.sup[i] = -W[i] * w.lam[i] / h;
    }
    w.step[i] = -v[i] * w.res[i];
  }
  thomas_solve(w.sub, w.diag, w.sup, w.step);
}

}  // namespace

TraceLog::TraceLog(const std::string& path) {
  f_ = std::fopen(path.c_str(), "w");
  if (!f_) throw std::runtime_error("trace: cannot open '" + path + "'");
}

TraceLog::~TraceLog() {
  if (f_) std::fclose(f_);
}

void TraceLog::record(const std::string& stage, int ball, int k, double residual,
                      double energy, double grad_pnorm) {
  if (!f_) return;
  std::fprintf(f_,
               "{\"stage\":\"%s\",\"ball\":%d,\"k\":%d,\"residual\":%.17g,"
               "\"energy\":%.17g,\"grad_pnorm\":%.17g}\n",
               stage.c_str(), ball, k, residual, energy, grad_pnorm);
  std::fflush(f_);
}

void TrapPair::validate() const {
  if (!(lower.grid == upper.grid))
    throw std::invalid_argument("trap: barrier grids differ");
  if (lower.values.size() != upper.values.size())
    throw std::invalid_argument("trap: barrier sizes differ");
  int worst = -1;
  double violation = 0.0;
  for (std::size_t i = 0; i < lower.values.size(); ++i) {
    const double gap = lower.values[i] - upper.values[i];
    if (!std::isfinite(gap))
      throw ConstructionError("trap: non-finite barrier value", static_cast<int>(i), gap);
    if (gap > violation) {
      violation = gap;
      worst = static_cast<int>(i);
    }
  }
  if (worst >= 0)
    throw ConstructionError("trap: barriers out of order at node " + std::to_string(worst),
                            worst, violation);
}

FrozenResult solve_frozen(const OperatorSpec& op, const RadialGrid& g,
                          const RadialField& rhs, const SolveSettings& s,
                          TraceLog* trace, int ball_tag, const RadialField* initial) {
  if (!(rhs.grid == g)) throw std::invalid_argument("solve_frozen: rhs grid mismatch");
  const int n = g.n_cells();
  for (int i = 0; i < n; ++i)
    if (!(rhs.values[i] >= 0.0) || !std::isfinite(rhs.values[i]))
      throw std::invalid_argument("solve_frozen: rhs must be nonnegative and finite");

  RadialField u;
  if (initial) {
    if (!(initial->grid == g)) throw std::invalid_argument("solve_frozen: initial grid mismatch");
    u = *initial;
    u.values.back() = 0.0;
  } else {
    u = flux_integration_solution(op, g, rhs);
  }

  NewtonWork w;
  w.du.resize(n);
  w.q.resize(n);
  w.lam.resize(n);
  w.res.resize(n + 1);
  const auto& W = g.interval_weight();
  const auto& v = g.node_volume();

  FrozenResult out;
  double res_inf = kInf;
  for (int k = 0; k <= s.max_newton; ++k) {
    kernels::interval_gradients(u.values, g.h(), w.du);
    kernels::flux(op, w.du, w.q);
    kernels::divergence_residual(w.q, W, v, rhs.values,
                                 std::span<double>(w.res.data(), n));
    res_inf = inf_norm_interior(w.res, n);
    const double J = discrete_energy(op, u, rhs);
    if (trace) trace->record("newton", ball_tag, k, res_inf, J, grad_pnorm(u, op.growth_exponent(), g.R()));
    if (res_inf <= s.newton_tol) {
      out.iterations = k;
      break;
    }
    if (k == s.max_newton)
      throw NoConvergenceError("solve_frozen: newton stalled", res_inf, k);

    kernels::flux_tangent(op, w.du, s.jac_floor, w.lam);
    newton_direction(g, w, {});
    cap_direction(w.step, u.values);

    // direction at rounding scale means the energy is minimized to machine
    // precision even when the strong-form residual floor sits above the tol
    double step_inf = 0.0, u_inf = 0.0;
    for (int i = 0; i < n; ++i) {
      step_inf = std::max(step_inf, std::abs(w.step[i]));
      u_inf = std::max(u_inf, std::abs(u.values[i]));
    }
    if (step_inf <= 1e-13 * (1.0 + u_inf)) {
      out.iterations = k;
      break;
    }

    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += v[i] * w.res[i] * w.step[i];
    slope *= g.angular_measure();
    if (!(slope < 0))
      throw NoConvergenceError("solve_frozen: non-descent direction", res_inf, k);

    double step = 1.0;
    RadialField trial = u;
    bool accepted = false;
    for (int b = 0; b <= s.max_backtracks; ++b) {
      for (int i = 0; i < n; ++i) trial.values[i] = u.values[i] + step * w.step[i];
      const double Jt = discrete_energy(op, trial, rhs);
      if (Jt <= J + s.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw NoConvergenceError("solve_frozen: line search failed", res_inf, k);
    u.values.swap(trial.values);
  }

  out.u = std::move(u);
  out.residual_inf = res_inf;
  out.min_value = *std::min_element(out.u.values.begin(), out.u.values.end());
  out.positive = out.min_value >= -s.newton_tol;
  return out;
}

double sobolev_constant(double p, double N_dim) {
  if (!(p > 1) || !(p < N_dim))
    throw std::invalid_argument("sobolev_constant: requires 1 < p < N");
  const double pi = std::numbers::pi;
  const double a = std::pow(pi, -0.5) * std::pow(N_dim, -1.0 / p);
  const double b = std::pow((p - 1.0) / (N_dim - p), 1.0 - 1.0 / p);
  const double num = std::tgamma(1.0 + 0.5 * N_dim) * std::tgamma(N_dim);
  const double den = std::tgamma(N_dim / p) * std::tgamma(1.0 + N_dim - N_dim / p);
  return a * b * std::pow(num / den, 1.0 / N_dim);
}

double radial_limit_embedding_constant(double p, int N_dim, double q, double R) {
  if (!(p == static_cast<double>(N_dim)))
    throw std::invalid_argument("limit embedding: requires p = N");
  if (!(q >= 1) || !std::isfinite(q) || !(R > 0))
    throw std::invalid_argument("limit embedding: bad q or R");
  const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * N_dim) / std::tgamma(0.5 * N_dim);
  const double p_conj = p / (p - 1.0);
  return std::pow(omega, 1.0 / q - 1.0 / p) * std::pow(R, N_dim / q) *
         std::pow(std::tgamma(q / p_conj + 1.0), 1.0 / q) *
         std::pow(static_cast<double>(N_dim), -(1.0 / p_conj + 1.0 / q));
}

double trapping_radius(const OperatorSpec& op, const ExponentData& ed,
                       const ReactionSpec& rs, double R, double m_growth) {
  if (!(m_growth > 0)) throw std::invalid_argument("trapping radius: m must be positive");
  const int N = static_cast<int>(ed.N_dim);
  double c;
  if (ed.sobolev_limit) {
    const double q1 = ed.eta / (ed.eta - 1.0);
    const double inv_q2 = 1.0 - 1.0 / ed.theta - ed.r / ed.p;
    const double q2 = 1.0 / inv_q2;
    c = (radial_limit_embedding_constant(ed.p, N, q1, R) * rs.h.lq_norm(ed.eta, N) +
         radial_limit_embedding_constant(ed.p, N, q2, R) * rs.weight_k.lq_norm(ed.theta, N)) /
        m_growth;
  } else {
    const double cs = sobolev_constant(ed.p, ed.N_dim);
    c = cs * (rs.h.lq_norm(ed.p_star_conj, N) + rs.weight_k.lq_norm(ed.zeta, N)) / m_growth;
  }
  if (c == 0.0) return 0.0;
  // C^{p-1} = c (1 + C^r) has a unique positive root since r < p - 1.
  auto phi = [&](double C) {
    return std::pow(C, ed.p - 1.0) - c * (1.0 + std::pow(C, ed.r));
  };
  double hi = 1.0;
  while (phi(hi) < 0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) < 0) lo = mid; else hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

FixedPointResult fixed_point_convective(const OperatorSpec& op, const RadialGrid& g,
                                        const ReactionSpec& rs, const ExponentData& ed,
                                        const SolveSettings& s, TraceLog* trace,
                                        int ball_tag, double trap_radius_R) {
  const int n = g.n_cells();
  const double R_const = trap_radius_R > 0 ? trap_radius_R : g.R();
  const auto tg = log_grid();
  const double m = verify_growth(op, tg).m;

  FixedPointResult out;
  out.trap_radius = trapping_radius(op, ed, rs, R_const, m);

  RadialField u = zero_field(g);
  RadialField rhs = zero_field(g);
  for (int k = 1; k <= s.max_picard; ++k) {
    const auto Du = node_gradient(u);
    for (int i = 0; i < n; ++i)
      rhs.values[i] = rs.h(g.node(i)) + rs.eval_convection(g.node(i), std::abs(Du[i]));
    rhs.values[n] = 0.0;
    FrozenResult step = solve_frozen(op, g, rhs, s, nullptr, ball_tag);
    const double gn = grad_pnorm(step.u, ed.p, g.R());
    out.grad_norms.push_back(gn);
    const double dist = wp_distance(step.u, u, ed.p, g.R());
    if (trace)
      trace->record("picard-convective", ball_tag, k, dist,
                    discrete_energy(op, step.u, rhs), gn);
    u = std::move(step.u);
    out.iterations = k;
    out.last_step = dist;
    if (dist <= s.picard_tol) {
      out.u = std::move(u);
      const double slack = 1e-12 * std::max(1.0, out.trap_radius);
      out.within_trap = std::all_of(out.grad_norms.begin(), out.grad_norms.end(),
                                    [&](double gnrm) { return gnrm <= out.trap_radius + slack; });
      return out;
    }
  }
  throw NoConvergenceError("convective fixed point: no contraction", out.last_step,
                           out.iterations);
}

SubEnergyResult minimize_sub_energy(const OperatorSpec& op, const RadialGrid& g,
                                    const TruncatedSubReaction& fd,
                                    const SolveSettings& s, TraceLog* trace, int ball_tag) {
  const int n = g.n_cells();
  const auto& W = g.interval_weight();
  const auto& v = g.node_volume();

  // Frozen solve against f_delta(., 0) seeds the minimization; the true
  // minimizer sits below it because f_delta is nonincreasing in s.
  RadialField rhs0 = zero_field(g);
  for (int i = 0; i < n; ++i) rhs0.values[i] = fd(g.node(i), 0.0);
  RadialField u = flux_integration_solution(op, g, rhs0);

  auto energy = [&](const RadialField& w_) {
    std::vector<double> du(n), dens(n);
    kernels::interval_gradients(w_.values, g.h(), du);
    kernels::energy_density(op, du, dens);
    double grad_part = 0.0;
    for (int j = 0; j < n; ++j) grad_part += W[j] * dens[j];
    double reac_part = 0.0;
    for (int i = 0; i < n; ++i) reac_part += v[i] * fd.primitive(g.node(i), w_.values[i]);
    return g.angular_measure() * (g.h() * grad_part - reac_part);
  };

  NewtonWork w;
  w.du.resize(n);
  w.q.resize(n);
  w.lam.resize(n);
  w.res.resize(n + 1);
  std::vector<double> react_diag(n);

  SubEnergyResult out;
  double res_inf = kInf;
  for (int k = 0; k <= s.max_newton; ++k) {
    kernels::interval_gradients(u.values, g.h(), w.du);
    kernels::flux(op, w.du, w.q);
    for (int i = 0; i < n; ++i) {
      const double qm = i > 0 ? W[i - 1] * w.q[i - 1] : 0.0;
      w.res[i] = (qm - W[i] * w.q[i]) / v[i] - fd(g.node(i), u.values[i]);
    }
    res_inf = inf_norm_interior(w.res, n);
    const double J = energy(u);
    if (trace)
      trace->record("sub-newton", ball_tag, k, res_inf, J,
                    grad_pnorm(u, op.growth_exponent(), g.R()));
    if (res_inf <= s.newton_tol) {
      out.iterations = k;
      break;
    }
    if (k == s.max_newton)
      throw NoConvergenceError("sub-energy: newton stalled", res_inf, k);

    kernels::flux_tangent(op, w.du, s.jac_floor, w.lam);
    for (int i = 0; i < n; ++i)
      react_diag[i] = v[i] * std::max(0.0, -fd.ds(g.node(i), u.values[i]));
    newton_direction(g, w, react_diag);
    cap_direction(w.step, u.values);

    double slope = 0.0;
    for (int i = 0; i < n; ++i) slope += v[i] * w.res[i] * w.step[i];
    slope *= g.angular_measure();
    if (!(slope < 0))
      throw NoConvergenceError("sub-energy: non-descent direction", res_inf, k);

    const double J0 = J;
    double step = 1.0;
    RadialField trial = u;
    bool accepted = false;
    for (int b = 0; b <= s.max_backtracks; ++b) {
      for (int i = 0; i < n; ++i) trial.values[i] = u.values[i] + step * w.step[i];
      if (energy(trial) <= J0 + s.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw NoConvergenceError("sub-energy: line search failed", res_inf, k);
    u.values.swap(trial.values);
  }

  out.residual_inf = res_inf;
  out.energy = energy(u);
  const double max_u = *std::max_element(u.values.begin(), u.values.end());
  double rhs_mass = 0.0;
  for (int i = 0; i < n; ++i) rhs_mass = std::max(rhs_mass, rhs0.values[i]);
  out.degenerate = max_u <= 1e-8 && rhs_mass > 0.0;
  out.u = std::move(u);
  return out;
}

DeltaSelection select_delta(const OperatorSpec& op, const RadialGrid& g,
                            const SubReaction& f, double eps1,
                            const SolveSettings& s, TraceLog* trace, int ball_tag) {
  double worst_max = 0.0;
  int worst_node = 0;
  for (int k = 1; k <= 30; ++k) {
    const double delta = std::ldexp(1.0, -k);
    const TruncatedSubReaction fd = truncate_sub_reaction(f, eps1, delta);
    SubEnergyResult r = minimize_sub_energy(op, g, fd, s, trace, ball_tag);
    const int n = g.n_cells();
    double max_u = 0.0;
    double min_interior = kInf;
    int argmax = 0;
    for (int i = 0; i <= n; ++i) {
      if (r.u.values[i] > max_u) {
        max_u = r.u.values[i];
        argmax = i;
      }
      if (i > 0 && i < n) min_interior = std::min(min_interior, r.u.values[i]);
    }
    if (trace) trace->record("delta-ladder", ball_tag, k, r.residual_inf, r.energy, max_u);
    if (!r.degenerate && max_u <= 1.0 && min_interior > 0.0) {
      DeltaSelection sel;
      sel.delta = std::min(delta, f.beta);
      sel.u = std::move(r.u);
      sel.ladder_steps = k;
      return sel;
    }
    worst_max = max_u;
    worst_node = argmax;
  }
  throw ConstructionError("delta ladder: no admissible truncation level", worst_node,
                          worst_max - 1.0);
}

TrappedResult solve_trapped(const OperatorSpec& op, const RadialGrid& g,
                            const ReactionSpec& rs, double eps_n, const TrapPair& trap,
                            const SolveSettings& s, TraceLog* trace, int ball_tag,
                            double self_residual_tol, const RadialField* initial) {
  if (!(eps_n >= 0) || !std::isfinite(eps_n))
    throw std::invalid_argument("solve_trapped: shift must be finite and >= 0");
  trap.validate();
  if (!(trap.lower.grid == g)) throw std::invalid_argument("solve_trapped: barrier grid mismatch");

  const int n = g.n_cells();
  const double p = op.growth_exponent();
  const double upper_inf =
      *std::max_element(trap.upper.values.begin(), trap.upper.values.end());
  const double slack = 1e-12 * std::max(1.0, std::abs(upper_inf));

  auto margins = [&](const RadialField& u) {
    double ml = kInf, mu = kInf;
    for (int i = 0; i <= n; ++i) {
      ml = std::min(ml, u.values[i] - trap.lower.values[i]);
      mu = std::min(mu, trap.upper.values[i] - u.values[i]);
    }
    return std::pair<double, double>(ml, mu);
  };

  auto self_residual = [&](const RadialField& u) {
    const auto Du = node_gradient(u);
    RadialField rhs_self = zero_field(g);
    for (int i = 0; i < n; ++i)
      rhs_self.values[i] = rs.eval_reaction(g.node(i), u.values[i] + eps_n) +
                           rs.eval_convection(g.node(i), std::abs(Du[i]));
    const RadialField res = residual(op, u, rhs_self);
    return inf_norm_interior(res.values, n);
  };

  RadialField u = initial ? *initial : trap.upper;
  if (initial && !(initial->grid == g))
    throw std::invalid_argument("solve_trapped: initial grid mismatch");

  RadialField rhs = zero_field(g);
  double theta = 1.0;
  double prev_dist = kInf;
  double dist = kInf;
  TrappedResult out;
  for (int k = 1; k <= s.max_picard; ++k) {
    const auto Du = node_gradient(u);
    for (int i = 0; i < n; ++i) {
      const double arg =
          std::clamp(u.values[i], trap.lower.values[i], trap.upper.values[i]) + eps_n;
      rhs.values[i] = rs.eval_reaction(g.node(i), arg) +
                      rs.eval_convection(g.node(i), std::abs(Du[i]));
    }
    rhs.values[n] = 0.0;
    FrozenResult step = solve_frozen(op, g, rhs, s, nullptr, ball_tag);
    RadialField next = std::move(step.u);
    if (theta != 1.0)
      for (int i = 0; i <= n; ++i)
        next.values[i] = theta * next.values[i] + (1.0 - theta) * u.values[i];
    dist = wp_distance(next, u, p, g.R());
    if (trace)
      trace->record("picard-trapped", ball_tag, k, dist, discrete_energy(op, next, rhs),
                    grad_pnorm(next, p, g.R()));
    // A stagnating unmixed iteration is the oscillation signature of the
    // order-reversing singular map; averaging restores convergence.
    if (theta == 1.0 && k >= 3 && dist > 0.9 * prev_dist) theta = 0.5;
    prev_dist = dist;
    u = std::move(next);
    out.iterations = k;
    out.last_step = dist;
    if (dist <= s.picard_tol) {
      const auto [ml, mu] = margins(u);
      if (ml >= -slack && mu >= -slack) {
        const double sr = self_residual(u);
        if (self_residual_tol < 0 || sr <= self_residual_tol) {
          out.u = std::move(u);
          out.self_residual = sr;
          out.margin_lower = ml;
          out.margin_upper = mu;
          return out;
        }
      }
    }
  }

  const auto [ml, mu] = margins(u);
  if (dist <= s.picard_tol && (ml < -slack || mu < -slack)) {
    int worst = 0;
    double viol = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double below = trap.lower.values[i] - u.values[i];
      const double above = u.values[i] - trap.upper.values[i];
      if (below > viol) { viol = below; worst = i; }
      if (above > viol) { viol = above; worst = i; }
    }
    throw TrapEscapeError("trapped iteration converged outside the barriers", worst, viol);
  }
  throw NoConvergenceError("trapped iteration: no contraction", dist, out.iterations);
}

}  // namespace sspde
