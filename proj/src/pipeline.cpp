#include "sspde/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "sspde/errors.hpp"
#include "sspde/kernels.hpp"

namespace sspde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLimitSelfTol = 1e-8;

RadialGrid ball_grid(const PipelineConfig& cfg, int n) {
  return RadialGrid(static_cast<double>(n), n * cfg.cells_per_unit, cfg.N_dim);
}

// Discrete -div a(grad u) at the interior nodes.
std::vector<double> discrete_divergence(const OperatorSpec& op, const RadialField& u) {
  const RadialGrid& g = u.grid;
  const int n = g.n_cells();
  std::vector<double> du(n), q(n), div(n + 1, 0.0);
  std::vector<double> zero(n + 1, 0.0);
  kernels::interval_gradients(u.values, g.h(), du);
  kernels::flux(op, du, q);
  kernels::divergence_residual(q, g.interval_weight(), g.node_volume(), zero,
                               std::span<double>(div.data(), n));
  div.resize(n);
  return div;
}

double grad_pdist(const RadialField& a, const RadialField& b, double p, double rho) {
  const RadialGrid& ga = a.grid;
  const RadialGrid& gb = b.grid;
  if (std::abs(ga.h() - gb.h()) > 1e-14 * ga.h() || ga.N_dim() != gb.N_dim())
    throw std::invalid_argument("grad distance: incompatible grids");
  const int n = std::min(ga.n_cells(), gb.n_cells());
  std::vector<double> dua(ga.n_cells()), dub(gb.n_cells());
  kernels::interval_gradients(a.values, ga.h(), dua);
  kernels::interval_gradients(b.values, gb.h(), dub);
  double acc = 0.0;
  for (int j = 0; j < n && ga.mid(j) < rho; ++j)
    acc += ga.interval_weight()[j] * std::pow(std::abs(dua[j] - dub[j]), p);
  return std::pow(ga.angular_measure() * ga.h() * acc, 1.0 / p);
}

RadialField extend_by_zero(const RadialField& u, const RadialGrid& big) {
  RadialField out = zero_field(big);
  const std::size_t keep = std::min(u.values.size(), out.values.size());
  std::copy(u.values.begin(), u.values.begin() + keep, out.values.begin());
  out.values.back() = 0.0;
  return out;
}

}  // namespace

ExponentData PipelineConfig::exponents() const {
  return validate_exponents(op.growth_exponent(), N_dim, reaction.gamma, reaction.r_exp,
                            reaction.eta, reaction.theta);
}

double PipelineConfig::eps_shift(int n) const {
  const double e1 = eps1 > 0 ? eps1 : std::min(reaction.alpha / 4.0, 0.1);
  return e1 * std::ldexp(1.0, -(n - 1));
}

SuperSolution build_supersolution(const PipelineConfig& cfg, TraceLog* trace) {
  const RadialGrid g = ball_grid(cfg, cfg.n_max);
  const ExponentData ed = cfg.exponents();
  FixedPointResult fp = fixed_point_convective(cfg.op, g, cfg.reaction, ed, cfg.solver,
                                               trace, cfg.n_max, g.R());

  SuperSolution sup;
  sup.trap_radius = fp.trap_radius;
  sup.picard_iterations = fp.iterations;
  sup.grad_norms = std::move(fp.grad_norms);
  sup.u_tilde = std::move(fp.u);
  sup.u_bar = sup.u_tilde;
  for (double& v : sup.u_bar.values) v += cfg.super_scale;

  // Node-wise barrier inequality -div a(grad u_bar) >= f(., u_bar + eps) + g(., |grad u_bar|)
  // for every shift of the ladder and for the limit shift zero. The flux of
  // u_bar equals the flux of u_tilde, so the divergence is reused as is.
  const int n = g.n_cells();
  const auto div = discrete_divergence(cfg.op, sup.u_bar);
  const auto Du = node_gradient(sup.u_bar);
  for (int m = 0; m <= cfg.n_max; ++m) {
    const double eps = m == 0 ? 0.0 : cfg.eps_shift(m);
    int worst = -1;
    double violation = 0.0;
    for (int i = 0; i < n; ++i) {
      const double need = cfg.reaction.eval_reaction(g.node(i), sup.u_bar.values[i] + eps) +
                          cfg.reaction.eval_convection(g.node(i), std::abs(Du[i]));
      const double gap = need - div[i];
      if (gap > violation) {
        violation = gap;
        worst = i;
      }
    }
    if (worst >= 0 && violation > cfg.verify_tol)
      throw ConstructionError("supersolution: barrier inequality fails for shift " +
                                  std::to_string(eps) + " at node " + std::to_string(worst),
                              worst, violation);
  }
  return sup;
}

SubSolution build_subsolution(const PipelineConfig& cfg, int n, TraceLog* trace) {
  if (n < 1 || n > cfg.n_max) throw std::invalid_argument("subsolution: ball index out of range");
  cfg.reaction.validate_positivity();
  const RadialGrid g = ball_grid(cfg, n);
  const SubReaction fsub =
      build_sub_reaction(cfg.reaction.beta, cfg.reaction.sigma, cfg.reaction.alpha);
  const double e1 = cfg.eps_shift(1);
  DeltaSelection sel = select_delta(cfg.op, g, fsub, e1, cfg.solver, trace, n);

  // Sub-solution inequality -div a(grad u) <= f(., u + eps) for every shift
  // down to zero; the convection term is nonnegative and may be dropped.
  const int nc = g.n_cells();
  const auto div = discrete_divergence(cfg.op, sel.u);
  for (int m = 0; m <= cfg.n_max; ++m) {
    if (m > 0 && m < n) continue;  // ball n only ever runs with shifts eps_m, m >= n
    const double eps = m == 0 ? 0.0 : cfg.eps_shift(m);
    int worst = -1;
    double violation = 0.0;
    for (int i = 0; i < nc; ++i) {
      const double allowed = cfg.reaction.eval_reaction(g.node(i), sel.u.values[i] + eps);
      const double gap = div[i] - allowed;
      if (gap > violation) {
        violation = gap;
        worst = i;
      }
    }
    if (worst >= 0 && violation > cfg.verify_tol)
      throw ConstructionError("subsolution: inequality fails for shift " + std::to_string(eps) +
                                  " at node " + std::to_string(worst),
                              worst, violation);
  }

  SubSolution out;
  out.u = std::move(sel.u);
  out.delta = sel.delta;
  out.ladder_steps = sel.ladder_steps;
  return out;
}

std::vector<double> energy_profile(const RadialField& u, double p, double level,
                                   const std::vector<double>& radii) {
  const RadialGrid& g = u.grid;
  const int n = g.n_cells();
  std::vector<double> du(n);
  kernels::interval_gradients(u.values, g.h(), du);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double l : radii) {
    double acc = 0.0;
    for (int j = 0; j < n && g.mid(j) < l; ++j)
      if (std::min(u.values[j], u.values[j + 1]) > level)
        acc += g.interval_weight()[j] * std::pow(std::abs(du[j]), p);
    out.push_back(g.angular_measure() * g.h() * acc);
  }
  return out;
}

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  cfg.op.validate();
  cfg.reaction.validate_positivity();
  const ExponentData ed = cfg.exponents();
  const double p = ed.p;
  if (cfg.n_max < 1) throw std::invalid_argument("pipeline: n_max must be >= 1");

  namespace fs = std::filesystem;
  std::optional<TraceLog> trace_store;
  TraceLog* trace = nullptr;
  if (!cfg.output_dir.empty()) {
    fs::create_directories(fs::path(cfg.output_dir) / "fields");
    trace_store.emplace((fs::path(cfg.output_dir) / "trace.jsonl").string());
    trace = &*trace_store;
  }

  PipelineReport rep;
  rep.n_max = cfg.n_max;
  rep.p = p;

  rep.super_sol = build_supersolution(cfg, trace);

  for (int n = 1; n <= cfg.n_max; ++n) rep.sub_sols.push_back(build_subsolution(cfg, n, trace));

  rep.sandwich_slack = kInf;
  for (int n = 1; n <= cfg.n_max; ++n) {
    const RadialGrid g = ball_grid(cfg, n);
    TrapPair trap;
    trap.lower = rep.sub_sols[n - 1].u;
    trap.upper = restrict_field(rep.super_sol.u_bar, g);
    trap.validate();

    const double eps = cfg.eps_shift(n);
    std::optional<RadialField> warm;
    if (n > 1) warm = extend_by_zero(rep.runs.back().u, g);
    TrappedResult tr = solve_trapped(cfg.op, g, cfg.reaction, eps, trap, cfg.solver, trace, n,
                                     -1.0, warm ? &*warm : nullptr);

    RegularizedRun run;
    run.n = n;
    run.eps = eps;
    run.delta = rep.sub_sols[n - 1].delta;
    run.picard_iterations = tr.iterations;
    run.self_residual = tr.self_residual;
    run.margin_lower = tr.margin_lower;
    run.margin_upper = tr.margin_upper;
    run.u = std::move(tr.u);
    run.max_value = *std::max_element(run.u.values.begin(), run.u.values.end());
    run.wp = wp_norm(run.u, p, g.R());
    rep.eps.push_back(eps);
    rep.delta.push_back(run.delta);
    rep.sandwich_slack = std::min({rep.sandwich_slack, run.margin_lower, run.margin_upper});
    rep.runs.push_back(std::move(run));
  }

  // Limit problem: shift zero on the largest ball, warm started from the last
  // regularized iterate, held to a self-consistency residual.
  {
    const RadialGrid g = ball_grid(cfg, cfg.n_max);
    TrapPair trap;
    trap.lower = rep.sub_sols[cfg.n_max - 1].u;
    trap.upper = rep.super_sol.u_bar;
    TrappedResult tr = solve_trapped(cfg.op, g, cfg.reaction, 0.0, trap, cfg.solver, trace,
                                     cfg.n_max, kLimitSelfTol, &rep.runs.back().u);
    rep.limit = std::move(tr.u);
    rep.limit_self_residual = tr.self_residual;
    rep.limit_iterations = tr.iterations;
    rep.sandwich_slack = std::min({rep.sandwich_slack, tr.margin_lower, tr.margin_upper});
  }
  rep.sandwich_ok = rep.sandwich_slack >= -1e-10;

  // Positivity floor omega_j and the uniform norm monitor C_j.
  for (int j = 1; j < cfg.n_max; ++j) {
    const RadialField& usub = rep.sub_sols[j].u;  // lives on B_{j+1}
    double omega_j = kInf;
    for (int i = 0; i < usub.n_nodes() && usub.grid.node(i) <= j + 1e-12; ++i)
      omega_j = std::min(omega_j, usub.values[i]);
    rep.omega.push_back(omega_j);

    double cj = 0.0;
    for (int n = j + 1; n <= cfg.n_max; ++n)
      cj = std::max(cj, wp_norm(rep.runs[n - 1].u, p, static_cast<double>(j)));
    rep.C_monitor.push_back(cj);
  }

  rep.positivity_ok = true;
  for (int j = 1; j < cfg.n_max; ++j) {
    const double floor_j = rep.omega[j - 1];
    const double slack = 1e-12 * std::max(1.0, std::abs(floor_j));
    for (int n = j + 1; n <= cfg.n_max; ++n) {
      const RadialField& un = rep.runs[n - 1].u;
      for (int i = 0; i < un.n_nodes() && un.grid.node(i) <= j + 1e-12; ++i)
        if (un.values[i] < floor_j - slack) rep.positivity_ok = false;
    }
    for (int i = 0; i < rep.limit.n_nodes() && rep.limit.grid.node(i) <= j + 1e-12; ++i)
      if (rep.limit.values[i] < floor_j - slack) rep.positivity_ok = false;
  }

  // Gradient distances to the limit candidate.
  for (int n = 1; n <= cfg.n_max; ++n) {
    std::vector<double> row;
    for (int j = 1; j <= n; ++j)
      row.push_back(grad_pdist(rep.runs[n - 1].u, rep.limit, p, static_cast<double>(j)));
    rep.d.push_back(std::move(row));
  }

  // Hole-filling profile of the limit with the caccioppoli-style bound.
  for (int j = 1; j < cfg.n_max; ++j) {
    PsiDiagnostic diag;
    diag.j = j;
    for (int k = 1; k <= 4; ++k) diag.radii.push_back(0.25 * k * j);
    diag.psi = energy_profile(rep.limit, p, rep.omega[j - 1], diag.radii);

    const int N = cfg.N_dim;
    const double ball_vol =
        rep.limit.grid.angular_measure() / N * std::pow(j + 1.0, N);
    const double grad_super = grad_pnorm(rep.super_sol.u_bar, p, j + 1.0);
    const double A = std::pow(lq_norm(rep.super_sol.u_bar, p, j + 1.0), p);
    double B = cfg.reaction.weight_k.lq_norm(cfg.reaction.theta, N) * grad_super + ball_vol;
    if (cfg.reaction.gamma >= 1.0) {
      B += std::pow(rep.omega[j - 1], 1.0 - cfg.reaction.gamma) *
           cfg.reaction.h.lq_norm(1.0, N);
    } else {
      B += cfg.reaction.h.lq_norm(cfg.reaction.eta, N) * grad_super +
           cfg.reaction.h.lq_norm(1.0, N);
    }
    diag.bound_ratio = diag.psi.back() / (A + B);
    rep.psi.push_back(std::move(diag));
  }

  // Unshifted self-residual of the limit on the next-to-last ball.
  {
    const RadialGrid& g = rep.limit.grid;
    const int n = g.n_cells();
    const auto Du = node_gradient(rep.limit);
    RadialField rhs = zero_field(g);
    for (int i = 0; i < n; ++i)
      rhs.values[i] = cfg.reaction.eval_reaction(g.node(i), rep.limit.values[i]) +
                      cfg.reaction.eval_convection(g.node(i), std::abs(Du[i]));
    const RadialField res = residual(cfg.op, rep.limit, rhs);
    double worst = 0.0;
    for (int i = 0; i < n && g.node(i) <= cfg.n_max - 1 + 1e-12; ++i)
      worst = std::max(worst, std::abs(res.values[i]));
    rep.unshifted_residual = worst;
  }

  if (!cfg.output_dir.empty()) {
    const fs::path base(cfg.output_dir);
    write_csv(rep.super_sol.u_tilde, (base / "fields" / "u_tilde.csv").string());
    write_csv(rep.super_sol.u_bar, (base / "fields" / "u_bar.csv").string());
    for (int n = 1; n <= cfg.n_max; ++n) {
      write_csv(rep.sub_sols[n - 1].u,
                (base / "fields" / ("sub_" + std::to_string(n) + ".csv")).string());
      write_csv(rep.runs[n - 1].u,
                (base / "fields" / ("u_" + std::to_string(n) + ".csv")).string());
    }
    write_csv(rep.limit, (base / "fields" / "limit.csv").string());
    std::ofstream f(base / "report.json");
    f << rep.to_json().dump(2) << "\n";
  }
  return rep;
}

nlohmann::json PipelineReport::to_json() const {
  nlohmann::json j;
  j["n_max"] = n_max;
  j["p"] = p;
  j["eps"] = eps;
  j["delta"] = delta;
  j["supersolution"] = {{"trap_radius", super_sol.trap_radius},
                        {"picard_iterations", super_sol.picard_iterations},
                        {"grad_norms", super_sol.grad_norms},
                        {"center", super_sol.u_bar.values.empty() ? 0.0 : super_sol.u_bar.values.front()},
                        {"sup", super_sol.u_bar.values.empty()
                                    ? 0.0
                                    : *std::max_element(super_sol.u_bar.values.begin(),
                                                        super_sol.u_bar.values.end())}};
  j["subsolutions"] = nlohmann::json::array();
  for (const SubSolution& s : sub_sols)
    j["subsolutions"].push_back(
        {{"delta", s.delta},
         {"ladder_steps", s.ladder_steps},
         {"center", s.u.values.empty() ? 0.0 : s.u.values.front()},
         {"max", s.u.values.empty()
                     ? 0.0
                     : *std::max_element(s.u.values.begin(), s.u.values.end())}});
  j["runs"] = nlohmann::json::array();
  for (const RegularizedRun& r : runs)
    j["runs"].push_back({{"n", r.n},
                         {"eps", r.eps},
                         {"delta", r.delta},
                         {"picard_iterations", r.picard_iterations},
                         {"self_residual", r.self_residual},
                         {"margin_lower", r.margin_lower},
                         {"margin_upper", r.margin_upper},
                         {"max_value", r.max_value},
                         {"wp", r.wp},
                         {"center", r.u.values.empty() ? 0.0 : r.u.values.front()}});
  j["limit"] = {{"iterations", limit_iterations},
                {"self_residual", limit_self_residual},
                {"center", limit.values.empty() ? 0.0 : limit.values.front()},
                {"max", limit.values.empty()
                            ? 0.0
                            : *std::max_element(limit.values.begin(), limit.values.end())}};
  j["omega"] = omega;
  j["C_monitor"] = C_monitor;
  j["d"] = d;
  j["psi"] = nlohmann::json::array();
  for (const PsiDiagnostic& pd : psi)
    j["psi"].push_back({{"j", pd.j},
                        {"radii", pd.radii},
                        {"psi", pd.psi},
                        {"bound_ratio", pd.bound_ratio}});
  j["unshifted_residual"] = unshifted_residual;
  j["positivity_ok"] = positivity_ok;
  j["sandwich_ok"] = sandwich_ok;
  j["sandwich_slack"] = sandwich_slack;
  return j;
}

}  // namespace sspde
