#include "sspde/grid.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "sspde/kernels.hpp"

namespace sspde {

RadialGrid::RadialGrid(double R, int n_cells, int N_dim)
    : R_(R), n_(n_cells), dim_(N_dim) {
  if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("grid: R must be positive");
  if (n_cells < 2) throw std::invalid_argument("grid: need at least 2 cells");
  if (N_dim < 2) throw std::invalid_argument("grid: dimension must be >= 2");
  h_ = R / n_cells;
  angular_ = 2.0 * std::pow(std::numbers::pi, 0.5 * N_dim) / std::tgamma(0.5 * N_dim);
  W_.resize(n_);
  for (int j = 0; j < n_; ++j) W_[j] = std::pow(mid(j), N_dim - 1);
  v_.resize(n_ + 1);
  auto shell = [&](double a, double b) {
    return (std::pow(b, N_dim) - std::pow(a, N_dim)) / N_dim;
  };
  v_[0] = shell(0.0, 0.5 * h_);
  for (int i = 1; i < n_; ++i) v_[i] = shell((i - 0.5) * h_, (i + 0.5) * h_);
  v_[n_] = shell(R_ - 0.5 * h_, R_);
}

RadialField zero_field(const RadialGrid& g) {
  return {g, std::vector<double>(g.n_cells() + 1, 0.0)};
}

RadialField constant_field(const RadialGrid& g, double value) {
  return {g, std::vector<double>(g.n_cells() + 1, value)};
}

RadialField restrict_field(const RadialField& u, const RadialGrid& sub) {
  const auto& g = u.grid;
  if (sub.N_dim() != g.N_dim() || sub.n_cells() > g.n_cells() ||
      std::abs(sub.h() - g.h()) > 1e-14 * g.h())
    throw std::invalid_argument("restrict_field: grids do not nest");
  RadialField out{sub, {}};
  out.values.assign(u.values.begin(), u.values.begin() + sub.n_cells() + 1);
  return out;
}

std::vector<double> interval_gradient(const RadialField& u) {
  std::vector<double> du(u.grid.n_cells());
  kernels::interval_gradients(u.values, u.grid.h(), du);
  return du;
}

std::vector<double> node_gradient(const RadialField& u) {
  const int n = u.grid.n_cells();
  const double h = u.grid.h();
  std::vector<double> d(n + 1);
  d[0] = 0.0;  // even reflection through the origin
  for (int i = 1; i < n; ++i) d[i] = (u.values[i + 1] - u.values[i - 1]) / (2.0 * h);
  d[n] = (u.values[n] - u.values[n - 1]) / h;
  return d;
}

namespace {

void check_same_grid(const RadialField& a, const RadialField& b, const char* who) {
  if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

}  // namespace

RadialField residual(const OperatorSpec& op, const RadialField& u, const RadialField& rhs) {
  check_same_grid(u, rhs, "residual");
  const auto& g = u.grid;
  const int n = g.n_cells();
  std::vector<double> du(n), q(n);
  kernels::interval_gradients(u.values, g.h(), du);
  kernels::flux(op, du, q);
  RadialField res = zero_field(g);
  std::span<double> interior(res.values.data(), n);
  kernels::divergence_residual(q, g.interval_weight(), g.node_volume(),
                               std::span<const double>(rhs.values.data(), n), interior);
  return res;
}

double discrete_energy(const OperatorSpec& op, const RadialField& u, const RadialField& rhs) {
  check_same_grid(u, rhs, "discrete_energy");
  const auto& g = u.grid;
  const int n = g.n_cells();
  std::vector<double> du(n), dens(n);
  kernels::interval_gradients(u.values, g.h(), du);
  kernels::energy_density(op, du, dens);
  double kin = 0;
  const auto& W = g.interval_weight();
  for (int j = 0; j < n; ++j) kin += W[j] * dens[j];
  kin *= g.h();
  const double pot = kernels::weighted_dot(g.node_volume(), rhs.values, u.values);
  return g.angular_measure() * (kin - pot);
}

namespace {

// Shared accumulation for the W^{1,p}-style seminorms over B_rho.
double wp_pow_p(const RadialField& u, double p, double rho, bool value_part,
                bool grad_part) {
  const auto& g = u.grid;
  if (!(rho > 0) || rho > g.R() * (1 + 1e-12))
    throw std::invalid_argument("wp_norm: rho outside (0, R]");
  const int n = g.n_cells();
  double acc = 0;
  if (value_part) {
    const auto& v = g.node_volume();
    for (int i = 0; i <= n; ++i) {
      if (g.node(i) >= rho) break;
      acc += v[i] * std::pow(std::abs(u.values[i]), p);
    }
  }
  if (grad_part) {
    const auto du = interval_gradient(u);
    const auto& W = g.interval_weight();
    const double h = g.h();
    for (int j = 0; j < n; ++j) {
      if (g.mid(j) >= rho) break;
      acc += h * W[j] * std::pow(std::abs(du[j]), p);
    }
  }
  return g.angular_measure() * acc;
}

}  // namespace

double wp_norm(const RadialField& u, double p, double rho) {
  return std::pow(wp_pow_p(u, p, rho, true, true), 1.0 / p);
}

double wp_distance(const RadialField& a, const RadialField& b, double p, double rho) {
  check_same_grid(a, b, "wp_distance");
  const auto& g = a.grid;
  const int n = g.n_cells();
  double acc = 0;
  const auto& v = g.node_volume();
  for (int i = 0; i <= n; ++i) {
    if (g.node(i) >= rho) break;
    acc += v[i] * std::pow(std::abs(a.values[i] - b.values[i]), p);
  }
  const auto da = interval_gradient(a);
  const auto db = interval_gradient(b);
  const auto& W = g.interval_weight();
  for (int j = 0; j < n; ++j) {
    if (g.mid(j) >= rho) break;
    acc += g.h() * W[j] * std::pow(std::abs(da[j] - db[j]), p);
  }
  return std::pow(g.angular_measure() * acc, 1.0 / p);
}

double grad_pnorm(const RadialField& u, double p, double rho) {
  return std::pow(wp_pow_p(u, p, rho, false, true), 1.0 / p);
}

double lq_norm(const RadialField& u, double q, double rho) {
  return std::pow(wp_pow_p(u, q, rho, true, false), 1.0 / q);
}

void write_csv(const RadialField& u, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  std::fputs("r,u,Du\n", f);
  const auto d = node_gradient(u);
  for (int i = 0; i < u.n_nodes(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g\n", u.grid.node(i), u.values[i], d[i]);
  std::fclose(f);
}

}  // namespace sspde
