#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "sspde/grid.hpp"

using namespace sspde;

namespace {

constexpr double pi = std::numbers::pi;

RadialField nodal(const RadialGrid& g, double (*f)(double)) {
  RadialField u = zero_field(g);
  for (int i = 0; i <= g.n_cells(); ++i) u.values[i] = f(g.node(i));
  return u;
}

}  // namespace

TEST_CASE("grid weights and dual volumes are exact shell measures") {
  const RadialGrid g(2.0, 64, 3);
  CHECK(g.h() == doctest::Approx(2.0 / 64));
  CHECK(g.angular_measure() == doctest::Approx(4.0 * pi));
  CHECK(g.interval_weight()[5] == doctest::Approx(std::pow(g.mid(5), 2)));

  double total = 0;
  for (double v : g.node_volume()) total += v;
  CHECK(total == doctest::Approx(std::pow(2.0, 3) / 3.0).epsilon(1e-14));

  const RadialGrid g2(1.0, 32, 2);
  CHECK(g2.angular_measure() == doctest::Approx(2.0 * pi));
  CHECK(g2.node_volume()[0] == doctest::Approx(0.5 * std::pow(0.5 * g2.h(), 2)));

  CHECK_THROWS_AS(RadialGrid(0.0, 16, 2), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid(1.0, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid(1.0, 16, 1), std::invalid_argument);
}

TEST_CASE("sobolev norm of the cone matches the closed form") {
  // u = 1 - r on B_1 in the plane: the gradient part of ||u||_{W^{1,2}}^2 is
  // exactly pi on this mesh and the value part tends to pi/6, so the norm
  // approaches sqrt(7 pi / 6) = 1.91312...
  const RadialGrid g(1.0, 256, 2);
  const RadialField u = nodal(g, +[](double r) { return 1.0 - r; });
  CHECK(wp_norm(u, 2.0, 1.0) == doctest::Approx(std::sqrt(7.0 * pi / 6.0)).epsilon(1e-4));
  CHECK(grad_pnorm(u, 2.0, 1.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
  CHECK(lq_norm(u, 2.0, 1.0) == doctest::Approx(std::sqrt(pi / 6.0)).epsilon(1e-4));

  const RadialField z = zero_field(g);
  CHECK(wp_norm(z, 2.0, 1.0) == 0.0);
  CHECK(wp_distance(u, u, 2.0, 1.0) == 0.0);
  CHECK(wp_distance(u, z, 2.0, 1.0) == doctest::Approx(wp_norm(u, 2.0, 1.0)));
}

TEST_CASE("constant field volume accounting stops at the boundary collar") {
  const RadialGrid g(1.0, 64, 2);
  const RadialField c = constant_field(g, 3.0);
  // Nodes strictly inside B_R cover the shells up to R - h/2.
  const double vol = g.angular_measure() * std::pow(1.0 - 0.5 * g.h(), 2) / 2.0;
  CHECK(lq_norm(c, 1.0, 1.0) == doctest::Approx(3.0 * vol).epsilon(1e-14));
  CHECK(lq_norm(c, 2.0, 1.0) == doctest::Approx(3.0 * std::sqrt(vol)).epsilon(1e-14));
}

TEST_CASE("discrete integration by parts holds to rounding") {
  const OperatorSpec op = OperatorSpec::pq_laplacian(1.0, 3.0, 0.5, 2.0);
  const RadialGrid g(1.5, 97, 3);
  std::mt19937 gen(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RadialField u = zero_field(g), rhs = zero_field(g), phi = zero_field(g);
  for (int i = 0; i < g.n_cells(); ++i) {
    u.values[i] = dist(gen);
    rhs.values[i] = dist(gen) + 1.5;
    phi.values[i] = dist(gen);
  }
  u.values[g.n_cells()] = 0.0;
  phi.values[g.n_cells()] = 0.0;

  const RadialField res = residual(op, u, rhs);
  double lhs = 0;
  for (int i = 0; i < g.n_cells(); ++i) lhs += g.node_volume()[i] * res.values[i] * phi.values[i];

  const auto du = interval_gradient(u);
  const auto dphi = interval_gradient(phi);
  double rhs_sum = 0;
  for (int j = 0; j < g.n_cells(); ++j)
    rhs_sum += g.h() * g.interval_weight()[j] * op.flux_scalar(du[j]) * dphi[j];
  for (int i = 0; i < g.n_cells(); ++i)
    rhs_sum -= g.node_volume()[i] * rhs.values[i] * phi.values[i];

  CHECK(lhs == doctest::Approx(rhs_sum).epsilon(1e-12));

  // The same pairing is the directional derivative of the discrete energy.
  const double t = 1e-6;
  RadialField up = u, um = u;
  for (int i = 0; i <= g.n_cells(); ++i) {
    up.values[i] += t * phi.values[i];
    um.values[i] -= t * phi.values[i];
  }
  const double fd = (discrete_energy(op, up, rhs) - discrete_energy(op, um, rhs)) / (2.0 * t);
  CHECK(fd == doctest::Approx(g.angular_measure() * lhs).epsilon(1e-5));
}

TEST_CASE("quadratic profile annihilates the residual for unit load") {
  // u = (R^2 - r^2) / (2N) solves the Poisson problem with rhs = 1; on this
  // mesh the fluxes telescope exactly, in every dimension.
  for (int N_dim : {2, 3}) {
    const RadialGrid g(1.0, 128, N_dim);
    RadialField u = zero_field(g);
    for (int i = 0; i <= g.n_cells(); ++i) {
      const double r = g.node(i);
      u.values[i] = (1.0 - r * r) / (2.0 * N_dim);
    }
    const RadialField rhs = constant_field(g, 1.0);
    const RadialField res = residual(OperatorSpec::p_laplacian(2.0), u, rhs);
    double worst = 0;
    for (double v : res.values) worst = std::max(worst, std::abs(v));
    INFO("N = ", N_dim);
    CHECK(worst <= 2e-12);  // zero up to rounding amplified by the 1/v_i division
  }
}

TEST_CASE("node gradients reproduce linear slopes") {
  const RadialGrid g(1.0, 32, 2);
  const RadialField u = nodal(g, +[](double r) { return 2.0 - 3.0 * r; });
  const auto d = node_gradient(u);
  CHECK(d[0] == 0.0);
  for (int i = 1; i < g.n_cells(); ++i) CHECK(d[i] == doctest::Approx(-3.0).epsilon(1e-13));
  CHECK(d[g.n_cells()] == doctest::Approx(-3.0).epsilon(1e-13));

  const auto du = interval_gradient(u);
  for (double v : du) CHECK(v == doctest::Approx(-3.0).epsilon(1e-13));
}

TEST_CASE("field restriction keeps the shared prefix") {
  const RadialGrid big(2.0, 128, 2);
  const RadialGrid sub(1.0, 64, 2);
  const RadialField u = nodal(big, +[](double r) { return r * r; });
  const RadialField v = restrict_field(u, sub);
  REQUIRE(v.n_nodes() == 65);
  for (int i = 0; i <= 64; ++i) CHECK(v.values[i] == u.values[i]);

  CHECK_THROWS_AS(restrict_field(u, RadialGrid(1.0, 64, 3)), std::invalid_argument);
  CHECK_THROWS_AS(restrict_field(u, RadialGrid(1.0, 96, 2)), std::invalid_argument);
  CHECK_THROWS_AS(restrict_field(v, big), std::invalid_argument);
}

TEST_CASE("csv output is parseable and round trips node values") {
  const RadialGrid g(1.0, 8, 2);
  const RadialField u = nodal(g, +[](double r) { return std::cos(3.0 * r) / 7.0; });
  const auto path =
      (std::filesystem::temp_directory_path() / "sspde_grid_csv_test.csv").string();
  write_csv(u, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "r,u,Du");
  int rows = 0;
  const auto dref = node_gradient(u);
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string r, uv, duv;
    REQUIRE(std::getline(ss, r, ','));
    REQUIRE(std::getline(ss, uv, ','));
    REQUIRE(std::getline(ss, duv, ','));
    CHECK(std::stod(r) == g.node(rows));
    CHECK(std::stod(uv) == u.values[rows]);
    CHECK(std::stod(duv) == dref[rows]);
    ++rows;
  }
  CHECK(rows == u.n_nodes());
  std::filesystem::remove(path);
}

TEST_CASE("norm guards reject bad radii and mismatched grids") {
  const RadialGrid g(1.0, 16, 2);
  const RadialField u = zero_field(g);
  CHECK_THROWS_AS(wp_norm(u, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(wp_norm(u, 2.0, 2.0), std::invalid_argument);
  const RadialField w = zero_field(RadialGrid(1.0, 32, 2));
  CHECK_THROWS_AS(wp_distance(u, w, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(residual(OperatorSpec::p_laplacian(2.0), u, w), std::invalid_argument);
}
