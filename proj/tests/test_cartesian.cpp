#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sspde/cartesian.hpp"
#include "sspde/errors.hpp"

using namespace sspde;

namespace {

double exact_p_poisson(double p, double N_dim, double R, double r) {
  const double pc = p / (p - 1.0);
  return (p - 1.0) / p * std::pow(N_dim, -1.0 / (p - 1.0)) *
         (std::pow(R, pc) - std::pow(r, pc));
}

}  // namespace

TEST_CASE("cartesian oracle recovers the laplacian disc solution") {
  const auto unit = [](double, double) { return 1.0; };
  const CartesianSolution sol =
      cartesian_oracle_solve(OperatorSpec::p_laplacian(2.0), unit, 1.0, 64);
  CHECK(sol.residual_inf <= 1e-8);
  CHECK(sol.center() == doctest::Approx(0.25).epsilon(0.02));

  // Radial symmetry of the discrete solution across the axes.
  const int n = sol.n;
  for (int k = 1; k < n / 2; k += 7) {
    const double right = sol.at(n / 2 + k, n / 2);
    const double up = sol.at(n / 2, n / 2 + k);
    const double left = sol.at(n / 2 - k, n / 2);
    CHECK(right == doctest::Approx(up).epsilon(1e-7));
    CHECK(right == doctest::Approx(left).epsilon(1e-7));
  }

  // Off-center sample against the exact paraboloid.
  const double x = sol.h * 10;
  const double expected = exact_p_poisson(2, 2, 1.0, std::abs(x));
  CHECK(sol.at(n / 2 + 10, n / 2) == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("cartesian oracle handles the degenerate cubic growth case") {
  const auto unit = [](double, double) { return 1.0; };
  SolveSettings s;
  s.newton_tol = 1e-8;  // the degenerate tangent at the center makes 1e-10 unreachable
  const CartesianSolution sol =
      cartesian_oracle_solve(OperatorSpec::p_laplacian(3.0), unit, 1.0, 48, s);
  const double expected = exact_p_poisson(3, 2, 1.0, 0.0);  // 2/(3 sqrt 2)
  CHECK(expected == doctest::Approx(0.4714).epsilon(1e-3));
  CHECK(sol.center() == doctest::Approx(expected).epsilon(0.025));
}

TEST_CASE("cartesian oracle respects its input contract") {
  const auto unit = [](double, double) { return 1.0; };
  CHECK_THROWS_AS(cartesian_oracle_solve(OperatorSpec::p_laplacian(2.0), unit, 0.0, 16),
                  std::invalid_argument);
  CHECK_THROWS_AS(cartesian_oracle_solve(OperatorSpec::p_laplacian(2.0), unit, 1.0, 15),
                  std::invalid_argument);
  CHECK_THROWS_AS(cartesian_oracle_solve(OperatorSpec::p_laplacian(2.0), unit, 1.0, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(cartesian_oracle_solve(OperatorSpec::p_laplacian(2.0), unit, 1.0, 66),
                  std::invalid_argument);
}
