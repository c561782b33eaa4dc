#pragma once

#include <functional>

#include "sspde/grid.hpp"
#include "sspde/solver.hpp"

namespace sspde {

struct CartesianSolution {
  int n = 0;           // cells per axis on [-R, R]
  double R = 0;
  double h = 0;
  std::vector<double> values;  // (n+1)^2 node values, row-major
  int iterations = 0;
  double residual_inf = 0;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * (n + 1) + i]; }
  double center() const { return at(n / 2, n / 2); }
};

// Independent 2D cross-check for the radial solver: P1 triangles on a square
// grid over [-R,R]^2, alternating diagonals, nodes pinned to zero outside the
// disc (half-cell inward shift centers the staircase on the true circle).
// Damped Newton on the discrete energy, sparse Cholesky inner solves.
// rhs is x,y -> value; n <= 64. Throws OracleFailure on non-convergence.
CartesianSolution cartesian_oracle_solve(const OperatorSpec& op,
                                         const std::function<double(double, double)>& rhs,
                                         double R, int n,
                                         const SolveSettings& s = {});

}  // namespace sspde
