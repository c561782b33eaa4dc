#include "sspde/cartesian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "sspde/errors.hpp"

namespace sspde {

namespace {

struct Tri {
  int k[3];
  double gx[3], gy[3];  // P1 shape gradients, constant per triangle
  double area;
};

}  // namespace

CartesianSolution cartesian_oracle_solve(const OperatorSpec& op,
                                         const std::function<double(double, double)>& rhs,
                                         double R, int n, const SolveSettings& s) {
  if (!(R > 0) || n < 4 || n > 64 || n % 2 != 0)
    throw std::invalid_argument("cartesian oracle: need R > 0 and even 4 <= n <= 64");
  const int m = n + 1;
  const double h = 2.0 * R / n;
  auto X = [&](int i) { return -R + i * h; };
  auto idx = [&](int i, int j) { return j * m + i; };

  // Pin a node when it falls outside the half-cell shrunken disc; the shift
  // centers the boundary staircase on the true circle.
  std::vector<int> unknown(m * m, -1);
  int n_unknown = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      if (std::hypot(X(i), X(j)) < R - 0.5 * h) unknown[idx(i, j)] = n_unknown++;
  if (n_unknown == 0) throw std::invalid_argument("cartesian oracle: empty interior");

  // Triangulation with diagonals alternating by cell parity.
  std::vector<Tri> tris;
  tris.reserve(2 * n * n);
  auto add_tri = [&](int a, int b, int c, double xa, double ya, double xb, double yb,
                     double xc, double yc) {
    Tri t;
    t.k[0] = a; t.k[1] = b; t.k[2] = c;
    const double d1x = xb - xa, d1y = yb - ya, d2x = xc - xa, d2y = yc - ya;
    const double det = d1x * d2y - d1y * d2x;
    t.area = 0.5 * std::abs(det);
    // Rows of the inverse edge matrix give the shape gradients.
    t.gx[1] = d2y / det;  t.gy[1] = -d2x / det;
    t.gx[2] = -d1y / det; t.gy[2] = d1x / det;
    t.gx[0] = -t.gx[1] - t.gx[2];
    t.gy[0] = -t.gy[1] - t.gy[2];
    tris.push_back(t);
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int A = idx(i, j), B = idx(i + 1, j), C = idx(i + 1, j + 1), D = idx(i, j + 1);
      const double x0 = X(i), x1 = X(i + 1), y0 = X(j), y1 = X(j + 1);
      if ((i + j) % 2 == 0) {
        add_tri(A, B, C, x0, y0, x1, y0, x1, y1);
        add_tri(A, C, D, x0, y0, x1, y1, x0, y1);
      } else {
        add_tri(A, B, D, x0, y0, x1, y0, x0, y1);
        add_tri(B, C, D, x1, y0, x1, y1, x0, y1);
      }
    }

  // Lumped load over the free nodes.
  std::vector<double> lump(m * m, 0.0);
  for (const Tri& t : tris)
    for (int a = 0; a < 3; ++a) lump[t.k[a]] += t.area / 3.0;
  std::vector<double> load(m * m, 0.0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) load[idx(i, j)] = lump[idx(i, j)] * rhs(X(i), X(j));

  std::vector<double> u(m * m, 0.0);

  auto energy = [&](const std::vector<double>& w) {
    double acc = 0.0;
    for (const Tri& t : tris) {
      double xg = 0, yg = 0;
      for (int a = 0; a < 3; ++a) {
        xg += t.gx[a] * w[t.k[a]];
        yg += t.gy[a] * w[t.k[a]];
      }
      acc += t.area * energy_primitive(op, std::hypot(xg, yg));
    }
    for (int k = 0; k < m * m; ++k)
      if (unknown[k] >= 0) acc -= load[k] * w[k];
    return acc;
  };

  Eigen::SparseMatrix<double> K(n_unknown, n_unknown);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd grad(n_unknown), d(n_unknown);

  CartesianSolution out;
  out.n = n;
  out.R = R;
  out.h = h;

  double res_inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= s.max_newton; ++k) {
    trips.clear();
    grad.setZero();
    for (const Tri& t : tris) {
      double xg = 0, yg = 0;
      for (int a = 0; a < 3; ++a) {
        xg += t.gx[a] * u[t.k[a]];
        yg += t.gy[a] * u[t.k[a]];
      }
      const double tn = std::hypot(xg, yg);
      const double a0 = op.a0(std::max(tn, s.jac_floor));
      const double fx = op.a0(tn) * xg, fy = op.a0(tn) * yg;
      // Flux tangent a0 I + (a0'/t) xi xi^T, floored along xi for degeneracy.
      const double tf = std::max(tn, s.jac_floor);
      const double ap_over_t = op.a0_prime(tf) / tf;
      const double Mxx = a0 + ap_over_t * xg * xg;
      const double Mxy = ap_over_t * xg * yg;
      const double Myy = a0 + ap_over_t * yg * yg;
      for (int a = 0; a < 3; ++a) {
        const int ra = unknown[t.k[a]];
        if (ra < 0) continue;
        grad[ra] += t.area * (fx * t.gx[a] + fy * t.gy[a]);
        for (int b = 0; b < 3; ++b) {
          const int rb = unknown[t.k[b]];
          if (rb < 0) continue;
          const double kab =
              t.area * (t.gx[a] * (Mxx * t.gx[b] + Mxy * t.gy[b]) +
                        t.gy[a] * (Mxy * t.gx[b] + Myy * t.gy[b]));
          trips.emplace_back(ra, rb, kab);
        }
      }
    }
    res_inf = 0.0;
    for (int kk = 0; kk < m * m; ++kk) {
      const int r = unknown[kk];
      if (r < 0) continue;
      grad[r] -= load[kk];
      res_inf = std::max(res_inf, std::abs(grad[r]) / lump[kk]);
    }
    if (res_inf <= s.newton_tol) {
      out.iterations = k;
      break;
    }
    if (k == s.max_newton) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", res_inf);
      throw OracleFailure(std::string("cartesian oracle: newton stalled at residual ") + buf);
    }

    K.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success)
      throw OracleFailure("cartesian oracle: factorization failed");
    d = -ldlt.solve(grad);

    const double u_scale = *std::max_element(u.begin(), u.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    });
    const double cap = 10.0 * (1.0 + std::abs(u_scale));
    const double dmax = d.cwiseAbs().maxCoeff();
    if (dmax > cap) d *= cap / dmax;
    if (dmax <= 1e-13 * (1.0 + std::abs(u_scale))) {
      out.iterations = k;
      break;
    }

    double slope = grad.dot(d);
    if (!(slope < 0)) throw OracleFailure("cartesian oracle: non-descent direction");

    const double J0 = energy(u);
    std::vector<double> trial(u);
    double step = 1.0;
    bool accepted = false;
    for (int b = 0; b <= s.max_backtracks; ++b) {
      for (int kk = 0; kk < m * m; ++kk) {
        const int r = unknown[kk];
        trial[kk] = r >= 0 ? u[kk] + step * d[r] : 0.0;
      }
      if (energy(trial) <= J0 + s.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw OracleFailure("cartesian oracle: line search failed");
    u.swap(trial);
  }

  out.values = std::move(u);
  out.residual_inf = res_inf;
  return out;
}

}  // namespace sspde
