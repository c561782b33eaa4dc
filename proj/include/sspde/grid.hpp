#pragma once

#include <string>
#include <vector>

#include "sspde/operator.hpp"

namespace sspde {

// Uniform radial mesh on the ball B_R in R^N. Nodes r_i = i h, i = 0..n_cells,
// with midpoint interval weights W_j = r_{j+1/2}^{N-1} and exact dual-cell
// volumes v_i = (r_{i+1/2}^N - r_{i-1/2}^N)/N (one-sided at the ends). With
// these weights the divergence residual is the gradient of the discrete
// energy divided by v_i, which the variational solves rely on.
class RadialGrid {
public:
  RadialGrid() = default;
  RadialGrid(double R, int n_cells, int N_dim);

  double R() const { return R_; }
  int n_cells() const { return n_; }
  int N_dim() const { return dim_; }
  double h() const { return h_; }
  double node(int i) const { return i * h_; }
  double mid(int j) const { return (j + 0.5) * h_; }
  double angular_measure() const { return angular_; }  // |S^{N-1}|

  const std::vector<double>& interval_weight() const { return W_; }  // size n_cells
  const std::vector<double>& node_volume() const { return v_; }      // size n_cells + 1

  bool operator==(const RadialGrid& o) const {
    return R_ == o.R_ && n_ == o.n_ && dim_ == o.dim_;
  }

private:
  double R_ = 0;
  int n_ = 0;
  int dim_ = 0;
  double h_ = 0;
  double angular_ = 0;
  std::vector<double> W_, v_;
};

// Node values on a RadialGrid; values.size() == n_cells + 1. Fields produced
// by the Dirichlet solvers have values.back() == 0, barriers may not.
struct RadialField {
  RadialGrid grid;
  std::vector<double> values;

  double operator()(int i) const { return values[i]; }
  int n_nodes() const { return static_cast<int>(values.size()); }
};

RadialField zero_field(const RadialGrid& g);
RadialField constant_field(const RadialGrid& g, double value);

// First n_cells(sub) + 1 nodes of a field living on a finer/larger grid with
// the same spacing and dimension. Throws std::invalid_argument on mismatch.
RadialField restrict_field(const RadialField& u, const RadialGrid& sub);

// Midpoint gradients, size n_cells.
std::vector<double> interval_gradient(const RadialField& u);

// Node gradients: centered in the interior, zero at the origin (even
// reflection), one-sided at r = R. Size n_cells + 1.
std::vector<double> node_gradient(const RadialField& u);

// res_i = -div_h a(grad u)_i - rhs_i at interior nodes i = 0..n_cells-1;
// the boundary slot is set to zero. Grids must match.
RadialField residual(const OperatorSpec& op, const RadialField& u, const RadialField& rhs);

// Discrete J(u) = int_B A(|grad u|) - rhs u  (angular factor included).
double discrete_energy(const OperatorSpec& op, const RadialField& u, const RadialField& rhs);

// || |u| + |grad u| ||-style W^{1,p} norm over the ball of radius rho:
// ( sum_{r_i < rho} w_i |u_i|^p + sum_{mid_j < rho} w_j |Du_j|^p )^{1/p}.
double wp_norm(const RadialField& u, double p, double rho);
double wp_distance(const RadialField& a, const RadialField& b, double p, double rho);

// Gradient part only, over the ball of radius rho.
double grad_pnorm(const RadialField& u, double p, double rho);

// L^q norm of the interpolated node values over the ball of radius rho.
double lq_norm(const RadialField& u, double q, double rho);

// r,u,Du rows; Du is the node gradient.
void write_csv(const RadialField& u, const std::string& path);

}  // namespace sspde
