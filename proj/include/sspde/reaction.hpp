#pragma once

#include <functional>
#include <vector>

#include <json.hpp>

namespace sspde {

// Exponent bookkeeping for the reaction-convection problem. p = N is accepted
// with the limiting conventions p* = +inf, (p*)' = 1; everything downstream
// (interpolation exponents, auxiliary integrability s) stays finite.
struct ExponentData {
  double p = 2, N_dim = 3;
  double gamma = 1, r = 0;
  double eta = 2, theta = 3;

  double p_star = 0;       // N p / (N - p), +inf when p == N
  double p_star_conj = 1;  // its conjugate
  double zeta = 0;         // (1/(p*)' - r/p)^{-1}
  double lambda_interp = 0;  // (eta - (p*)') / (eta - 1)
  double mu_interp = 0;      // (theta - zeta) / (theta - 1)
  double s_exp = 0;          // auxiliary exponent in (1, p*)
  bool sobolev_limit = false;  // p == N branch

  nlohmann::json to_json() const;
};

// Throws std::invalid_argument naming the violated inequality.
ExponentData validate_exponents(double p, double N_dim, double gamma, double r,
                                double eta, double theta);

// Radial weight c (1+s)^{-decay} cut off at radius `cutoff`, or a tabulated
// profile with linear interpolation. Power profiles admit exact L^q norms.
struct RadialProfile {
  double amplitude = 0;
  double decay = 0;
  double cutoff = 0;
  std::vector<double> table_r, table_v;  // nonempty = tabulated mode

  bool tabulated() const { return !table_r.empty(); }
  bool is_zero() const;
  double operator()(double s) const;
  double min_on(double radius) const;          // inf over [0, radius]
  double lq_norm(double q, int N_dim) const;   // over R^N, angular factor included

  static RadialProfile indicator(double radius, double amplitude = 1.0);
  static RadialProfile zero();
};

nlohmann::json profile_to_json(const RadialProfile& w);
RadialProfile profile_from_json(const nlohmann::json& j);

// C^1 plateau cutoff: 1 on [0,1/2], cubic descent on (1/2,1), 0 on [1,inf).
double smoothstep_plateau(double t);
double smoothstep_plateau_deriv(double t);

// Smooth positive bump f_under(x,s) = beta T(|x|/sigma) T(|s|/alpha) minoring
// the reaction on its positivity region.
struct SubReaction {
  double beta = 0, sigma = 0, alpha = 0;
  double operator()(double radius, double s) const;
  double ds(double radius, double s) const;
};

SubReaction build_sub_reaction(double beta, double sigma, double alpha);

// f_delta(x,s) = min(f_under(x, s + eps1), delta); bounded, nonsingular.
struct TruncatedSubReaction {
  SubReaction base;
  double eps1 = 0, delta = 0;
  bool positivity_warning = false;  // eps1 >= alpha/2 erodes the positivity core

  double operator()(double radius, double s) const;
  double ds(double radius, double s) const;
  double primitive(double radius, double s) const;  // int_0^s f_delta(x,t) dt
};

TruncatedSubReaction truncate_sub_reaction(const SubReaction& f, double eps1, double delta);

enum class FForm { Envelope };        // f(x,s) = h(x) s^{-gamma}
enum class GForm { Envelope, Zero };  // g(x,xi) = k(x) |xi|^r or 0

struct ReactionSpec {
  RadialProfile h, weight_k;
  double gamma = 1;
  double r_exp = 0;
  double eta = 2, theta = 3;                // declared integrability of h and weight_k
  double beta = 1, sigma = 0.5, alpha = 1;  // positivity data
  FForm f_form = FForm::Envelope;
  GForm g_form = GForm::Envelope;

  double eval_reaction(double radius, double s) const;  // SingularDomainError on s <= 0
  double eval_convection(double radius, double xi_norm) const;

  // Sampled check that f > beta on B_sigma x (0, alpha); throws
  // std::invalid_argument when the positivity data is inconsistent.
  void validate_positivity() const;
};

nlohmann::json reaction_to_json(const ReactionSpec& rs);
ReactionSpec reaction_from_json(const nlohmann::json& j);

}  // namespace sspde
