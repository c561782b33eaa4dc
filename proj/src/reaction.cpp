#include "sspde/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sspde/errors.hpp"

namespace sspde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double surface_area(double N_dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N_dim) / std::tgamma(0.5 * N_dim);
}

}  // namespace

ExponentData validate_exponents(double p, double N_dim, double gamma, double r,
                                double eta, double theta) {
  for (double x : {p, N_dim, gamma, r, eta, theta})
    require(std::isfinite(x), "exponents: non-finite input");
  require(N_dim >= 2, "exponents: dimension must be >= 2");
  require(p > 1, "exponents: p must exceed 1");
  require(p <= N_dim, "exponents: p must not exceed the dimension");
  require(gamma > 0, "exponents: gamma must be positive");
  require(r >= 0 && r < p - 1, "exponents: r must satisfy 0 <= r < p - 1");

  ExponentData ed;
  ed.p = p;
  ed.N_dim = N_dim;
  ed.gamma = gamma;
  ed.r = r;
  ed.eta = eta;
  ed.theta = theta;
  ed.sobolev_limit = (p == N_dim);

  if (ed.sobolev_limit) {
    // Borderline embedding: W^{1,p} maps into every finite Lebesgue space,
    // handled downstream with ball-dependent constants.
    ed.p_star = kInf;
    ed.p_star_conj = 1.0;
  } else {
    ed.p_star = N_dim * p / (N_dim - p);
    ed.p_star_conj = ed.p_star / (ed.p_star - 1.0);
  }
  require(eta > ed.p_star_conj, "exponents: eta must exceed (p*)'");

  const double zeta_inv = 1.0 / ed.p_star_conj - r / p;
  ed.zeta = 1.0 / zeta_inv;
  require(theta > ed.zeta, "exponents: theta must exceed zeta");

  ed.lambda_interp = (eta - ed.p_star_conj) / (eta - 1.0);
  ed.mu_interp = (theta - ed.zeta) / (theta - 1.0);

  // 1/s' must exceed both 1/eta and 1/theta + r/p while keeping s < p*.
  const double L = std::max(1.0 / eta, 1.0 / theta + r / p);
  const double U = 1.0 / ed.p_star_conj;  // keeps s below p*
  double inv_s_conj = 0.5 * (L + 1.0);
  // tie decided with slack so rounding cannot park s against p*
  if (inv_s_conj >= U - 1e-12) inv_s_conj = 0.5 * (L + U);
  ed.s_exp = 1.0 / (1.0 - inv_s_conj);

  require(1.0 / eta < inv_s_conj && 1.0 / theta + r / p < inv_s_conj,
          "exponents: no admissible auxiliary exponent s");
  require(ed.s_exp > 1 && ed.s_exp < ed.p_star, "exponents: s outside (1, p*)");
  return ed;
}

nlohmann::json ExponentData::to_json() const {
  return {{"p", p},
          {"N", N_dim},
          {"gamma", gamma},
          {"r", r},
          {"eta", eta},
          {"theta", theta},
          {"p_star", std::isfinite(p_star) ? nlohmann::json(p_star) : nlohmann::json("inf")},
          {"p_star_conj", p_star_conj},
          {"zeta", zeta},
          {"lambda", lambda_interp},
          {"mu", mu_interp},
          {"s", s_exp},
          {"sobolev_limit", sobolev_limit}};
}

bool RadialProfile::is_zero() const {
  if (tabulated())
    return std::all_of(table_v.begin(), table_v.end(), [](double v) { return v == 0.0; });
  return amplitude == 0.0 || cutoff <= 0.0;
}

double RadialProfile::operator()(double s) const {
  if (s < 0) throw std::invalid_argument("profile: negative radius");
  if (tabulated()) {
    if (s > table_r.back()) return 0.0;
    auto it = std::upper_bound(table_r.begin(), table_r.end(), s);
    if (it == table_r.begin()) return table_v.front();
    const std::size_t hi = static_cast<std::size_t>(it - table_r.begin());
    if (hi >= table_r.size()) return table_v.back();
    const double t = (s - table_r[hi - 1]) / (table_r[hi] - table_r[hi - 1]);
    return table_v[hi - 1] + t * (table_v[hi] - table_v[hi - 1]);
  }
  if (s >= cutoff) return 0.0;
  return amplitude * std::pow(1.0 + s, -decay);
}

double RadialProfile::min_on(double radius) const {
  // Power profiles are nonincreasing, so the infimum over [0, radius] sits at
  // the right end (or is 0 past the cutoff). Tabulated ones get scanned.
  if (!tabulated()) {
    if (radius >= cutoff) return 0.0;
    return (*this)(radius);
  }
  double lo = kInf;
  for (int i = 0; i <= 512; ++i) lo = std::min(lo, (*this)(radius * i / 512.0));
  return lo;
}

namespace {

// 8-point Gauss-Legendre on [a, b].
template <class F>
double gl8(F&& f, double a, double b) {
  static const double xs[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
  static const double ws[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 4; ++i)
    s += ws[i] * (f(c - hw * xs[i]) + f(c + hw * xs[i]));
  return s * hw;
}

}  // namespace

double RadialProfile::lq_norm(double q, int N_dim) const {
  require(q >= 1 && std::isfinite(q), "profile norm: q must be >= 1");
  const double area = surface_area(N_dim);
  if (tabulated()) {
    double acc = 0;
    for (std::size_t k = 1; k < table_r.size(); ++k)
      acc += gl8([&](double r) { return std::pow((*this)(r), q) * std::pow(r, N_dim - 1); },
                 table_r[k - 1], table_r[k]);
    return std::pow(area * acc, 1.0 / q);
  }
  if (is_zero()) return 0.0;
  // int_0^Rc (1+r)^{-aq} r^{N-1} dr expanded via r^{N-1} = ((1+r)-1)^{N-1}.
  const double aq = decay * q;
  double integral = 0;
  double binom = 1.0;  // C(N-1, k), built incrementally
  for (int k = 0; k <= N_dim - 1; ++k) {
    if (k > 0) binom = binom * (N_dim - k) / k;
    const double sign = ((N_dim - 1 - k) % 2 == 0) ? 1.0 : -1.0;
    const double beta = k - aq;
    double piece;
    if (std::abs(beta + 1.0) < 1e-13)
      piece = std::log1p(cutoff);
    else
      piece = (std::pow(1.0 + cutoff, beta + 1.0) - 1.0) / (beta + 1.0);
    integral += sign * binom * piece;
  }
  return std::pow(area * std::pow(amplitude, q) * integral, 1.0 / q);
}

RadialProfile RadialProfile::indicator(double radius, double amplitude) {
  RadialProfile w;
  w.amplitude = amplitude;
  w.decay = 0.0;
  w.cutoff = radius;
  return w;
}

RadialProfile RadialProfile::zero() { return RadialProfile{}; }

nlohmann::json profile_to_json(const RadialProfile& w) {
  if (w.tabulated()) return {{"table_r", w.table_r}, {"table_v", w.table_v}};
  return {{"amplitude", w.amplitude}, {"decay", w.decay}, {"cutoff", w.cutoff}};
}

RadialProfile profile_from_json(const nlohmann::json& j) {
  require(j.is_object(), "profile: expected an object");
  RadialProfile w;
  bool has_table = false, has_power = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "amplitude") { w.amplitude = val.get<double>(); has_power = true; }
    else if (key == "decay") { w.decay = val.get<double>(); has_power = true; }
    else if (key == "cutoff") { w.cutoff = val.get<double>(); has_power = true; }
    else if (key == "table_r") { w.table_r = val.get<std::vector<double>>(); has_table = true; }
    else if (key == "table_v") { w.table_v = val.get<std::vector<double>>(); has_table = true; }
    else throw std::invalid_argument("profile: unknown key '" + key + "'");
  }
  require(!(has_table && has_power), "profile: mixed tabulated and power keys");
  if (has_table) {
    require(w.table_r.size() == w.table_v.size() && w.table_r.size() >= 2,
            "profile: table_r/table_v must match with >= 2 samples");
    require(std::is_sorted(w.table_r.begin(), w.table_r.end()), "profile: table_r not sorted");
    for (double v : w.table_v) require(v >= 0 && std::isfinite(v), "profile: negative sample");
  } else {
    require(w.amplitude >= 0 && std::isfinite(w.amplitude), "profile: amplitude must be >= 0");
    require(w.decay >= 0 && std::isfinite(w.decay), "profile: decay must be >= 0");
    require(w.cutoff >= 0 && std::isfinite(w.cutoff), "profile: cutoff must be >= 0");
  }
  return w;
}

double smoothstep_plateau(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double tau = 2.0 * t - 1.0;
  return 1.0 - tau * tau * (3.0 - 2.0 * tau);
}

double smoothstep_plateau_deriv(double t) {
  if (t <= 0.5 || t >= 1.0) return 0.0;
  const double tau = 2.0 * t - 1.0;
  return -12.0 * tau * (1.0 - tau);
}

double SubReaction::operator()(double radius, double s) const {
  return beta * smoothstep_plateau(radius / sigma) * smoothstep_plateau(std::abs(s) / alpha);
}

double SubReaction::ds(double radius, double s) const {
  const double sign = s < 0 ? -1.0 : 1.0;
  return beta * smoothstep_plateau(radius / sigma) *
         smoothstep_plateau_deriv(std::abs(s) / alpha) * sign / alpha;
}

SubReaction build_sub_reaction(double beta, double sigma, double alpha) {
  require(beta > 0 && std::isfinite(beta), "sub-reaction: beta must be positive");
  require(sigma > 0 && sigma < 1, "sub-reaction: sigma must lie in (0, 1)");
  require(alpha > 0 && std::isfinite(alpha), "sub-reaction: alpha must be positive");
  return SubReaction{beta, sigma, alpha};
}

double TruncatedSubReaction::operator()(double radius, double s) const {
  return std::min(base(radius, s + eps1), delta);
}

double TruncatedSubReaction::ds(double radius, double s) const {
  if (base(radius, s + eps1) >= delta) return 0.0;
  return base.ds(radius, s + eps1);
}

namespace {

// Inverse of the plateau cutoff on its descending branch, T(t) = y, t in [1/2,1].
double plateau_inverse(double y) {
  double lo = 0.5, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (smoothstep_plateau(mid) > y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double TruncatedSubReaction::primitive(double radius, double s) const {
  if (s == 0.0) return 0.0;
  const double B = base.beta * smoothstep_plateau(radius / base.sigma);
  const double a = base.alpha;
  if (B <= 0.0) return 0.0;
  // Piece boundaries of t -> min(B T(|t+eps1|/a), delta) inside [0, s].
  std::vector<double> cuts = {-eps1 - a, -eps1 - 0.5 * a, -eps1 + 0.5 * a, -eps1 + a};
  if (B > delta) {
    const double t_star = a * plateau_inverse(delta / B);
    cuts.push_back(-eps1 - t_star);
    cuts.push_back(-eps1 + t_star);
  }
  const double lo = std::min(0.0, s), hi = std::max(0.0, s);
  std::vector<double> pts = {lo, hi};
  for (double c : cuts)
    if (c > lo && c < hi) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  auto f = [&](double t) { return (*this)(radius, t); };
  double acc = 0;
  for (std::size_t k = 1; k < pts.size(); ++k) acc += gl8(f, pts[k - 1], pts[k]);
  return s > 0 ? acc : -acc;
}

TruncatedSubReaction truncate_sub_reaction(const SubReaction& f, double eps1, double delta) {
  require(eps1 > 0 && std::isfinite(eps1), "truncation: eps1 must be positive");
  require(delta > 0 && std::isfinite(delta), "truncation: delta must be positive");
  TruncatedSubReaction fd{f, eps1, delta, false};
  fd.positivity_warning = eps1 >= 0.5 * f.alpha;
  return fd;
}

double ReactionSpec::eval_reaction(double radius, double s) const {
  if (!(s > 0))
    throw SingularDomainError("reaction: argument s = " + std::to_string(s) +
                              " outside the singular domain (0, inf)");
  return h(radius) * std::pow(s, -gamma);
}

double ReactionSpec::eval_convection(double radius, double xi_norm) const {
  if (xi_norm < 0 || !std::isfinite(xi_norm))
    throw std::invalid_argument("convection: |xi| must be finite and >= 0");
  if (g_form == GForm::Zero) return 0.0;
  return weight_k(radius) * std::pow(xi_norm, r_exp);
}

void ReactionSpec::validate_positivity() const {
  require(beta > 0 && std::isfinite(beta), "reaction: beta must be positive");
  require(sigma > 0 && sigma < 1, "reaction: sigma must lie in (0, 1)");
  require(alpha > 0 && std::isfinite(alpha), "reaction: alpha must be positive");
  require(gamma > 0 && std::isfinite(gamma), "reaction: gamma must be positive");
  require(r_exp >= 0 && std::isfinite(r_exp), "reaction: r must be >= 0");
  // f(x,s) = h(x) s^{-gamma} is nonincreasing in s, so the worst sample over
  // B_sigma x (0, alpha) is h's infimum against s near alpha.
  const double h_min = h.min_on(sigma * (1.0 - 1e-12));
  const double s_hi = alpha * (1.0 - 1e-12);
  if (!(h_min * std::pow(s_hi, -gamma) > beta))
    throw std::invalid_argument(
        "reaction: positivity data inconsistent, f <= beta on the core (min h = " +
        std::to_string(h_min) + ")");
}

namespace {

FForm f_form_from_string(const std::string& s) {
  if (s == "envelope") return FForm::Envelope;
  throw std::invalid_argument("reaction: unknown f_form '" + s + "'");
}

GForm g_form_from_string(const std::string& s) {
  if (s == "envelope") return GForm::Envelope;
  if (s == "zero") return GForm::Zero;
  throw std::invalid_argument("reaction: unknown g_form '" + s + "'");
}

}  // namespace

nlohmann::json reaction_to_json(const ReactionSpec& rs) {
  return {{"h", profile_to_json(rs.h)},
          {"weight_k", profile_to_json(rs.weight_k)},
          {"gamma", rs.gamma},
          {"r", rs.r_exp},
          {"eta", rs.eta},
          {"theta", rs.theta},
          {"beta", rs.beta},
          {"sigma", rs.sigma},
          {"alpha", rs.alpha},
          {"f_form", "envelope"},
          {"g_form", rs.g_form == GForm::Zero ? "zero" : "envelope"}};
}

ReactionSpec reaction_from_json(const nlohmann::json& j) {
  require(j.is_object(), "reaction: expected an object");
  ReactionSpec rs;
  bool has_h = false, has_k = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "h") { rs.h = profile_from_json(val); has_h = true; }
    else if (key == "weight_k") { rs.weight_k = profile_from_json(val); has_k = true; }
    else if (key == "gamma") rs.gamma = val.get<double>();
    else if (key == "r") rs.r_exp = val.get<double>();
    else if (key == "eta") rs.eta = val.get<double>();
    else if (key == "theta") rs.theta = val.get<double>();
    else if (key == "beta") rs.beta = val.get<double>();
    else if (key == "sigma") rs.sigma = val.get<double>();
    else if (key == "alpha") rs.alpha = val.get<double>();
    else if (key == "f_form") rs.f_form = f_form_from_string(val.get<std::string>());
    else if (key == "g_form") rs.g_form = g_form_from_string(val.get<std::string>());
    else throw std::invalid_argument("reaction: unknown key '" + key + "'");
  }
  require(has_h && has_k, "reaction: h and weight_k are required");
  return rs;
}

}  // namespace sspde
