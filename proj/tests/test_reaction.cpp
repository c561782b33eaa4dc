#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sspde/errors.hpp"
#include "sspde/reaction.hpp"

using namespace sspde;

namespace {

constexpr double pi = std::numbers::pi;

ReactionSpec standard_reaction() {
  ReactionSpec rs;
  rs.h = RadialProfile::indicator(0.5, 1.0);
  rs.weight_k = RadialProfile::indicator(1.0, 0.1);
  rs.gamma = 1.0;
  rs.r_exp = 0.5;
  rs.eta = 2.0;
  rs.theta = 3.0;
  rs.beta = 1.0;
  rs.sigma = 0.5;
  rs.alpha = 1.0;
  return rs;
}

// Composite Simpson quadrature used as an independent check against the
// closed-form profile norms.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("exponent chain for p below the dimension") {
  const ExponentData ed = validate_exponents(2, 3, 1, 0.5, 2, 3);
  CHECK(ed.p_star == doctest::Approx(6.0));
  CHECK(ed.p_star_conj == doctest::Approx(1.2));
  CHECK(ed.zeta == doctest::Approx(12.0 / 7.0));
  CHECK(ed.lambda_interp == doctest::Approx(0.8));
  CHECK(ed.mu_interp == doctest::Approx(9.0 / 14.0));
  CHECK(ed.s_exp == doctest::Approx(4.8));
  CHECK_FALSE(ed.sobolev_limit);

  const ExponentData e2 = validate_exponents(3, 4, 0.5, 1.0, 2, 2);
  CHECK(e2.p_star == doctest::Approx(12.0));
  CHECK(e2.p_star_conj == doctest::Approx(12.0 / 11.0));
  CHECK(e2.zeta == doctest::Approx(12.0 / 7.0));
  CHECK(e2.lambda_interp == doctest::Approx(10.0 / 11.0));
  CHECK(e2.mu_interp == doctest::Approx(2.0 / 7.0));
  // The midpoint toward 1 collides with the ceiling here, so the retake
  // halves toward (p*)' instead and lands at s = 8.
  CHECK(e2.s_exp == doctest::Approx(8.0));
}

TEST_CASE("exponent chain in the borderline case p equal to the dimension") {
  const ExponentData ed = validate_exponents(2, 2, 1, 0.5, 2, 3);
  CHECK(ed.sobolev_limit);
  CHECK(std::isinf(ed.p_star));
  CHECK(ed.p_star_conj == doctest::Approx(1.0));
  CHECK(ed.zeta == doctest::Approx(4.0 / 3.0));
  CHECK(ed.lambda_interp == doctest::Approx(1.0));
  CHECK(ed.mu_interp == doctest::Approx(5.0 / 6.0));
  CHECK(ed.s_exp == doctest::Approx(4.8));

  const auto j = ed.to_json();
  CHECK(j["p_star"] == "inf");
  CHECK(j["s"] == doctest::Approx(4.8));
}

TEST_CASE("auxiliary exponent always lands in its window") {
  for (double p : {1.5, 2.0, 2.5, 2.9})
    for (double r : {0.0, 0.2 * (p - 1), 0.7 * (p - 1)})
      for (double gamma : {0.5, 1.0, 2.0}) {
        const double N_dim = 3;
        const double pstar = N_dim * p / (N_dim - p);
        const double conj = pstar / (pstar - 1.0);
        const double zeta = 1.0 / (1.0 / conj - r / p);
        const ExponentData ed =
            validate_exponents(p, N_dim, gamma, r, conj + 0.75, zeta + 1.25);
        const double inv_s_conj = 1.0 - 1.0 / ed.s_exp;
        CHECK(ed.s_exp > 1.0);
        CHECK(ed.s_exp < ed.p_star);
        CHECK(inv_s_conj > 1.0 / ed.eta);
        CHECK(inv_s_conj > 1.0 / ed.theta + r / p);
        CHECK(ed.lambda_interp > 0.0);
        CHECK(ed.lambda_interp <= 1.0);
        CHECK(ed.mu_interp > 0.0);
        CHECK(ed.mu_interp < 1.0);
      }
}

TEST_CASE("exponent validation names each violated inequality") {
  CHECK_THROWS_AS(validate_exponents(2, 3, 1, 1.0, 2, 3), std::invalid_argument);  // r = p-1
  CHECK_THROWS_AS(validate_exponents(2, 3, 1, -0.1, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_exponents(2, 3, 1, 0.5, 1.2, 3), std::invalid_argument);  // eta = (p*)'
  CHECK_THROWS_AS(validate_exponents(2, 3, 1, 0.5, 2, 12.0 / 7.0), std::invalid_argument);
  CHECK_THROWS_AS(validate_exponents(3, 2, 1, 0.5, 2, 3), std::invalid_argument);  // p > N
  CHECK_THROWS_AS(validate_exponents(1.0, 3, 1, 0.0, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_exponents(2, 3, 0.0, 0.5, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(validate_exponents(2, 1, 1, 0.5, 2, 3), std::invalid_argument);
}

TEST_CASE("indicator profile norms in closed form") {
  const RadialProfile h = RadialProfile::indicator(0.5, 1.0);
  CHECK(h(0.25) == 1.0);
  CHECK(h(0.5) == 0.0);
  CHECK(h(2.0) == 0.0);
  CHECK_FALSE(h.is_zero());
  CHECK(h.lq_norm(1, 2) == doctest::Approx(pi / 4.0));
  CHECK(h.lq_norm(2, 2) == doctest::Approx(std::sqrt(pi / 4.0)));
  CHECK(h.min_on(0.4) == 1.0);
  CHECK(h.min_on(0.6) == 0.0);

  const RadialProfile big = RadialProfile::indicator(1.0, 3.0);
  CHECK(big.lq_norm(2, 3) == doctest::Approx(std::sqrt(12.0 * pi)));

  CHECK(RadialProfile::zero().is_zero());
  CHECK(RadialProfile::zero().lq_norm(2, 2) == 0.0);
}

TEST_CASE("decaying profile norm matches quadrature and the log special case") {
  RadialProfile w;
  w.amplitude = 2.0;
  w.decay = 1.0;
  w.cutoff = 1.0;
  // q = 1 hits the log1p branch of the closed form: the radial integral is
  // 1 - log 2 and the norm is 4 pi (1 - log 2).
  CHECK(w.lq_norm(1, 2) == doctest::Approx(4.0 * pi * (1.0 - std::log(2.0))).epsilon(1e-12));

  const double numeric =
      2.0 * pi * simpson([&](double r) { return std::pow(w(r), 3.0) * r; }, 0.0, 1.0 - 1e-12, 4096);
  CHECK(w.lq_norm(3, 2) == doctest::Approx(std::pow(numeric, 1.0 / 3.0)).epsilon(1e-7));

  const double numeric3d =
      4.0 * pi * simpson([&](double r) { return std::pow(w(r), 2.0) * r * r; }, 0.0, 1.0 - 1e-12, 4096);
  CHECK(w.lq_norm(2, 3) == doctest::Approx(std::sqrt(numeric3d)).epsilon(1e-7));

  CHECK(w(0.0) == 2.0);
  CHECK(w(0.5) == doctest::Approx(2.0 / 1.5));
  CHECK(w.min_on(0.5) == doctest::Approx(2.0 / 1.5));
}

TEST_CASE("tabulated profile interpolation and norms") {
  RadialProfile w;
  w.table_r = {0.0, 0.5, 1.0};
  w.table_v = {1.0, 1.0, 0.0};
  CHECK(w.tabulated());
  CHECK(w(0.25) == doctest::Approx(1.0));
  CHECK(w(0.75) == doctest::Approx(0.5));
  CHECK(w(2.0) == 0.0);
  CHECK(w.min_on(0.5) == doctest::Approx(1.0));
  CHECK(w.min_on(1.0) == doctest::Approx(0.0));
  CHECK(w.lq_norm(1, 2) == doctest::Approx(7.0 * pi / 12.0));
  const double numeric =
      2.0 * pi * simpson([&](double r) { return w(r) * w(r) * r; }, 0.0, 1.0, 2048);
  CHECK(w.lq_norm(2, 2) == doctest::Approx(std::sqrt(numeric)).epsilon(1e-9));
}

TEST_CASE("profile json round trip and schema rejection") {
  RadialProfile w;
  w.amplitude = 2.0;
  w.decay = 1.5;
  w.cutoff = 0.75;
  const RadialProfile back = profile_from_json(profile_to_json(w));
  CHECK(back.amplitude == w.amplitude);
  CHECK(back.decay == w.decay);
  CHECK(back.cutoff == w.cutoff);

  RadialProfile t;
  t.table_r = {0.0, 1.0};
  t.table_v = {2.0, 0.0};
  const RadialProfile tback = profile_from_json(profile_to_json(t));
  CHECK(tback.tabulated());
  CHECK(tback(0.5) == doctest::Approx(1.0));

  CHECK_THROWS_AS(profile_from_json({{"amplitude", 1.0}, {"radius", 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json({{"amplitude", 1.0}, {"table_r", {0.0, 1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json({{"table_r", {0.0, 1.0}}, {"table_v", {1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json({{"table_r", {1.0, 0.0}}, {"table_v", {1.0, 1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json({{"amplitude", -1.0}}), std::invalid_argument);
}

TEST_CASE("plateau cutoff values and derivative") {
  CHECK(smoothstep_plateau(0.0) == 1.0);
  CHECK(smoothstep_plateau(0.5) == 1.0);
  CHECK(smoothstep_plateau(0.75) == doctest::Approx(0.5));
  CHECK(smoothstep_plateau(1.0) == 0.0);
  CHECK(smoothstep_plateau(3.0) == 0.0);
  CHECK(smoothstep_plateau_deriv(0.3) == 0.0);
  CHECK(smoothstep_plateau_deriv(1.2) == 0.0);
  for (double t : {0.55, 0.7, 0.9}) {
    const double fd = (smoothstep_plateau(t + 1e-7) - smoothstep_plateau(t - 1e-7)) / 2e-7;
    CHECK(smoothstep_plateau_deriv(t) == doctest::Approx(fd).epsilon(1e-5));
  }
  // C^1 matching at both junctions
  CHECK(smoothstep_plateau(0.5 + 1e-9) == doctest::Approx(1.0));
  CHECK(smoothstep_plateau(1.0 - 1e-9) == doctest::Approx(0.0));
}

TEST_CASE("sub-reaction bump evaluation") {
  const SubReaction f = build_sub_reaction(1.0, 0.5, 1.0);
  CHECK(f(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(f(0.375, 0.0) == doctest::Approx(0.5));   // radius/sigma = 0.75
  CHECK(f(0.0, 0.75) == doctest::Approx(0.5));
  CHECK(f(0.6, 0.3) == 0.0);
  CHECK(f(0.1, 1.5) == 0.0);
  CHECK(f(0.0, -0.75) == doctest::Approx(0.5));  // even in s

  for (double s : {0.6, 0.8, -0.7}) {
    const double fd = (f(0.2, s + 1e-7) - f(0.2, s - 1e-7)) / 2e-7;
    CHECK(f.ds(0.2, s) == doctest::Approx(fd).epsilon(1e-5));
  }

  CHECK_THROWS_AS(build_sub_reaction(0.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_sub_reaction(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_sub_reaction(1.0, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("truncated sub-reaction bounds and monotonicity") {
  const SubReaction f = build_sub_reaction(1.0, 0.5, 1.0);
  const TruncatedSubReaction fd = truncate_sub_reaction(f, 0.1, 0.25);
  CHECK_FALSE(fd.positivity_warning);
  CHECK(truncate_sub_reaction(f, 0.5, 0.25).positivity_warning);
  CHECK_THROWS_AS(truncate_sub_reaction(f, 0.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(truncate_sub_reaction(f, 0.1, 0.0), std::invalid_argument);

  double prev = fd(0.0, 0.0);
  for (double s = 0.05; s <= 1.5; s += 0.05) {
    const double cur = fd(0.0, s);
    CHECK(cur <= prev + 1e-15);
    CHECK(cur <= fd.delta);
    CHECK(cur <= f(0.0, s + fd.eps1) + 1e-15);
    prev = cur;
  }
  CHECK(fd(0.0, 0.0) == doctest::Approx(0.25));  // truncation active at the core
  CHECK(fd(0.0, 1.0) == 0.0);
}

TEST_CASE("truncated primitive integrates the truncated bump exactly") {
  const SubReaction f = build_sub_reaction(1.0, 0.5, 1.0);

  // Plateau region with a generous delta: the primitive is linear.
  const TruncatedSubReaction loose = truncate_sub_reaction(f, 0.1, 2.0);
  CHECK(loose.primitive(0.0, 0.2) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(loose.primitive(0.0, 0.0) == 0.0);

  const TruncatedSubReaction tight = truncate_sub_reaction(f, 0.1, 0.25);
  CHECK(tight.primitive(0.0, 0.1) == doctest::Approx(0.025).epsilon(1e-13));

  // Derivative of the primitive recovers the integrand across breakpoints.
  for (double s : {0.05, 0.3, 0.45, 0.6, 1.2, -0.3}) {
    const double fdiff =
        (tight.primitive(0.2, s + 1e-6) - tight.primitive(0.2, s - 1e-6)) / 2e-6;
    CHECK(fdiff == doctest::Approx(tight(0.2, s)).epsilon(1e-5));
  }

  // Independent trapezoid quadrature over the whole range.
  for (double s : {0.5, 1.1}) {
    const int n = 20000;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      const double t0 = s * i / n, t1 = s * (i + 1) / n;
      acc += 0.5 * (tight(0.1, t0) + tight(0.1, t1)) * (t1 - t0);
    }
    CHECK(tight.primitive(0.1, s) == doctest::Approx(acc).epsilon(1e-6));
  }

  // Outside the spatial bump the truncated reaction vanishes identically.
  CHECK(tight.primitive(0.7, 0.5) == 0.0);
}

TEST_CASE("reaction evaluation with the singular envelope") {
  const ReactionSpec rs = standard_reaction();
  CHECK(rs.eval_reaction(0.25, 0.5) == doctest::Approx(2.0));
  CHECK(rs.eval_reaction(0.25, 2.0) == doctest::Approx(0.5));
  CHECK(rs.eval_reaction(0.8, 0.5) == 0.0);  // outside supp h
  CHECK_THROWS_AS(rs.eval_reaction(0.25, 0.0), SingularDomainError);
  CHECK_THROWS_AS(rs.eval_reaction(0.25, -1.0), SingularDomainError);

  CHECK(rs.eval_convection(0.0, 4.0) == doctest::Approx(0.2));
  CHECK(rs.eval_convection(0.0, 0.0) == 0.0);
  CHECK(rs.eval_convection(1.5, 4.0) == 0.0);  // outside supp k
  CHECK_THROWS_AS(rs.eval_convection(0.0, -1.0), std::invalid_argument);

  ReactionSpec noconv = rs;
  noconv.g_form = GForm::Zero;
  CHECK(noconv.eval_convection(0.0, 4.0) == 0.0);
}

TEST_CASE("positivity validation accepts the standard data and rejects broken cores") {
  CHECK_NOTHROW(standard_reaction().validate_positivity());

  ReactionSpec small_support = standard_reaction();
  small_support.h = RadialProfile::indicator(0.3, 1.0);  // support misses B_sigma
  CHECK_THROWS_AS(small_support.validate_positivity(), std::invalid_argument);

  ReactionSpec big_beta = standard_reaction();
  big_beta.beta = 10.0;
  CHECK_THROWS_AS(big_beta.validate_positivity(), std::invalid_argument);

  ReactionSpec bad_sigma = standard_reaction();
  bad_sigma.sigma = 1.0;
  CHECK_THROWS_AS(bad_sigma.validate_positivity(), std::invalid_argument);
}

TEST_CASE("reaction json round trip and schema rejection") {
  const ReactionSpec rs = standard_reaction();
  const ReactionSpec back = reaction_from_json(reaction_to_json(rs));
  CHECK(back.gamma == rs.gamma);
  CHECK(back.r_exp == rs.r_exp);
  CHECK(back.eta == rs.eta);
  CHECK(back.theta == rs.theta);
  CHECK(back.beta == rs.beta);
  CHECK(back.sigma == rs.sigma);
  CHECK(back.alpha == rs.alpha);
  CHECK(back.h(0.25) == rs.h(0.25));
  CHECK(back.weight_k(0.5) == rs.weight_k(0.5));

  auto j = reaction_to_json(rs);
  j["bogus"] = 1;
  CHECK_THROWS_AS(reaction_from_json(j), std::invalid_argument);

  auto missing = reaction_to_json(rs);
  missing.erase("h");
  CHECK_THROWS_AS(reaction_from_json(missing), std::invalid_argument);

  auto badform = reaction_to_json(rs);
  badform["g_form"] = "cubic";
  CHECK_THROWS_AS(reaction_from_json(badform), std::invalid_argument);
}
