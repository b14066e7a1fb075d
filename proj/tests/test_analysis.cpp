#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uniformizer/analysis.hpp"
#include "uniformizer/domains.hpp"
#include "uniformizer/error.hpp"

using namespace uniformizer;

TEST_CASE("q_beta formula") {
  auto q = q_beta(2.0, 2.0, 1.0, 1.0);
  CHECK(q.minus == doctest::Approx(3.0));
  CHECK(q.plus == doctest::Approx(3.0));
  q = q_beta(2.0, 2.0, 2.0, 2.0);
  CHECK(q.minus == doctest::Approx(2.0));
  CHECK(q.plus == doctest::Approx(2.0));
  q = q_beta(2.0, 3.0, 2.0, 1.0);
  CHECK(q.minus == doctest::Approx(2.5));
  CHECK(q.plus == doctest::Approx(2.0));
  CHECK_THROWS_WITH_AS(q_beta(1.0, 2.0, 2.0, 2.0), doctest::Contains("beta * p > Q_minus"), PreconditionError);

  // p > Q_beta^- iff p < Q_mu^+, over a grid of admissible tuples.
  for (double p : {1.1, 1.5, 2.0, 2.5, 3.0})
    for (double beta : {1.5, 2.0, 3.0})
      for (double Qp : {0.8, 1.0, 1.7, 2.0})
        for (double Qm : {Qp, Qp + 0.3}) {
          if (beta * p <= Qm || std::abs(p - Qp) < 1e-12) continue;
          const auto r = q_beta(p, beta, Qm, Qp);
          CHECK((p > r.minus) == (p < Qp));
        }
}

TEST_CASE("sampling and radii") {
  std::vector<VertexIndex> pool{5, 1, 9, 3, 7, 2};
  const auto a = sample_vertices(pool, 3, 42), b = sample_vertices(pool, 3, 42);
  CHECK(a == b);
  CHECK(a.size() == 3);
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(sample_vertices(pool, 10).size() == 6);
  const auto r = dyadic_radii(0.25, 2.0);
  CHECK(r == std::vector<double>{2.0, 1.0, 0.5, 0.25});
}

TEST_CASE("doubling on a grid") {
  const auto g = oracle::unit_grid(41, 41);
  const VertexIndex centre[] = {20 * 41 + 20};
  const double radii[] = {4.0, 8.0};
  const auto rep = doubling_constant(g, centre, radii, 16.0);
  CHECK(rep.pass);
  CHECK(rep.max_ratio >= 1.0);
  // l1 balls: |B(r)| = 2r^2 + 2r + 1 vertices at integer r (open ball uses r - 1); worst at r = 4.
  CHECK(rep.max_ratio == doctest::Approx((2.0 * 7 * 7 + 2 * 7 + 1) / (2.0 * 3 * 3 + 2 * 3 + 1)));
  CHECK(rep.max_ratio <= 4.0 * 1.25);
}

TEST_CASE("mass exponents") {
  SUBCASE("2-D bulk") {
    const auto g = oracle::unit_grid(81, 81);
    const VertexIndex centre[] = {40 * 81 + 40};
    const double radii[] = {4.0, 8.0, 16.0, 32.0};
    const auto fit = mass_exponents(g, centre, radii);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fit.Q_plus <= fit.Q_minus);
    CHECK(fit.slope_max == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fit.slope_min == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("half-strip at large scales") {
    const auto dom = half_strip(0.25, 64.0);
    const VertexIndex centre[] = {dom.space.index_of("v0_128")};
    const double radii[] = {4.0, 8.0, 16.0};
    const auto fit = mass_exponents(dom.space.measured(), centre, radii);
    CHECK(fit.slope_max == doctest::Approx(1.0).epsilon(0.2));
    CHECK(fit.slope_min == doctest::Approx(1.0).epsilon(0.2));
  }
  SUBCASE("slit cone at large scales") {
    const auto dom = slit_cone(0.5, 64.0);
    const VertexIndex centre[] = {dom.space.index_of("v0_2")};
    const double radii[] = {8.0, 16.0, 32.0};
    const auto fit = mass_exponents(dom.space.measured(), centre, radii);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.1));
  }
  const auto g = oracle::unit_grid(5, 5);
  const VertexIndex c[] = {12};
  const double two[] = {1.0, 2.0};
  CHECK_THROWS_AS(mass_exponents(g, c, two), PreconditionError);
}

TEST_CASE("distance to infinity") {
  const auto dom = half_strip(0.25, 64.0);
  const auto t = attach_infinity(transform(dom.space, Dampening::power(2.0), 2.0));
  const auto rep = dist_infinity_check(t);
  CHECK(rep.kappa >= 1.0);
  CHECK(rep.kappa <= 4.0);
  // Outermost band: d_phi(v, inf) = 1/64 for frontier vertices and 2^m phi(2^m) = 1/64.
  REQUIRE(!rep.bands.empty());
  CHECK(rep.bands.back().band == 6);
  CHECK(rep.bands.back().min_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(boundary_to_infinity(t) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("uniformity witness") {
  const auto dom = half_strip(0.25, 16.0);
  const auto& g = dom.space.measured();
  const auto d = boundary_distance(dom.space);
  const std::pair<VertexIndex, VertexIndex> straight[] = {
      {dom.space.index_of("v0_20"), dom.space.index_of("v0_40")}};
  const auto rep = uniformity_spot_check(g, d, straight);
  CHECK(rep.max_length_ratio == doctest::Approx(1.0));

  const auto cone = slit_cone(0.5, 16.0);
  const auto dc = boundary_distance(cone.space);
  const std::pair<VertexIndex, VertexIndex> tip[] = {
      {cone.space.index_of("v-3_1"), cone.space.index_of("v3_1")}};
  const auto r = uniformity_spot_check(cone.space.measured(), dc, tip);
  CHECK(std::isfinite(r.max_cigar_ratio));
  CHECK(r.constant >= 1.0);
}

TEST_CASE("classification of the two model ends") {
  const auto strip = half_strip(0.25, 128.0);
  const auto t = attach_infinity(transform(strip.space, Dampening::power(2.0), 2.0));
  const auto c = classify_parabolicity(t);
  CHECK(c.verdict == Verdict::parabolic);
  CHECK(c.predicted == Verdict::parabolic);
  CHECK(c.radii.size() >= 4);

  const auto cone = slit_cone(0.5, 64.0);
  const auto tc = attach_infinity(transform(cone.space, Dampening::power(2.0), 1.5));
  const auto h = classify_parabolicity(tc);
  CHECK(h.verdict == Verdict::hyperbolic);
  CHECK(h.predicted == Verdict::hyperbolic);
  CHECK_THROWS_AS(classify_parabolicity(transform(cone.space, Dampening::power(2.0), 1.5)), PreconditionError);
}

TEST_CASE("boundary fatness on a straight segment") {
  const auto dom = half_strip(0.125, 8.0);
  const auto t = transform(dom.space, Dampening::power(2.0), 2.0);
  const VertexIndex centres[] = {dom.space.index_of("v0_0"), dom.space.index_of("v-4_0")};
  const double radii[] = {0.125, 0.25, 0.5};
  const auto rep = boundary_fatness(t, dom.nu, centres, radii);
  CHECK(rep.unresolved == 2);
  CHECK(rep.min_ratio > 0.0);
  CHECK(rep.pass);
  CHECK(rep.floor == doctest::Approx(rep.max_ratio / 16.0));
}
