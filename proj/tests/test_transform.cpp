#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "uniformizer/domains.hpp"
#include "uniformizer/error.hpp"
#include "uniformizer/transform.hpp"

using namespace uniformizer;

TEST_CASE("edge and vertex reweighting") {
  // b - x - y - z with lengths 1, 1, 7: d = 0, 1, 2, 9 (d-bar = 0.5, 1.5, 5.5).
  const auto s = fixtures::space({{"b", 0.0, true}, {"x", 1.0, false}, {"y", 1.0, false}, {"z", 1.0, false}},
                                 {{"b", "x", 1.0}, {"x", "y", 1.0}, {"y", "z", 7.0}});
  const auto t = transform(s, Dampening::power(2.0), 2.0);
  CHECK(t.edge_rep_dist[0] == doctest::Approx(0.5));
  CHECK(t.edge_length_phi(0) == 1.0);
  CHECK(t.edge_length_phi(1) == doctest::Approx(1.0 / (1.5 * 1.5)));
  CHECK(t.edge_length_phi(2) == doctest::Approx(7.0 / (5.5 * 5.5)));
  CHECK(t.vertex_measure_phi(s.index_of("b")) == 0.0);
  CHECK(t.vertex_measure_phi(s.index_of("x")) == 1.0);
  CHECK(t.vertex_measure_phi(s.index_of("z")) == doctest::Approx(std::pow(9.0, -4.0)));
  for (EdgeIndex e = 0; e < 3; ++e) {
    CHECK(t.measured.edge_mass[e] == doctest::Approx(s.measured().edge_mass[e] * std::pow(t.edge_factor[e], 2.0)));
  }
}

TEST_CASE("spec-sized examples") {
  // Length-1 edge with d-bar 4: ends at d = 3.5 and 4.5.
  const auto s = fixtures::space({{"b", 0.0, true}, {"u", 1.0, false}, {"v", 1.0, false}},
                                 {{"b", "u", 3.5}, {"u", "v", 1.0}});
  const auto t = transform(s, Dampening::power(2.0), 2.0);
  CHECK(t.edge_length_phi(1) == doctest::Approx(1.0 / 16.0));

  const auto s4 = fixtures::space({{"b", 0.0, true}, {"w", 1.0, false}}, {{"b", "w", 4.0}});
  CHECK(transform(s4, Dampening::power(2.0), 2.0).vertex_measure_phi(1) == doctest::Approx(1.0 / 256.0));
}

TEST_CASE("transformed distances never exceed base distances") {
  const auto dom = slit_cone(0.5, 16.0);
  const auto t = transform(dom.space, Dampening::power(2.0), 2.0);
  const auto d_omega = boundary_distance(dom.space);
  for (VertexIndex x : {0u, 17u, 311u}) {
    const auto d = distances_from(dom.space.graph(), x);
    const auto dphi = distances_from(t.measured.graph, x);
    for (VertexIndex v = 0; v < d.size(); ++v) CHECK(dphi[v] <= d[v] * (1.0 + 1e-14));
  }
  // Inside band 0 the metric is unchanged.
  for (EdgeIndex e = 0; e < dom.space.num_edges(); ++e) {
    if (t.edge_rep_dist[e] <= 1.0) CHECK(t.edge_length_phi(e) == dom.space.graph().length(e));
  }
}

TEST_CASE("attach infinity") {
  const auto dom = half_strip(0.25, 64.0);
  const auto t = attach_infinity(transform(dom.space, Dampening::power(2.0), 2.0));
  REQUIRE(t.has_infinity());
  const auto& inf = *t.infinity;
  CHECK(inf.vertex == dom.space.num_vertices());
  CHECK(inf.num_edges() == 9);
  for (std::size_t i = 0; i < inf.num_edges(); ++i) {
    CHECK(t.d_omega[inf.frontier[i]] == doctest::Approx(64.0));
    CHECK(t.edge_length_phi(static_cast<EdgeIndex>(inf.first_edge + i)) == doctest::Approx(1.0 / 64.0));
  }
  CHECK(t.vertex_measure_phi(inf.vertex) == 0.0);
  CHECK(inf.end_exponent == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(attach_infinity(t), PreconditionError);
}

TEST_CASE("attach infinity falls back to the outermost band") {
  const auto s = fixtures::path(6);
  const auto t = attach_infinity(transform(s, Dampening::power(2.0), 2.0));
  // Band 3 = (4, 8] holds v5, v6.
  CHECK(t.infinity->num_edges() == 2);
  CHECK(t.edge_length_phi(t.infinity->first_edge) == doctest::Approx(tail_integral(Dampening::power(2.0), 5.0)));

  const auto flat = fixtures::space({{"b", 0.0, true}, {"x", 1.0, false}}, {{"b", "x", 0.5}});
  CHECK_THROWS_WITH_AS(attach_infinity(transform(flat, Dampening::power(2.0), 2.0)),
                       doctest::Contains("degenerate truncation"), PreconditionError);
}

TEST_CASE("codimensional measure") {
  const auto dom = half_strip(0.25, 16.0);
  const auto& nu = dom.nu;
  const auto b = bands(dom.space);
  CHECK(nu.total() == doctest::Approx(b.measure(0)).epsilon(1e-12));
  // Interior-of-segment boundary vertices are isometric: equal weights.
  const auto a = dom.space.index_of("v-1_0"), c = dom.space.index_of("v1_0");
  CHECK(nu.nu[a] == doctest::Approx(nu.nu[c]).epsilon(1e-14));
  CHECK(nu.nu[dom.space.index_of("v-4_0")] == doctest::Approx(nu.nu[dom.space.index_of("v4_0")]).epsilon(1e-14));
  for (auto z : dom.space.boundary_vertices()) CHECK(nu.nu[z] > 0.0);
  for (auto v : dom.space.interior_vertices()) CHECK(nu.nu[v] == 0.0);
  // Weights scale like arc length: halving h halves the per-vertex weight.
  const auto fine = half_strip(0.125, 16.0);
  const double ratio = fine.nu.nu[fine.space.index_of("v0_0")] / nu.nu[dom.space.index_of("v0_0")];
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.05));
  CHECK_THROWS_AS(codimensional_measure(dom.space, 0.0, 0.25), DomainError);
}

TEST_CASE("codimensionality envelopes") {
  const auto dom = half_strip(0.25, 16.0);
  const double radii[] = {0.25, 0.5, 1.0};
  const auto rep = verify_codimensionality(dom.space, dom.nu, radii, 8.0);
  CHECK(rep.pass);
  CHECK(rep.spread <= 8.0);
  CHECK(rep.samples > 0);

  const auto wrong = codimensional_measure(dom.space, 0.2, 0.25);
  const double wide[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  const auto bad = verify_codimensionality(dom.space, wrong, wide, 8.0);
  const auto good = verify_codimensionality(dom.space, dom.nu, wide, 8.0);
  CHECK(good.pass);
  CHECK_FALSE(bad.pass);
  CHECK(bad.spread > good.spread);
}
