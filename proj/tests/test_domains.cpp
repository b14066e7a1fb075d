#include <doctest.h>

#include <cmath>

#include "uniformizer/domains.hpp"
#include "uniformizer/error.hpp"

using namespace uniformizer;

TEST_CASE("half-strip lattice") {
  for (double h : {0.5, 0.25}) {
    const auto dom = half_strip(h, 8.0);
    const auto n = static_cast<std::size_t>((2.0 / h + 1.0) * (8.0 / h + 1.0));
    CHECK(dom.space.num_vertices() == n);
    CHECK(dom.space.boundary_vertices().size() == static_cast<std::size_t>(2.0 / h + 1.0));
    const auto d = boundary_distance(dom.space);
    for (VertexIndex v = 0; v < dom.space.num_vertices(); ++v) {
      CHECK(d[v] == doctest::Approx(dom.space.coords(v)[1]).epsilon(1e-12));
    }
  }
  CHECK(half_strip(0.25, 8.0).theta == 1.0);
}

TEST_CASE("slit cone wings") {
  const auto dom = slit_cone(0.5, 8.0);
  for (VertexIndex v = 0; v < dom.space.num_vertices(); ++v) {
    const auto c = dom.space.coords(v);
    CHECK(c[1] >= std::max(0.0, std::abs(c[0]) - 1.0) - 1e-12);
  }
  CHECK(dom.space.find("v4_2").has_value());
  CHECK_FALSE(dom.space.find("v5_2").has_value());
  CHECK(dom.space.boundary_vertices().size() == 5);
}

TEST_CASE("cantor slit") {
  const auto dom = cantor_slit(1.0 / 9.0, 8.0, 1);
  CHECK(dom.nu.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dom.theta == doctest::Approx(2.0 - std::log(2.0) / std::log(3.0)));
  // Level 1 on [-1, 1]: boundary over [-1, -1/3] and [1/3, 1] only.
  for (auto b : dom.space.boundary_vertices()) CHECK(std::abs(dom.space.coords(b)[0]) >= 1.0 / 3.0 - 1e-12);
  CHECK(dom.space.boundary_vertices().size() == 14);
  CHECK_FALSE(dom.space.is_boundary(dom.space.index_of("v0_0")));
  CHECK_THROWS_AS(cantor_slit(0.25, 8.0, 2), PreconditionError);
  CHECK_THROWS_AS(cantor_slit(0.25, 8.0, 0), PreconditionError);
}

TEST_CASE("plane minus cantor square") {
  const auto dom = plane_minus_cantor_square(1.0 / 9.0, 8.0, 1);
  CHECK(dom.space.boundary_vertices().size() == 64);
  CHECK(dom.nu.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dom.theta == doctest::Approx(2.0 - 2.0 * std::log(2.0) / std::log(3.0)));
  const auto coarse = plane_minus_cantor_square(1.0 / 3.0, 8.0, 1);
  CHECK(coarse.space.boundary_vertices().size() == 16);
}

TEST_CASE("generation is deterministic") {
  const GeneratorSpec spec{DomainKind::cantor_slit, 1.0 / 9.0, 8.0, 2};
  const auto a = generate(spec), b = generate(spec);
  REQUIRE(a.space.num_vertices() == b.space.num_vertices());
  REQUIRE(a.space.num_edges() == b.space.num_edges());
  for (VertexIndex v = 0; v < a.space.num_vertices(); ++v) {
    CHECK(a.space.id(v) == b.space.id(v));
    CHECK(a.nu.nu[v] == b.nu.nu[v]);
  }
  CHECK(parse_domain_kind("slit_cone") == DomainKind::slit_cone);
  CHECK_THROWS_AS(parse_domain_kind("disc"), DomainError);
}

TEST_CASE("generator preconditions") {
  CHECK_THROWS_AS(half_strip(0.3, 8.0), PreconditionError);
  CHECK_THROWS_AS(half_strip(0.25, 12.0), PreconditionError);
  CHECK_THROWS_AS(half_strip(0.25, 4.0), PreconditionError);
  CHECK_THROWS_AS(slit_cone(0.0, 8.0), PreconditionError);
}
