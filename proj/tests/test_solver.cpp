#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "uniformizer/domains.hpp"
#include "uniformizer/error.hpp"
#include "uniformizer/solver.hpp"

using namespace uniformizer;

namespace {

MeasuredGraph unit_path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({static_cast<VertexIndex>(i), static_cast<VertexIndex>(i + 1), 1.0});
  std::vector<char> boundary(n + 1, 0);
  boundary[0] = boundary[n] = 1;
  return oracle::make_graph(n + 1, edges, std::vector<double>(n, 1.0), boundary);
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

TEST_CASE("path with pinned ends is linear for every p") {
  const auto g = unit_path(4);
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    DirichletProblem prob{&g, p, {{0, 0.0}, {4, 1.0}}, {}};
    const auto r = solve_p_harmonic(prob);
    CHECK(r.converged);
    for (int i = 0; i <= 4; ++i) CHECK(r.u[i] == doctest::Approx(0.25 * i).epsilon(1e-9));
    CHECK(r.energy == doctest::Approx(std::pow(4.0, 1.0 - p)).epsilon(1e-9));
  }
}

TEST_CASE("p = 2 matches the dense oracle") {
  auto g = oracle::unit_grid(3, 3);
  for (VertexIndex v : {0u, 3u, 6u, 2u, 5u, 8u}) g.boundary[v] = 1;
  std::vector<Pin> pins{{0, 0.0}, {3, 0.0}, {6, 0.0}, {2, 1.0}, {5, 1.0}, {8, 1.0}};
  const auto r = solve_p_harmonic({&g, 2.0, pins, {}});
  const auto ref = oracle::dense_dirichlet(g, pins);
  CHECK(sup_diff(r.u, ref) <= 1e-10);

  // Irregular weights.
  auto w = oracle::unit_grid(6, 7);
  for (EdgeIndex e = 0; e < w.num_edges(); ++e) w.edge_mass[e] = 0.3 + 0.1 * (e % 7);
  std::vector<Pin> wp{{0, 1.0}, {41, -2.0}, {20, 0.5}};
  for (const auto& pin : wp) w.boundary[pin.vertex] = 1;
  const auto rw = solve_p_harmonic({&w, 2.0, wp, {}});
  CHECK(sup_diff(rw.u, oracle::dense_dirichlet(w, wp)) <= 1e-10);
}

TEST_CASE("p = 3 star matches brute force") {
  // Centre 0 with leaves 1, 2, 3 pinned (0, 0, 1) and leaf 4 free; irregular lengths and masses.
  const auto g = oracle::make_graph(5, {{0, 1, 1.0}, {0, 2, 0.5}, {0, 3, 2.0}, {0, 4, 1.5}}, {1.0, 0.7, 2.0, 1.3},
                                    {0, 1, 1, 1, 0});
  const std::vector<Pin> pins{{1, 0.0}, {2, 0.0}, {3, 1.0}};
  const auto r = solve_p_harmonic({&g, 3.0, pins, {}});
  const auto f = [&](double c, double w) {
    const double u[] = {c, 0.0, 0.0, 1.0, w};
    return oracle::energy(g, u, 3.0);
  };
  const auto [c, w] = oracle::minimize_2d(f, 0.0, 1.0);
  CHECK(std::abs(r.u[0] - c) <= 1e-6);
  // The free leaf's term is cubic-flat at its optimum w = c, so the scan only pins w to ~1e-5.
  CHECK(std::abs(r.u[4] - w) <= 1e-5);
  CHECK(std::abs(r.u[4] - r.u[0]) <= 1e-6);
  CHECK(r.energy <= f(c, w) * (1.0 + 1e-12));
}

TEST_CASE("maximum principle and monotone energy history") {
  const auto dom = half_strip(0.25, 8.0);
  const auto& g = dom.space.measured();
  std::vector<Pin> pins;
  for (auto b : dom.space.boundary_vertices()) pins.push_back({b, std::sin(3.0 * dom.space.coords(b)[0])});
  for (double p : {1.5, 3.0}) {
    const auto r = solve_p_harmonic({&g, p, pins, {}});
    CHECK(r.converged);
    double lo = 1e300, hi = -1e300;
    for (const auto& pin : pins) {
      lo = std::min(lo, pin.value);
      hi = std::max(hi, pin.value);
    }
    for (double x : r.u) {
      CHECK(x >= lo - 1e-12);
      CHECK(x <= hi + 1e-12);
    }
    REQUIRE(r.energy_history.size() == r.history_stage.size());
    for (std::size_t i = 1; i < r.energy_history.size(); ++i) {
      if (r.history_stage[i] == r.history_stage[i - 1]) {
        CHECK(r.energy_history[i] <= r.energy_history[i - 1] * (1.0 + 1e-14));
      }
    }
  }
}

TEST_CASE("solver errors and flags") {
  const auto g = unit_path(4);
  CHECK_THROWS_AS(solve_p_harmonic({&g, 2.0, {}, {}}), PreconditionError);
  CHECK_THROWS_AS(solve_p_harmonic({&g, 1.0, {{0, 0.0}, {4, 1.0}}, {}}), DomainError);
  // Boundary vertex 4 left unpinned.
  CHECK_THROWS_AS(solve_p_harmonic({&g, 2.0, {{0, 0.0}}, {}}), PreconditionError);
  SolverOptions loose;
  loose.require_boundary_pins = false;
  CHECK(solve_p_harmonic({&g, 2.0, {{0, 0.0}}, loose}).u[4] == doctest::Approx(0.0));

  // Free vertices cut off from every pin by a zero-mass edge.
  auto cut = unit_path(4);
  for (auto& m : cut.edge_mass) m = 0.0;
  const auto det = solve_p_harmonic({&cut, 2.0, {{0, 0.0}, {4, 1.0}}, {}});
  CHECK(std::isfinite(det.u[2]));
  // 2 x 3 grid pinned at 0; only the edge 0 - 1 keeps mass among edges touching 0 or 1,
  // so {2, 3, 4, 5} carries energy but never reaches a pin.
  auto island = oracle::unit_grid(2, 3);
  island.boundary[0] = 1;
  for (EdgeIndex e = 0; e < island.num_edges(); ++e) {
    const auto& ed = island.graph.edge(e);
    const bool touches = ed.u <= 1 || ed.v <= 1;
    const bool keep = (ed.u == 0 && ed.v == 1) || (ed.u == 1 && ed.v == 0);
    if (touches && !keep) island.edge_mass[e] = 0.0;
  }
  CHECK_THROWS_WITH_AS(solve_p_harmonic({&island, 3.0, {{0, 0.0}}, {}}), doctest::Contains("disconnected"),
                       PreconditionError);

  SolverOptions tight;
  tight.max_iter = 1;
  tight.eps0_scale = tight.eps_floor;
  const auto dom = half_strip(0.25, 8.0);
  std::vector<Pin> pins;
  for (auto b : dom.space.boundary_vertices()) pins.push_back({b, dom.space.coords(b)[0] > 0 ? 1.0 : 0.0});
  const auto r = solve_p_harmonic({&dom.space.measured(), 3.0, pins, tight});
  CHECK_FALSE(r.converged);
  CHECK(std::find(r.flags.begin(), r.flags.end(), "unconverged") != r.flags.end());
}

TEST_CASE("capacity") {
  for (int n : {1, 3, 8}) {
    const auto g = unit_path(n);
    const auto c = capacity(g, {{0}, {static_cast<VertexIndex>(n)}, {}}, 2.0);
    CHECK(c.value == doctest::Approx(1.0 / n).epsilon(1e-12));
    for (double x : c.potential) {
      CHECK(x >= -1e-15);
      CHECK(x <= 1.0 + 1e-15);
    }
  }
  // E and F in different components of U.
  const auto g = unit_path(4);
  std::vector<char> U{1, 1, 0, 1, 1};
  CHECK(capacity(g, {{0}, {4}, U}, 2.0).value == 0.0);

  // 2 x 3 grid, left column against right column.
  const auto grid = oracle::unit_grid(2, 3);
  const auto c = capacity(grid, {{0, 3}, {2, 5}, {}}, 2.0);
  const std::vector<Pin> pins{{0, 1.0}, {3, 1.0}, {2, 0.0}, {5, 0.0}};
  const auto ref = oracle::dense_dirichlet(grid, pins);
  CHECK(std::abs(c.value - oracle::energy(grid, ref, 2.0)) <= 1e-10);
  CHECK_THROWS_AS(capacity(grid, {{0}, {0}, {}}, 2.0), PreconditionError);
  CHECK_THROWS_AS(capacity(grid, {{}, {0}, {}}, 2.0), PreconditionError);
}

TEST_CASE("modulus") {
  const auto path = unit_path(5);
  const auto m = modulus(path, {{0}, {5}, {}}, 2.0);
  CHECK(m.value == doctest::Approx(0.2).epsilon(1e-6));
  for (double r : m.rho) CHECK(r == doctest::Approx(0.2).epsilon(1e-6));

  const auto sq = oracle::unit_grid(2, 2);
  const Condenser cond{{0}, {3}, {}};
  const double cap = capacity(sq, cond, 2.0).value;
  CHECK(std::abs(modulus(sq, cond, 2.0).value - cap) <= 1e-6 * cap);

  // Tiny graph with few paths: full program by brute force.
  auto g = oracle::unit_grid(2, 3);
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) g.edge_mass[e] = 0.5 + 0.25 * e;
  const Condenser tiny{{0}, {5}, {}};
  const auto paths = oracle::simple_paths(g, tiny);
  REQUIRE(paths.size() <= 8);
  for (double p : {1.5, 2.0, 3.0}) {
    const double brute = oracle::full_program_modulus(g, paths, p);
    const auto mod = modulus(g, tiny, p);
    CHECK(mod.converged);
    CHECK(std::abs(mod.value - brute) <= 1e-5 * brute);
    CHECK(mod.shortest >= 1.0 - 1e-6);
  }

  const auto split = oracle::unit_grid(2, 3);
  const auto none = modulus(split, {{0}, {5}, {1, 0, 0, 1, 0, 1}}, 2.0);
  CHECK(none.value == 0.0);
  CHECK(none.rho.empty());
}

TEST_CASE("capacity of infinity and unbounded solves") {
  const auto dom = half_strip(0.25, 16.0);
  const auto t = attach_infinity(transform(dom.space, Dampening::power(2.0), 2.0));
  CHECK_THROWS_WITH_AS(capacity_of_infinity(t, 0.1, 100.0), doctest::Contains("degenerate shells"), Error);
  const auto c = capacity_of_infinity(t, 0.1, 0.5);
  CHECK(c.value > 0.0);

  const ScalarField f(dom.space.num_vertices(), 0.7);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto s = solve_dirichlet_unbounded(dom.space, Dampening::power(2.0), p, f, std::nullopt);
    for (VertexIndex v = 0; v < dom.space.num_vertices(); ++v) CHECK(s.result.u[v] == doctest::Approx(0.7));
    CHECK(s.at_infinity == doctest::Approx(0.7));
  }
}
