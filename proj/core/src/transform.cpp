#include "uniformizer/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uniformizer/error.hpp"
#include "uniformizer/parallel.hpp"

namespace uniformizer {
namespace {

// phi is identically 1 on (0, 1]; this keeps boundary edges (d-bar = 0) defined.
double phi_at(const Dampening& phi, double t) { return t <= 1.0 ? 1.0 : phi(t); }

}  // namespace

VertexIndex TransformedSpace::infinity_vertex() const {
  if (!infinity) throw PreconditionError("infinity is not attached");
  return infinity->vertex;
}

TransformedSpace transform(const GraphSpace& space, const Dampening& phi, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  TransformedSpace t;
  t.base = &space;
  t.p = p;
  t.phi = phi;
  t.d_omega = boundary_distance(space);

  const auto& base = space.measured();
  const std::size_t m = base.num_edges();
  t.edge_rep_dist.resize(m);
  t.edge_factor.resize(m);
  std::vector<Edge> edges(base.graph.edges().begin(), base.graph.edges().end());
  std::vector<double> mass(m);
  parallel_for(m, [&](std::size_t e) {
    const double dbar = 0.5 * (t.d_omega[edges[e].u] + t.d_omega[edges[e].v]);
    const double f = phi_at(phi, dbar);
    t.edge_rep_dist[e] = dbar;
    t.edge_factor[e] = f;
    edges[e].length *= f;
    mass[e] = base.edge_mass[e] * std::pow(f, p);
  });

  const std::size_t n = base.num_vertices();
  std::vector<double> measure(n);
  for (VertexIndex v = 0; v < n; ++v) {
    measure[v] = base.boundary[v] ? 0.0 : base.vertex_measure[v] * std::pow(phi_at(phi, t.d_omega[v]), p);
  }
  std::vector<std::uint32_t> rank(n);
  for (VertexIndex v = 0; v < n; ++v) rank[v] = base.graph.tie_rank(v);

  t.measured.graph = WeightedGraph(n, std::move(edges), std::move(rank));
  t.measured.vertex_measure = std::move(measure);
  t.measured.edge_mass = std::move(mass);
  t.measured.boundary = base.boundary;
  return t;
}

TransformedSpace attach_infinity(TransformedSpace t) {
  if (t.infinity) throw PreconditionError("infinity is already attached");
  const GraphSpace& space = *t.base;
  const std::size_t n = space.num_vertices();

  std::vector<VertexIndex> frontier;
  if (space.has_frontier()) {
    for (VertexIndex v = 0; v < n; ++v) {
      if (space.is_frontier(v) && !space.is_boundary(v)) frontier.push_back(v);
    }
  } else {
    const auto b = bands(space, t.d_omega);
    const int top = b.max_band();
    for (VertexIndex v = 0; v < n; ++v) {
      if (top >= 1 && b.band_of[v] == top) frontier.push_back(v);
    }
  }
  if (frontier.empty()) throw PreconditionError("degenerate truncation: outermost band is empty");

  const auto b = bands(space, t.d_omega);
  const int top = b.max_band();
  double q_end = 0.0;
  if (top >= 2 && b.measure(top) > 0.0 && b.measure(top - 1) > 0.0) {
    q_end = std::log2(b.measure(top) / b.measure(top - 1));
  }
  const double k = q_end - 1.0;
  const double p = t.p;

  const auto& g = t.measured.graph;
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  const VertexIndex inf = static_cast<VertexIndex>(n);
  const EdgeIndex first = static_cast<EdgeIndex>(edges.size());
  for (const VertexIndex v : frontier) {
    const double d = t.d_omega[v];
    const double len = tail_integral(t.phi, d);
    double spacing = kInfinity;
    for (const auto& inc : space.graph().neighbors(v)) spacing = std::min(spacing, space.graph().length(inc.edge));
    const double section = space.measure(v) / spacing;
    double cond = 0.0;
    if (k > p - 1.0) cond = section * std::pow(d, 1.0 - p) * std::pow(k / (p - 1.0) - 1.0, p - 1.0);
    edges.push_back({v, inf, len});
    t.measured.edge_mass.push_back(cond * std::pow(len, p));
  }
  std::vector<std::uint32_t> rank(n + 1);
  for (VertexIndex v = 0; v < n; ++v) rank[v] = g.tie_rank(v);
  rank[n] = static_cast<std::uint32_t>(n);

  t.measured.graph = WeightedGraph(n + 1, std::move(edges), std::move(rank));
  t.measured.vertex_measure.push_back(0.0);
  t.measured.boundary.push_back(0);
  t.infinity = InfinityAttachment{inf, std::move(frontier), first, q_end};
  return t;
}

double BoundaryMeasure::total() const { return std::accumulate(nu.begin(), nu.end(), 0.0); }

std::vector<VertexIndex> closed_ball(const WeightedGraph& graph, VertexIndex center, double r) {
  if (r < 0.0) throw DomainError("ball radius must be non-negative");
  const double reach = r + 1e-12 * std::max(r, 1.0);
  const auto dist = distances_from(graph, center, reach);
  std::vector<VertexIndex> ball;
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    if (dist[v] <= reach) ball.push_back(v);
  }
  return ball;
}

BoundaryMeasure codimensional_measure(const GraphSpace& space, double theta, double h) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  if (!(h > 0.0)) throw DomainError("mesh scale must be positive");
  BoundaryMeasure out;
  out.theta = theta;
  out.mesh_scale = h;
  out.nu.assign(space.num_vertices(), 0.0);
  const auto boundary = space.boundary_vertices();
  parallel_for(boundary.size(), [&](std::size_t i) {
    const VertexIndex z = boundary[i];
    double mass = 0.0;
    for (const VertexIndex v : closed_ball(space.graph(), z, h)) mass += space.measure(v);
    out.nu[z] = mass / std::pow(h, theta);
  });
  for (const VertexIndex z : boundary) {
    if (!(out.nu[z] > 0.0)) {
      throw PreconditionError("boundary vertex '" + space.id(z) + "' has no interior mass within the mesh scale");
    }
  }
  const auto d = boundary_distance(space);
  double band0 = 0.0;
  for (const VertexIndex v : space.interior_vertices()) {
    if (band_index(d[v]) == 0) band0 += space.measure(v);
  }
  const double scale = band0 / out.total();
  for (const VertexIndex z : boundary) out.nu[z] *= scale;
  return out;
}

CodimensionalityReport verify_codimensionality(const GraphSpace& space, const BoundaryMeasure& nu,
                                               std::span<const double> radii, double bound,
                                               std::span<const VertexIndex> centers) {
  if (centers.empty()) centers = space.boundary_vertices();
  CodimensionalityReport rep;
  rep.bound = bound;
  const std::size_t jobs = centers.size() * radii.size();
  std::vector<double> ratio(jobs, -1.0);
  parallel_for(jobs, [&](std::size_t job) {
    const VertexIndex z = centers[job / radii.size()];
    const double r = radii[job % radii.size()];
    double boundary_mass = 0.0, interior_mass = 0.0;
    for (const VertexIndex v : closed_ball(space.graph(), z, r)) {
      if (space.is_boundary(v)) {
        boundary_mass += nu.nu[v];
      } else {
        interior_mass += space.measure(v);
      }
    }
    if (interior_mass > 0.0) ratio[job] = boundary_mass * std::pow(r, nu.theta) / interior_mass;
  });
  rep.min_ratio = kInfinity;
  for (const double x : ratio) {
    if (x < 0.0) {
      ++rep.skipped;
      continue;
    }
    ++rep.samples;
    rep.min_ratio = std::min(rep.min_ratio, x);
    rep.max_ratio = std::max(rep.max_ratio, x);
  }
  rep.spread = rep.samples > 0 && rep.min_ratio > 0.0 ? rep.max_ratio / rep.min_ratio : kInfinity;
  rep.pass = rep.samples > 0 && rep.spread <= bound;
  return rep;
}

}  // namespace uniformizer
