#pragma once

#include <optional>
#include <vector>

#include "uniformizer/dampening.hpp"
#include "uniformizer/graph_space.hpp"

namespace uniformizer {

struct InfinityAttachment {
  VertexIndex vertex = kNoVertex;
  /// Frontier vertex of each infinity edge, in edge order.
  std::vector<VertexIndex> frontier;
  /// Index of the first infinity edge in the transformed graph.
  EdgeIndex first_edge = 0;
  /// Growth exponent of the end inferred from the last two bands.
  double end_exponent = 0.0;

  std::size_t num_edges() const noexcept { return frontier.size(); }
};

/// (Omega_phi, d_phi, mu_phi) over a base GraphSpace.
///
/// Base edges keep their indices. When infinity is attached it becomes vertex
/// `base.num_vertices()` and its edges are appended after the base edges.
struct TransformedSpace {
  const GraphSpace* base = nullptr;
  double p = 2.0;
  Dampening phi = Dampening::power(2.0);
  std::vector<double> d_omega;
  /// d-bar_e = (d_Omega(u) + d_Omega(v)) / 2 per base edge.
  std::vector<double> edge_rep_dist;
  /// phi(d-bar_e) per base edge.
  std::vector<double> edge_factor;
  MeasuredGraph measured;
  std::optional<InfinityAttachment> infinity;

  std::size_t num_base_vertices() const { return base->num_vertices(); }
  std::size_t num_base_edges() const { return base->num_edges(); }
  double edge_length_phi(EdgeIndex e) const { return measured.graph.length(e); }
  double vertex_measure_phi(VertexIndex v) const { return measured.vertex_measure[v]; }
  bool has_infinity() const noexcept { return infinity.has_value(); }
  VertexIndex infinity_vertex() const;
  /// True for vertices of the base space (false for infinity).
  bool is_base_vertex(VertexIndex v) const { return v < base->num_vertices(); }
};

/// Reweights lengths by phi(d-bar_e), edge masses by phi(d-bar_e)^p and
/// vertex measures by phi(d_Omega)^p.
TransformedSpace transform(const GraphSpace& space, const Dampening& phi, double p);

/// Adds infinity joined to each frontier vertex v by an edge of length
/// tail_integral(phi, d_Omega(v)). Without marked frontier vertices the
/// outermost band is used. The edge mass models the conductance of the
/// radial continuation of the end beyond the truncation; mu_phi(infinity) = 0.
TransformedSpace attach_infinity(TransformedSpace t);

/// Boundary measure nu, stored per vertex (zero off the boundary).
struct BoundaryMeasure {
  double theta = 1.0;
  std::vector<double> nu;
  double mesh_scale = 1.0;

  double total() const;
};

/// Closed ball { v : d(center, v) <= r } in the graph metric.
std::vector<VertexIndex> closed_ball(const WeightedGraph& graph, VertexIndex center, double r);

/// nu(z) = mu(B[z, h] cap interior) / h^theta over closed h-balls, rescaled so that
/// the total equals mu(band 0).
BoundaryMeasure codimensional_measure(const GraphSpace& space, double theta, double h);

struct CodimensionalityReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;
  double bound = 16.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  bool pass = false;
};

/// Envelope of nu(B cap boundary) r^theta / mu(B cap interior) over boundary
/// centers and radii (closed balls in the base metric).
CodimensionalityReport verify_codimensionality(const GraphSpace& space, const BoundaryMeasure& nu,
                                               std::span<const double> radii, double bound = 16.0,
                                               std::span<const VertexIndex> centers = {});

}  // namespace uniformizer
