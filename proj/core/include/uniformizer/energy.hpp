#pragma once

#include <span>
#include <string>
#include <vector>

#include "uniformizer/graph_space.hpp"
#include "uniformizer/transform.hpp"

namespace uniformizer {

/// Vertex-indexed values over a graph (including infinity when attached).
using ScalarField = std::vector<double>;

/// g(e) = |u(x) - u(y)| / len(e).
std::vector<double> upper_gradient(const MeasuredGraph& g, std::span<const double> u);

const std::vector<double>& edge_mass(const GraphSpace& space);

/// sum_e m(e) g(e)^p.
double p_energy(const MeasuredGraph& g, std::span<const double> u, double p);

/// Energy restricted to edges with both endpoints marked in `inside`.
double p_energy_within(const MeasuredGraph& g, std::span<const double> u, double p,
                       std::span<const char> inside);

struct PoincareReport {
  double max_ratio = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

/// mean_B |u - u_B| / (r (mean_{lambda B} g^p)^{1/p}) over open balls in the graph metric.
PoincareReport poincare_check(const MeasuredGraph& g, std::span<const VertexIndex> centers,
                              std::span<const double> radii, double lambda,
                              std::span<const ScalarField> fields, double p);

/// sum |u - c_u|^p mu_phi / sum m g_d^p, c_u the mu_phi-weighted mean on base vertices.
double hardy_check(const TransformedSpace& t, std::span<const double> u);

struct RieszResult {
  ScalarField value;
  std::size_t skipped_terms = 0;
};

/// I(x) = sum_{y in D, y != x} u(y) d(x,y) mu(y) / mu(B(x, d(x,y)) cap D) for x in D.
RieszResult riesz_potential(const MeasuredGraph& g, std::span<const double> u,
                            std::span<const VertexIndex> domain);

/// Besov seminorm (p-th root of the double sum) over the support of nu, with
/// distances in `metric` and open nu-balls in the denominator.
double besov_norm(const WeightedGraph& metric, const BoundaryMeasure& nu, std::span<const double> f,
                  double alpha, double p);

struct TraceResult {
  /// Trace value at each boundary vertex (0 elsewhere).
  ScalarField value;
  /// max - min of ball means across the radius list, per boundary vertex.
  ScalarField oscillation;
  std::vector<VertexIndex> unresolved;
};

/// Tu(z) = mu-weighted mean of u over B(z, r_min) cap interior; radii in decreasing order.
TraceResult trace(const MeasuredGraph& g, std::span<const double> u, const BoundaryMeasure& nu,
                  std::span<const double> radii);

/// Mean of |Tu - f| weighted by nu over resolved boundary vertices.
double trace_error(const TraceResult& tr, const BoundaryMeasure& nu, std::span<const double> f);

struct Ball {
  VertexIndex center;
  double radius;
};

struct AdamsReport {
  double max_ratio = 0.0;
  std::size_t violations = 0;
  std::vector<double> ratios;
};

/// Per ball: (sum_B |u - c|^q nu)^{1/q} against
/// r^{1 - theta/q} / mu_phi(B)^{1/p - 1/q} (sum_{2B} m_phi g_phi^p)^{1/p},
/// with c the nu-weighted median on B. Balls use d_phi.
AdamsReport adams_check(const TransformedSpace& t, const BoundaryMeasure& nu, std::span<const double> u,
                        double q, double theta, std::span<const Ball> balls);

/// Exponent q from theta = -Q q / p + Q + q / p_tilde.
double adams_exponent(double p, double p_tilde, double q_minus, double theta);

}  // namespace uniformizer
