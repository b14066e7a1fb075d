#include "uniformizer/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uniformizer/error.hpp"
#include "uniformizer/parallel.hpp"

namespace uniformizer {

std::vector<double> upper_gradient(const MeasuredGraph& g, std::span<const double> u) {
  if (u.size() != g.num_vertices()) throw PreconditionError("field size does not match vertex count");
  std::vector<double> grad(g.num_edges());
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.graph.edge(e);
    grad[e] = std::abs(u[ed.u] - u[ed.v]) / ed.length;
  }
  return grad;
}

const std::vector<double>& edge_mass(const GraphSpace& space) { return space.measured().edge_mass; }

double p_energy(const MeasuredGraph& g, std::span<const double> u, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  if (u.size() != g.num_vertices()) throw PreconditionError("field size does not match vertex count");
  double total = 0.0;
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const double m = g.edge_mass[e];
    if (m == 0.0) continue;
    const auto& ed = g.graph.edge(e);
    total += m * std::pow(std::abs(u[ed.u] - u[ed.v]) / ed.length, p);
  }
  return total;
}

double p_energy_within(const MeasuredGraph& g, std::span<const double> u, double p,
                       std::span<const char> inside) {
  double total = 0.0;
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.graph.edge(e);
    if (!inside[ed.u] || !inside[ed.v] || g.edge_mass[e] == 0.0) continue;
    total += g.edge_mass[e] * std::pow(std::abs(u[ed.u] - u[ed.v]) / ed.length, p);
  }
  return total;
}

PoincareReport poincare_check(const MeasuredGraph& g, std::span<const VertexIndex> centers,
                              std::span<const double> radii, double lambda,
                              std::span<const ScalarField> fields, double p) {
  if (!(lambda >= 1.0)) throw DomainError("lambda must be >= 1");
  const std::size_t jobs = centers.size() * radii.size();
  std::vector<double> best(jobs, -1.0);
  parallel_for(jobs, [&](std::size_t job) {
    const VertexIndex x = centers[job / radii.size()];
    const double r = radii[job % radii.size()];
    const auto dist = distances_from(g.graph, x, lambda * r);
    double mass_small = 0.0, mass_big = 0.0;
    std::vector<char> big(g.num_vertices(), 0);
    std::vector<VertexIndex> small;
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (dist[v] < lambda * r) {
        big[v] = 1;
        mass_big += g.vertex_measure[v];
      }
      if (dist[v] < r) {
        small.push_back(v);
        mass_small += g.vertex_measure[v];
      }
    }
    if (!(mass_small > 0.0) || !(mass_big > 0.0)) return;
    double worst = 0.0;
    for (const auto& u : fields) {
      double mean = 0.0;
      for (const VertexIndex v : small) mean += u[v] * g.vertex_measure[v];
      mean /= mass_small;
      double osc = 0.0;
      for (const VertexIndex v : small) osc += std::abs(u[v] - mean) * g.vertex_measure[v];
      osc /= mass_small;
      const double grad = std::pow(p_energy_within(g, u, p, big) / mass_big, 1.0 / p);
      if (osc == 0.0) continue;
      worst = std::max(worst, grad > 0.0 ? osc / (r * grad) : kInfinity);
    }
    best[job] = worst;
  });
  PoincareReport rep;
  for (const double b : best) {
    if (b < 0.0) {
      ++rep.skipped;
    } else {
      ++rep.samples;
      rep.max_ratio = std::max(rep.max_ratio, b);
    }
  }
  return rep;
}

double hardy_check(const TransformedSpace& t, std::span<const double> u) {
  const std::size_t n = t.num_base_vertices();
  double mass = 0.0, mean = 0.0;
  for (VertexIndex v = 0; v < n; ++v) {
    mass += t.measured.vertex_measure[v];
    mean += t.measured.vertex_measure[v] * u[v];
  }
  mean /= mass;
  double lhs = 0.0;
  for (VertexIndex v = 0; v < n; ++v) lhs += std::pow(std::abs(u[v] - mean), t.p) * t.measured.vertex_measure[v];
  const double rhs = p_energy(t.base->measured(), u.first(n), t.p);
  if (rhs == 0.0) {
    if (lhs <= 1e-300) return 0.0;
    throw PreconditionError("Hardy check: zero energy with non-zero oscillation");
  }
  return lhs / rhs;
}

RieszResult riesz_potential(const MeasuredGraph& g, std::span<const double> u,
                            std::span<const VertexIndex> domain) {
  if (domain.empty()) throw PreconditionError("Riesz potential needs a non-empty domain");
  for (const VertexIndex y : domain) {
    if (u[y] < 0.0) throw PreconditionError("Riesz potential needs a non-negative field");
  }
  RieszResult out;
  out.value.assign(g.num_vertices(), 0.0);
  std::vector<std::size_t> skipped(domain.size(), 0);
  parallel_for(domain.size(), [&](std::size_t i) {
    const VertexIndex x = domain[i];
    const auto dist = distances_from(g.graph, x);
    std::vector<VertexIndex> order(domain.begin(), domain.end());
    std::sort(order.begin(), order.end(), [&](VertexIndex a, VertexIndex b) { return dist[a] < dist[b]; });
    // Open-ball masses by sweeping distances in increasing order.
    double total = 0.0, below = 0.0;
    for (std::size_t k = 0; k < order.size();) {
      std::size_t j = k;
      double level = 0.0;
      while (j < order.size() && dist[order[j]] == dist[order[k]]) level += g.vertex_measure[order[j++]];
      for (std::size_t s = k; s < j; ++s) {
        const VertexIndex y = order[s];
        if (y == x || u[y] == 0.0) continue;
        if (!(below > 0.0)) {
          ++skipped[i];
          continue;
        }
        total += u[y] * dist[y] * g.vertex_measure[y] / below;
      }
      below += level;
      k = j;
    }
    out.value[x] = total;
  });
  out.skipped_terms = std::accumulate(skipped.begin(), skipped.end(), std::size_t{0});
  return out;
}

double besov_norm(const WeightedGraph& metric, const BoundaryMeasure& nu, std::span<const double> f,
                  double alpha, double p) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("Besov smoothness must lie in (0, 1)");
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  std::vector<VertexIndex> support;
  for (VertexIndex v = 0; v < nu.nu.size(); ++v) {
    if (nu.nu[v] > 0.0) support.push_back(v);
  }
  std::vector<double> row(support.size(), 0.0);
  parallel_for(support.size(), [&](std::size_t i) {
    const VertexIndex x = support[i];
    const auto dist = distances_from(metric, x);
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[support[a]] < dist[support[b]];
    });
    double sum = 0.0, below = 0.0;
    for (std::size_t k = 0; k < order.size();) {
      std::size_t j = k;
      double level = 0.0;
      const double d = dist[support[order[k]]];
      while (j < order.size() && dist[support[order[j]]] == d) level += nu.nu[support[order[j++]]];
      if (d > 0.0) {
        for (std::size_t s = k; s < j; ++s) {
          const VertexIndex y = support[order[s]];
          const double diff = std::abs(f[y] - f[x]);
          if (diff == 0.0) continue;
          sum += std::pow(diff, p) / (std::pow(d, alpha * p) * below) * nu.nu[y];
        }
      }
      below += level;
      k = j;
    }
    row[i] = sum * nu.nu[x];
  });
  return std::pow(std::accumulate(row.begin(), row.end(), 0.0), 1.0 / p);
}

TraceResult trace(const MeasuredGraph& g, std::span<const double> u, const BoundaryMeasure& nu,
                  std::span<const double> radii) {
  if (radii.empty()) throw PreconditionError("trace needs at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw PreconditionError("trace radii must decrease");
  }
  std::vector<VertexIndex> boundary;
  for (VertexIndex v = 0; v < nu.nu.size(); ++v) {
    if (nu.nu[v] > 0.0) boundary.push_back(v);
  }
  TraceResult out;
  out.value.assign(g.num_vertices(), 0.0);
  out.oscillation.assign(g.num_vertices(), 0.0);
  std::vector<char> bad(boundary.size(), 0);
  parallel_for(boundary.size(), [&](std::size_t i) {
    const VertexIndex z = boundary[i];
    const auto dist = distances_from(g.graph, z, radii.front());
    double lo = kInfinity, hi = -kInfinity, last = 0.0;
    for (const double r : radii) {
      double mass = 0.0, sum = 0.0;
      for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (dist[v] < r && !g.is_boundary(v)) {
          mass += g.vertex_measure[v];
          sum += g.vertex_measure[v] * u[v];
        }
      }
      if (!(mass > 0.0)) {
        bad[i] = 1;
        return;
      }
      last = sum / mass;
      lo = std::min(lo, last);
      hi = std::max(hi, last);
    }
    out.value[z] = last;
    out.oscillation[z] = hi - lo;
  });
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    if (bad[i]) out.unresolved.push_back(boundary[i]);
  }
  return out;
}

double trace_error(const TraceResult& tr, const BoundaryMeasure& nu, std::span<const double> f) {
  std::vector<char> bad(nu.nu.size(), 0);
  for (const VertexIndex z : tr.unresolved) bad[z] = 1;
  double mass = 0.0, err = 0.0;
  for (VertexIndex z = 0; z < nu.nu.size(); ++z) {
    if (nu.nu[z] > 0.0 && !bad[z]) {
      mass += nu.nu[z];
      err += nu.nu[z] * std::abs(tr.value[z] - f[z]);
    }
  }
  return mass > 0.0 ? err / mass : 0.0;
}

namespace {

double weighted_median(std::vector<std::pair<double, double>> items) {
  std::sort(items.begin(), items.end());
  double total = 0.0;
  for (const auto& it : items) total += it.second;
  double acc = 0.0;
  for (const auto& it : items) {
    acc += it.second;
    if (acc >= 0.5 * total) return it.first;
  }
  return items.back().first;
}

}  // namespace

AdamsReport adams_check(const TransformedSpace& t, const BoundaryMeasure& nu, std::span<const double> u,
                        double q, double theta, std::span<const Ball> balls) {
  if (!(q > t.p)) throw PreconditionError("Adams check needs q > p");
  const auto& g = t.measured;
  AdamsReport rep;
  rep.ratios.assign(balls.size(), 0.0);
  std::vector<char> violated(balls.size(), 0);
  parallel_for(balls.size(), [&](std::size_t i) {
    const auto [center, r] = balls[i];
    const auto dist = distances_from(g.graph, center, 2.0 * r);
    std::vector<std::pair<double, double>> on_boundary;
    double mass = 0.0;
    std::vector<char> twice(g.num_vertices(), 0);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (dist[v] < 2.0 * r) twice[v] = 1;
      if (dist[v] < r) {
        mass += g.vertex_measure[v];
        if (v < nu.nu.size() && nu.nu[v] > 0.0) on_boundary.emplace_back(u[v], nu.nu[v]);
      }
    }
    if (on_boundary.empty()) return;
    const double c = weighted_median(on_boundary);
    double lhs = 0.0;
    for (const auto& [val, w] : on_boundary) lhs += std::pow(std::abs(val - c), q) * w;
    lhs = std::pow(lhs, 1.0 / q);
    const double energy = p_energy_within(g, u, t.p, twice);
    const double rhs = std::pow(r, 1.0 - theta / q) / std::pow(mass, 1.0 / t.p - 1.0 / q) *
                       std::pow(energy, 1.0 / t.p);
    if (lhs == 0.0) return;
    if (!(rhs > 0.0)) {
      violated[i] = 1;
      rep.ratios[i] = kInfinity;
      return;
    }
    rep.ratios[i] = lhs / rhs;
  });
  for (std::size_t i = 0; i < balls.size(); ++i) {
    rep.max_ratio = std::max(rep.max_ratio, rep.ratios[i]);
    rep.violations += violated[i];
  }
  return rep;
}

double adams_exponent(double p, double p_tilde, double q_minus, double theta) {
  if (!(p_tilde >= 1.0 && p_tilde < p)) throw DomainError("p_tilde must satisfy 1 <= p_tilde < p");
  const double denom = q_minus / p - 1.0 / p_tilde;
  if (denom <= 0.0) throw DomainError("Adams exponent undefined: Q/p <= 1/p_tilde");
  return (q_minus - theta) / denom;
}

}  // namespace uniformizer
