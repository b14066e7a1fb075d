#include "uniformizer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "uniformizer/error.hpp"
#include "uniformizer/parallel.hpp"

namespace uniformizer {
namespace {

struct LineFit {
  double slope = 0.0;
  double residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  const std::size_t n = x.size();
  if (n < 2) return out;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return out;
  out.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - out.slope * (x[i] - mx);
    ss += r * r;
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double spread = *hi - *lo;
  out.residual = spread > 0.0 ? std::sqrt(ss / n) / spread : 0.0;
  return out;
}

}  // namespace

std::vector<VertexIndex> sample_vertices(std::span<const VertexIndex> pool, std::size_t count, std::uint64_t seed) {
  std::vector<VertexIndex> out(pool.begin(), pool.end());
  if (count < out.size()) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, out.size() - 1);
      std::swap(out[i], out[pick(rng)]);
    }
    out.resize(count);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> dyadic_radii(double r_min, double r_max) {
  std::vector<double> out;
  for (double r = r_max; r >= r_min * (1.0 - 1e-12) && out.size() < 200; r *= 0.5) out.push_back(r);
  return out;
}

DoublingReport doubling_constant(const MeasuredGraph& g, std::span<const VertexIndex> centers,
                                 std::span<const double> radii, double bound) {
  DoublingReport rep;
  rep.bound = bound;
  if (radii.empty() || centers.empty()) return rep;
  const double reach = 2.0 * *std::max_element(radii.begin(), radii.end());
  std::vector<std::vector<double>> ratio(centers.size(), std::vector<double>(radii.size(), -1.0));
  parallel_for(centers.size(), [&](std::size_t i) {
    const auto dist = distances_from(g.graph, centers[i], reach);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      double small = 0.0, big = 0.0;
      for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (dist[v] < radii[k]) small += g.vertex_measure[v];
        if (dist[v] < 2.0 * radii[k]) big += g.vertex_measure[v];
      }
      if (small > 0.0) ratio[i][k] = big / small;
    }
  });
  for (std::size_t k = 0; k < radii.size(); ++k) {
    DoublingScale scale{radii[k], kNoVertex, 0.0};
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (ratio[i][k] < 0.0) {
        ++rep.skipped;
        continue;
      }
      if (ratio[i][k] > scale.ratio) {
        scale.ratio = ratio[i][k];
        scale.worst_center = centers[i];
      }
    }
    if (scale.worst_center != kNoVertex) {
      rep.per_scale.push_back(scale);
      rep.max_ratio = std::max(rep.max_ratio, scale.ratio);
    }
  }
  rep.pass = rep.max_ratio <= bound;
  return rep;
}

ExponentFit mass_exponents(const MeasuredGraph& g, std::span<const VertexIndex> centers,
                           std::span<const double> radii, std::span<const char> blocked, double slack) {
  if (radii.size() < 3) throw PreconditionError("mass exponents need at least three radii");
  ExponentFit fit;
  fit.slack = slack;
  std::vector<double> r(radii.begin(), radii.end());
  std::sort(r.begin(), r.end());
  fit.r_min = r.front();
  fit.r_max = r.back();
  std::vector<std::vector<double>> mass(centers.size(), std::vector<double>(r.size(), -1.0));
  parallel_for(centers.size(), [&](std::size_t i) {
    const auto dist = distances_from(g.graph, centers[i], r.back());
    for (std::size_t k = 0; k < r.size(); ++k) {
      double m = 0.0;
      bool hit = false;
      for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
        if (dist[v] < r[k]) {
          m += g.vertex_measure[v];
          hit = hit || (!blocked.empty() && blocked[v]);
        }
      }
      if (!hit && m > 0.0) mass[i][k] = m;
    }
  });
  double hi = -kInfinity, lo = kInfinity;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    std::vector<double> lx, ly;
    for (std::size_t a = 0; a < r.size(); ++a) {
      if (mass[i][a] < 0.0) {
        ++fit.skipped;
        continue;
      }
      lx.push_back(std::log(r[a]));
      ly.push_back(std::log(mass[i][a]));
      for (std::size_t b = a + 1; b < r.size(); ++b) {
        if (mass[i][b] < 0.0) continue;
        const double s = std::log(mass[i][b] / mass[i][a]) / std::log(r[b] / r[a]);
        hi = std::max(hi, s);
        lo = std::min(lo, s);
        ++fit.pairs;
      }
    }
    // Per-center intercepts: pool the demeaned samples.
    if (lx.size() >= 2) {
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      for (std::size_t k = 0; k < lx.size(); ++k) {
        xs.push_back(lx[k] - mx);
        ys.push_back(ly[k] - my);
      }
    }
  }
  if (fit.pairs == 0) throw PreconditionError("mass exponents: no admissible ball pairs");
  fit.slope_max = hi;
  fit.slope_min = lo;
  fit.Q_minus = hi * (1.0 + slack);
  fit.Q_plus = lo * (1.0 - slack);
  const auto line = fit_line(xs, ys);
  fit.slope = line.slope;
  fit.fit_residual = line.residual;
  return fit;
}

QBeta q_beta(double p, double beta, double q_mu_minus, double q_mu_plus) {
  if (!(beta > 1.0)) throw DomainError("q_beta needs beta > 1");
  if (!(beta * p > q_mu_minus)) {
    throw PreconditionError("q_beta needs beta * p > Q_minus");
  }
  return {(beta * p - q_mu_plus) / (beta - 1.0), (beta * p - q_mu_minus) / (beta - 1.0)};
}

double boundary_to_infinity(const TransformedSpace& t) {
  const auto dist = distances_from(t.measured.graph, t.infinity_vertex());
  double best = kInfinity;
  for (const VertexIndex b : t.base->boundary_vertices()) best = std::min(best, dist[b]);
  return best;
}

DistInfinityReport dist_infinity_check(const TransformedSpace& t, int first_band, int last_band) {
  const auto dist = distances_from(t.measured.graph, t.infinity_vertex());
  const auto b = bands(*t.base, t.d_omega);
  if (last_band < 0) last_band = b.max_band();
  DistInfinityReport rep;
  for (int m = std::max(first_band, 1); m <= last_band; ++m) {
    BandRatio row{m, 0, kInfinity, 0.0};
    const double scale = std::ldexp(t.phi(std::ldexp(1.0, m)), m);
    for (const VertexIndex v : t.base->interior_vertices()) {
      if (b.band_of[v] != m) continue;
      const double ratio = dist[v] / scale;
      ++row.count;
      row.min_ratio = std::min(row.min_ratio, ratio);
      row.max_ratio = std::max(row.max_ratio, ratio);
    }
    if (row.count == 0) continue;
    rep.kappa = std::max({rep.kappa, row.max_ratio, 1.0 / row.min_ratio});
    rep.bands.push_back(row);
  }
  return rep;
}

std::vector<double> infinity_radii(const TransformedSpace& t) {
  const auto& inf = *t.infinity;
  double shortest = kInfinity;
  for (std::size_t i = 0; i < inf.num_edges(); ++i) {
    shortest = std::min(shortest, t.measured.graph.length(static_cast<EdgeIndex>(inf.first_edge + i)));
  }
  return dyadic_radii(4.0 * shortest, 0.5 * boundary_to_infinity(t));
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::parabolic: return "Parabolic";
    case Verdict::hyperbolic: return "Hyperbolic";
    case Verdict::indeterminate: return "Indeterminate";
  }
  return "?";
}

Classification classify_parabolicity(const TransformedSpace& t, const ClassifyOptions& options) {
  if (!t.infinity) throw PreconditionError("classification needs infinity attached");
  Classification out;
  const auto& inf = *t.infinity;
  double shortest = kInfinity;
  for (std::size_t i = 0; i < inf.num_edges(); ++i) {
    shortest = std::min(shortest, t.measured.graph.length(static_cast<EdgeIndex>(inf.first_edge + i)));
  }
  out.R = 0.5 * boundary_to_infinity(t);
  for (int k = 2; k < 200; ++k) {
    const double r = std::ldexp(out.R, -k);
    if (r < shortest) break;
    out.radii.push_back(r);
  }
  out.caps.assign(out.radii.size(), 0.0);
  parallel_for(out.radii.size(), [&](std::size_t i) {
    out.caps[i] = capacity_of_infinity(t, out.radii[i], out.R, options.solver).value;
  });

  // Theory side.
  out.q_mu_minus = options.q_mu ? options.q_mu->first : inf.end_exponent;
  out.q_mu_plus = options.q_mu ? options.q_mu->second : inf.end_exponent;
  const double p = t.p;
  if (t.phi.kind() != Dampening::Kind::tabulated && t.phi.beta() > 1.0 &&
      t.phi.beta() * p > out.q_mu_minus) {
    out.q_beta = q_beta(p, t.phi.beta(), out.q_mu_minus, out.q_mu_plus);
  } else {
    out.notes.emplace_back("q_beta not evaluated: needs beta > 1 and beta * p > Q_minus");
  }
  if (p < out.q_mu_plus) {
    out.predicted = Verdict::hyperbolic;
  } else if (p >= out.q_mu_minus) {
    out.predicted = Verdict::parabolic;
  }
  out.near_threshold = std::abs(p - out.q_mu_plus) < 0.1 || std::abs(p - out.q_mu_minus) < 0.1;

  if (out.radii.size() < options.min_shells) {
    out.notes.emplace_back("fewer shells than required");
    return out;
  }
  const double cmax = *std::max_element(out.caps.begin(), out.caps.end());
  const double cmin = *std::min_element(out.caps.begin(), out.caps.end());
  if (cmax <= 0.0) {
    out.verdict = Verdict::parabolic;
    out.notes.emplace_back("all shell capacities vanish");
    return out;
  }
  std::vector<double> x, lx, y;
  for (std::size_t i = 0; i < out.radii.size(); ++i) {
    if (out.caps[i] <= 0.0) continue;
    x.push_back(std::log(out.R / out.radii[i]));
    lx.push_back(std::log(std::log(out.R / out.radii[i])));
    y.push_back(std::log(out.caps[i]));
  }
  const auto power = fit_line(x, y);
  const auto logpower = fit_line(lx, y);
  out.fit.loglog_slope = power.slope;
  out.fit.logpower_slope = logpower.slope;
  if (power.residual <= logpower.residual) {
    out.fit.form = "power";
    out.fit.exponent = power.slope;
    out.fit.residual = power.residual;
  } else {
    out.fit.form = "log-power";
    out.fit.exponent = logpower.slope;
    out.fit.residual = logpower.residual;
  }

  bool monotone = true;
  for (std::size_t i = 1; i < out.caps.size(); ++i) {
    monotone = monotone && out.caps[i] <= out.caps[i - 1] * (1.0 + 1e-9);
  }
  if (monotone && (cmin == 0.0 || cmax / cmin >= options.decay_factor) &&
      out.fit.residual < options.max_fit_residual) {
    out.verdict = Verdict::parabolic;
  } else if (cmin >= options.hyperbolic_floor * cmax) {
    out.verdict = Verdict::hyperbolic;
  }
  return out;
}

UniformityReport uniformity_spot_check(const MeasuredGraph& g, std::span<const double> boundary_dist,
                                       std::span<const std::pair<VertexIndex, VertexIndex>> pairs,
                                       std::span<const char> excluded) {
  std::vector<char> allowed(g.num_vertices(), 1);
  for (VertexIndex v = 0; v < excluded.size(); ++v) {
    if (excluded[v]) allowed[v] = 0;
  }
  std::vector<double> length_ratio(pairs.size(), 0.0), cigar(pairs.size(), 0.0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [x, y] = pairs[i];
    const VertexIndex src[] = {x};
    DijkstraOptions opt;
    opt.allowed = allowed;
    const auto tree = shortest_paths(g.graph, src, opt);
    if (!(tree.dist[y] < kInfinity)) throw UnreachableError("unreachable: pair in different components");
    const auto path = tree_path_edges(tree, y);
    const double total = tree.dist[y];
    const auto full = distances_from(g.graph, x);
    length_ratio[i] = full[y] > 0.0 ? total / full[y] : 1.0;
    double along = 0.0, worst = 0.0;
    VertexIndex v = x;
    for (const EdgeIndex e : path) {
      along += g.graph.length(e);
      v = g.graph.other(e, v);
      if (v == y) break;
      if (boundary_dist[v] > 0.0) worst = std::max(worst, std::min(along, total - along) / boundary_dist[v]);
    }
    cigar[i] = worst;
  });
  UniformityReport rep;
  rep.pairs = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    rep.max_length_ratio = std::max(rep.max_length_ratio, length_ratio[i]);
    rep.max_cigar_ratio = std::max(rep.max_cigar_ratio, cigar[i]);
  }
  rep.constant = std::max(rep.max_length_ratio, rep.max_cigar_ratio);
  return rep;
}

FatnessReport boundary_fatness(const TransformedSpace& t, const BoundaryMeasure& nu,
                               std::span<const VertexIndex> centers, std::span<const double> radii,
                               double spread_bound, const SolverOptions& solver) {
  FatnessReport rep;
  rep.spread_bound = spread_bound;
  const auto& g = t.measured;
  const std::size_t jobs = centers.size() * radii.size();
  rep.samples.resize(jobs);
  parallel_for(jobs, [&](std::size_t job) {
    auto& s = rep.samples[job];
    s.center = centers[job / radii.size()];
    s.r = radii[job % radii.size()];
    if (s.r < 2.0 * nu.mesh_scale * (1.0 - 1e-12)) {
      s.unresolved = true;
      return;
    }
    const double reach = 2.0 * s.r;
    const auto dist = distances_from(g.graph, s.center, reach * 1.5);
    Condenser cond;
    double mass = 0.0;
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (dist[v] <= s.r * (1.0 + 1e-12) && v < nu.nu.size() && nu.nu[v] > 0.0) {
        cond.E.push_back(v);
        mass += nu.nu[v];
      } else if (dist[v] >= reach) {
        cond.F.push_back(v);
      }
    }
    if (cond.F.empty() || !(mass > 0.0)) {
      s.unresolved = true;
      return;
    }
    const double cap = capacity(g, cond, t.p, solver).value;
    s.ratio = cap * std::pow(s.r, t.p - nu.theta) / mass;
  });
  rep.min_ratio = kInfinity;
  for (const auto& s : rep.samples) {
    if (s.unresolved) {
      ++rep.unresolved;
      continue;
    }
    rep.min_ratio = std::min(rep.min_ratio, s.ratio);
    rep.max_ratio = std::max(rep.max_ratio, s.ratio);
  }
  const bool any = rep.unresolved < rep.samples.size();
  rep.floor = rep.max_ratio / spread_bound;
  rep.pass = any && rep.min_ratio > 0.0 && rep.min_ratio >= rep.floor;
  if (!any) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace uniformizer
