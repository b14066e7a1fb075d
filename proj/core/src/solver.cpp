#include "uniformizer/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uniformizer/error.hpp"

namespace uniformizer {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

struct Term {
  VertexIndex a;
  VertexIndex b;
  int fa;  // free slot of a, -1 when pinned
  int fb;
  double c;  // m / len^p
};

class Reduced {
 public:
  Reduced(const MeasuredGraph& g, double p, const std::vector<char>& pinned,
          const std::vector<char>& detached)
      : p_(p) {
    slot_.assign(g.num_vertices(), -1);
    for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
      if (!pinned[v] && !detached[v]) {
        slot_[v] = static_cast<int>(free_.size());
        free_.push_back(v);
      }
    }
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
      const double m = g.edge_mass[e];
      if (m == 0.0) continue;
      const auto& ed = g.graph.edge(e);
      if (detached[ed.u] || detached[ed.v]) continue;
      const double c = m / std::pow(ed.length, p);
      const int fa = slot_[ed.u], fb = slot_[ed.v];
      if (fa < 0 && fb < 0) {
        fixed_.push_back({ed.u, ed.v, fa, fb, c});
      } else {
        terms_.push_back({ed.u, ed.v, fa, fb, c});
      }
    }
  }

  std::size_t size() const { return free_.size(); }
  const std::vector<VertexIndex>& free() const { return free_; }

  double energy(const ScalarField& u, double eps) const {
    double total = 0.0;
    const double e2 = eps * eps;
    for (const auto& t : terms_) {
      const double d = u[t.a] - u[t.b];
      total += t.c * std::pow(d * d + e2, 0.5 * p_);
    }
    return total;
  }

  double exact_energy(const ScalarField& u) const {
    double total = 0.0;
    for (const auto* list : {&terms_, &fixed_}) {
      for (const auto& t : *list) total += t.c * std::pow(std::abs(u[t.a] - u[t.b]), p_);
    }
    return total;
  }

  // Gradient and Hessian of the regularized energy in free coordinates.
  void assemble(const ScalarField& u, double eps, Eigen::VectorXd& grad, SparseMatrix& hess) const {
    const double e2 = eps * eps;
    grad.setZero(static_cast<Eigen::Index>(size()));
    std::vector<Triplet> trip;
    trip.reserve(3 * terms_.size());
    for (const auto& t : terms_) {
      const double d = u[t.a] - u[t.b];
      const double s = d * d + e2;
      const double gw = t.c * p_ * std::pow(s, 0.5 * p_ - 1.0) * d;
      const double hw = t.c * p_ * std::pow(s, 0.5 * p_ - 2.0) * ((p_ - 1.0) * d * d + e2);
      add(trip, grad, t, gw, hw);
    }
    finish(trip, hess);
  }

  // Weighted Laplacian with weights c and the pinned right-hand side.
  void laplacian(const ScalarField& u, Eigen::VectorXd& rhs, SparseMatrix& mat) const {
    rhs.setZero(static_cast<Eigen::Index>(size()));
    std::vector<Triplet> trip;
    trip.reserve(3 * terms_.size());
    for (const auto& t : terms_) {
      if (t.fa >= 0) trip.emplace_back(t.fa, t.fa, t.c);
      if (t.fb >= 0) trip.emplace_back(t.fb, t.fb, t.c);
      if (t.fa >= 0 && t.fb >= 0) {
        trip.emplace_back(std::max(t.fa, t.fb), std::min(t.fa, t.fb), -t.c);
      } else if (t.fa >= 0) {
        rhs[t.fa] += t.c * u[t.b];
      } else {
        rhs[t.fb] += t.c * u[t.a];
      }
    }
    finish(trip, mat);
  }

 private:
  static void add(std::vector<Triplet>& trip, Eigen::VectorXd& grad, const Term& t, double gw, double hw) {
    if (t.fa >= 0) {
      grad[t.fa] += gw;
      trip.emplace_back(t.fa, t.fa, hw);
    }
    if (t.fb >= 0) {
      grad[t.fb] -= gw;
      trip.emplace_back(t.fb, t.fb, hw);
    }
    if (t.fa >= 0 && t.fb >= 0) trip.emplace_back(std::max(t.fa, t.fb), std::min(t.fa, t.fb), -hw);
  }

  void finish(std::vector<Triplet>& trip, SparseMatrix& mat) const {
    const auto n = static_cast<Eigen::Index>(size());
    mat.resize(n, n);
    mat.setFromTriplets(trip.begin(), trip.end());
  }

  double p_;
  std::vector<int> slot_;
  std::vector<VertexIndex> free_;
  std::vector<Term> terms_;
  std::vector<Term> fixed_;
};

// argmin_x sum_i w_i |x - y_i|^p
double weighted_p_mean(const std::vector<double>& y, const std::vector<double>& w, double p) {
  double lo = *std::min_element(y.begin(), y.end());
  double hi = *std::max_element(y.begin(), y.end());
  if (p == 2.0) {
    double s = 0.0, ws = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      s += w[i] * y[i];
      ws += w[i];
    }
    return s / ws;
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double x = 0.5 * (lo + hi);
    if (x == lo || x == hi) break;
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double diff = x - y[i];
      d += w[i] * std::pow(std::abs(diff), p - 1.0) * (diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0));
    }
    (d > 0.0 ? hi : lo) = x;
  }
  return 0.5 * (lo + hi);
}

void solve_linear(Ldlt& solver, const SparseMatrix& mat, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                  SolveResult& result) {
  solver.compute(mat);
  if (solver.info() != Eigen::Success) throw PreconditionError("linear system is not positive definite");
  x = solver.solve(rhs);
  const double scale = std::max(rhs.norm(), 1e-300);
  double res = (mat.selfadjointView<Eigen::Lower>() * x - rhs).norm() / scale;
  if (res > 1e-10) {
    x += solver.solve(rhs - mat.selfadjointView<Eigen::Lower>() * x);
    res = (mat.selfadjointView<Eigen::Lower>() * x - rhs).norm() / scale;
    if (res > 1e-10) result.flags.emplace_back("linear residual above 1e-10");
  }
}

}  // namespace

SolveResult solve_p_harmonic(const DirichletProblem& problem) {
  if (!problem.graph) throw PreconditionError("Dirichlet problem without a graph");
  const MeasuredGraph& g = *problem.graph;
  const double p = problem.p;
  const auto& opt = problem.options;
  if (!(p > 1.0)) throw DomainError("solvers need p > 1");
  if (problem.pins.empty()) throw PreconditionError("Dirichlet problem needs at least one pinned vertex");
  const std::size_t n = g.num_vertices();

  std::vector<char> pinned(n, 0);
  SolveResult result;
  result.u.assign(n, 0.0);
  double lo = kInfinity, hi = -kInfinity;
  for (const auto& pin : problem.pins) {
    if (pin.vertex >= n) throw PreconditionError("pinned vertex out of range");
    if (!std::isfinite(pin.value)) throw PreconditionError("pinned value must be finite");
    pinned[pin.vertex] = 1;
    result.u[pin.vertex] = pin.value;
    lo = std::min(lo, pin.value);
    hi = std::max(hi, pin.value);
  }
  if (opt.require_boundary_pins) {
    for (VertexIndex v = 0; v < n; ++v) {
      if (g.is_boundary(v) && !pinned[v]) throw PreconditionError("boundary data must cover every boundary vertex");
    }
  }

  // Free vertices carrying no positive-mass edge are solved last, from their neighbours.
  std::vector<char> detached(n, 0);
  for (VertexIndex v = 0; v < n; ++v) {
    if (pinned[v]) continue;
    bool any = false;
    for (const auto& inc : g.graph.neighbors(v)) any = any || g.edge_mass[inc.edge] > 0.0;
    detached[v] = any ? 0 : 1;
  }
  {
    std::vector<char> seen(pinned);
    std::vector<VertexIndex> stack;
    for (VertexIndex v = 0; v < n; ++v) {
      if (pinned[v]) stack.push_back(v);
    }
    while (!stack.empty()) {
      const VertexIndex v = stack.back();
      stack.pop_back();
      for (const auto& inc : g.graph.neighbors(v)) {
        if (seen[inc.to] || detached[inc.to] || g.edge_mass[inc.edge] == 0.0) continue;
        seen[inc.to] = 1;
        stack.push_back(inc.to);
      }
    }
    for (VertexIndex v = 0; v < n; ++v) {
      if (!seen[v] && !detached[v]) throw PreconditionError("disconnected free region: a free vertex has no path to a pin");
    }
  }

  Reduced red(g, p, pinned, detached);
  const std::size_t nf = red.size();
  const auto& free = red.free();
  const double range = hi - lo;

  Ldlt ldlt;
  Eigen::VectorXd rhs, x;
  SparseMatrix mat;
  if (nf > 0) {
    if (!opt.initial.empty()) {
      if (opt.initial.size() != n) throw PreconditionError("initial field size does not match vertex count");
      for (const VertexIndex v : free) result.u[v] = std::clamp(opt.initial[v], lo, hi);
    } else {
      red.laplacian(result.u, rhs, mat);
      solve_linear(ldlt, mat, rhs, x, result);
      for (std::size_t i = 0; i < nf; ++i) result.u[free[i]] = std::clamp(x[static_cast<Eigen::Index>(i)], lo, hi);
    }
    result.iterations = 1;
    result.stages = 1;
  }

  if (nf > 0 && p != 2.0 && range > 0.0) {
    result.iterations = 0;
    result.stages = 0;
    const double floor = opt.eps_floor * range;
    double eps = std::max(opt.eps0_scale * range, floor);
    Eigen::VectorXd grad, step;
    SparseMatrix hess;
    bool analyzed = false;
    ScalarField trial = result.u;
    for (int stage = 0;; ++stage) {
      ++result.stages;
      double energy = red.energy(result.u, eps);
      bool stage_done = false;
      for (int it = 0; it < opt.max_iter; ++it) {
        red.assemble(result.u, eps, grad, hess);
        if (grad.lpNorm<Eigen::Infinity>() == 0.0) {
          stage_done = true;
          break;
        }
        if (!analyzed) {
          ldlt.analyzePattern(hess);
          analyzed = true;
        }
        ldlt.factorize(hess);
        if (ldlt.info() != Eigen::Success) throw PreconditionError("Newton system is not positive definite");
        step = ldlt.solve(-grad);
        const double decrement = -grad.dot(step);
        if (decrement <= 2.0 * opt.tol * energy) {
          result.residual = decrement / (2.0 * std::max(energy, 1e-300));
          stage_done = true;
          break;
        }
        double t = 1.0, trial_energy = energy;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
          double slope = 0.0;
          for (std::size_t i = 0; i < nf; ++i) {
            const VertexIndex v = free[i];
            trial[v] = std::clamp(result.u[v] + t * step[static_cast<Eigen::Index>(i)], lo, hi);
            slope += grad[static_cast<Eigen::Index>(i)] * (trial[v] - result.u[v]);
          }
          trial_energy = red.energy(trial, eps);
          if (trial_energy < energy && trial_energy <= energy + 1e-4 * std::min(slope, 0.0)) {
            accepted = true;
            break;
          }
        }
        if (!accepted) {
          // Floating-point floor: no representable descent remains.
          result.residual = decrement / (2.0 * std::max(energy, 1e-300));
          stage_done = result.residual < 1e-8;
          break;
        }
        const double rel = (energy - trial_energy) / energy;
        for (const VertexIndex v : free) result.u[v] = trial[v];
        energy = trial_energy;
        ++result.iterations;
        result.energy_history.push_back(energy);
        result.history_stage.push_back(stage);
        result.residual = rel;
        if (rel < opt.tol) {
          stage_done = true;
          break;
        }
      }
      const bool last = eps <= floor * (1.0 + 1e-12);
      if (!stage_done && last) {
        result.converged = false;
        result.flags.emplace_back("unconverged");
      }
      if (last) break;
      eps = std::max(eps * opt.eps_factor, floor);
    }
  }

  // Massless vertices resolve in passes, each from neighbours already set.
  std::vector<char> pending(detached);
  std::size_t left = static_cast<std::size_t>(std::count(pending.begin(), pending.end(), 1));
  if (left > 0) result.flags.emplace_back("massless vertex set by weighted p-mean");
  while (left > 0) {
    std::vector<VertexIndex> ready;
    std::vector<double> value;
    for (VertexIndex v = 0; v < n; ++v) {
      if (!pending[v]) continue;
      std::vector<double> y, w;
      for (const auto& inc : g.graph.neighbors(v)) {
        if (pending[inc.to]) continue;
        y.push_back(result.u[inc.to]);
        w.push_back(std::pow(g.graph.length(inc.edge), -p));
      }
      if (y.empty()) continue;
      ready.push_back(v);
      value.push_back(weighted_p_mean(y, w, p));
    }
    if (ready.empty()) throw PreconditionError("disconnected free region: isolated free vertex");
    for (std::size_t i = 0; i < ready.size(); ++i) {
      result.u[ready[i]] = value[i];
      pending[ready[i]] = 0;
    }
    left -= ready.size();
  }
  result.energy = red.exact_energy(result.u);
  return result;
}

CapacityResult capacity(const MeasuredGraph& g, const Condenser& cond, double p, const SolverOptions& options) {
  const std::size_t n = g.num_vertices();
  if (cond.E.empty() || cond.F.empty()) throw PreconditionError("condenser sets E and F must be non-empty");
  if (!cond.U.empty() && cond.U.size() != n) throw PreconditionError("condenser mask size does not match vertex count");
  const auto in_u = [&](VertexIndex v) { return cond.U.empty() || cond.U[v]; };
  std::vector<signed char> role(n, 0);
  for (const VertexIndex v : cond.E) {
    if (v >= n || !in_u(v)) throw PreconditionError("E must lie inside U");
    role[v] = 1;
  }
  for (const VertexIndex v : cond.F) {
    if (v >= n || !in_u(v)) throw PreconditionError("F must lie inside U");
    if (role[v] == 1) throw PreconditionError("condenser sets E and F must be disjoint");
    role[v] = 2;
  }

  // Free vertices joined to a pin through positive-mass edges inside U.
  std::vector<char> keep(n, 0);
  std::vector<VertexIndex> stack;
  for (VertexIndex v = 0; v < n; ++v) {
    if (role[v] != 0) stack.push_back(v);
  }
  std::vector<char> reached(n, 0);
  while (!stack.empty()) {
    const VertexIndex v = stack.back();
    stack.pop_back();
    for (const auto& inc : g.graph.neighbors(v)) {
      const VertexIndex w = inc.to;
      if (!in_u(w) || role[w] != 0 || reached[w] || g.edge_mass[inc.edge] == 0.0) continue;
      reached[w] = 1;
      stack.push_back(w);
    }
  }
  std::vector<Edge> edges;
  std::vector<double> mass;
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.graph.edge(e);
    if (g.edge_mass[e] == 0.0 || !in_u(ed.u) || !in_u(ed.v)) continue;
    const bool useful = reached[ed.u] || reached[ed.v] || (role[ed.u] != 0 && role[ed.v] != 0 && role[ed.u] != role[ed.v]);
    if (!useful) continue;
    keep[ed.u] = keep[ed.v] = 1;
    edges.push_back(ed);
    mass.push_back(g.edge_mass[e]);
  }

  CapacityResult out;
  out.potential.assign(n, 0.0);
  for (const VertexIndex v : cond.E) out.potential[v] = 1.0;
  if (edges.empty()) return out;

  std::vector<VertexIndex> local(n, kNoVertex), global;
  for (VertexIndex v = 0; v < n; ++v) {
    if (keep[v]) {
      local[v] = static_cast<VertexIndex>(global.size());
      global.push_back(v);
    }
  }
  for (auto& ed : edges) {
    ed.u = local[ed.u];
    ed.v = local[ed.v];
  }
  std::vector<std::uint32_t> rank(global.size());
  for (std::size_t i = 0; i < global.size(); ++i) rank[i] = g.graph.tie_rank(global[i]);
  std::vector<std::uint32_t> order(global.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<std::uint32_t>(i);

  MeasuredGraph sub;
  sub.graph = WeightedGraph(global.size(), std::move(edges), std::move(rank));
  sub.edge_mass = std::move(mass);
  sub.vertex_measure.resize(global.size());
  sub.boundary.assign(global.size(), 0);
  for (std::size_t i = 0; i < global.size(); ++i) sub.vertex_measure[i] = g.vertex_measure[global[i]];

  DirichletProblem problem;
  problem.graph = &sub;
  problem.p = p;
  problem.options = options;
  problem.options.require_boundary_pins = false;
  problem.options.initial.clear();
  for (std::size_t i = 0; i < global.size(); ++i) {
    const auto r = role[global[i]];
    if (r != 0) problem.pins.push_back({static_cast<VertexIndex>(i), r == 1 ? 1.0 : 0.0});
  }
  out.solve = solve_p_harmonic(problem);
  for (std::size_t i = 0; i < global.size(); ++i) out.potential[global[i]] = out.solve.u[i];
  out.value = out.solve.energy;
  return out;
}

CapacityResult capacity_of_infinity(const TransformedSpace& t, double r, double R, const SolverOptions& options) {
  if (!t.infinity) throw PreconditionError("capacity of infinity needs infinity attached");
  if (!(r > 0.0) || !(r < R)) throw DomainError("capacity of infinity needs 0 < r < R");
  const auto& g = t.measured;
  const VertexIndex inf = t.infinity->vertex;
  const auto dist = distances_from(g.graph, inf);
  Condenser cond;
  const double reach = r * (1.0 + 1e-12);
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) {
    if (dist[v] <= reach) {
      cond.E.push_back(v);
    } else if (dist[v] >= R) {
      cond.F.push_back(v);
    }
  }
  if (cond.F.empty()) throw PreconditionError("degenerate shells: R exceeds the distance range from infinity");
  return capacity(g, cond, t.p, options);
}

UnboundedSolve solve_dirichlet_unbounded(const TransformedSpace& t, std::span<const double> f,
                                         std::optional<double> at_infinity, const SolverOptions& options) {
  if (!t.infinity) throw PreconditionError("unbounded Dirichlet problem needs infinity attached");
  const GraphSpace& space = *t.base;
  if (f.size() != space.num_vertices()) throw PreconditionError("boundary data size does not match vertex count");
  DirichletProblem problem;
  problem.graph = &t.measured;
  problem.p = t.p;
  problem.options = options;
  for (const VertexIndex b : space.boundary_vertices()) problem.pins.push_back({b, f[b]});
  if (at_infinity) problem.pins.push_back({t.infinity->vertex, *at_infinity});
  UnboundedSolve out;
  out.result = solve_p_harmonic(problem);
  out.at_infinity = out.result.u[t.infinity->vertex];
  return out;
}

UnboundedSolve solve_dirichlet_unbounded(const GraphSpace& space, const Dampening& phi, double p,
                                         std::span<const double> f, std::optional<double> at_infinity,
                                         const SolverOptions& options) {
  const auto t = attach_infinity(transform(space, phi, p));
  return solve_dirichlet_unbounded(t, f, at_infinity, options);
}

}  // namespace uniformizer
