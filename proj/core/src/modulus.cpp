#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "uniformizer/error.hpp"
#include "uniformizer/solver.hpp"

namespace uniformizer {
namespace {

// Restricted dual over an active path set:
//   f(lambda) = -sum lambda + (p - 1) sum_e m_e rho_e^p,
//   rho_e = (len_e c_e / (p m_e))^{1/(p-1)},  c_e = sum_{j : e in path j} lambda_j.
class PathProgram {
 public:
  PathProgram(const MeasuredGraph& g, double p) : g_(g), p_(p), q_(1.0 / (p - 1.0)) {
    c_.assign(g.num_edges(), 0.0);
    on_edge_.resize(g.num_edges());
  }

  std::size_t size() const { return paths_.size(); }
  const std::vector<double>& lambda() const { return lambda_; }

  void add(std::vector<EdgeIndex> path, double lambda) {
    const std::size_t j = paths_.size();
    for (const EdgeIndex e : path) {
      if (on_edge_[e].empty()) used_.push_back(e);
      on_edge_[e].push_back(j);
      c_[e] += lambda;
    }
    paths_.push_back(std::move(path));
    lambda_.push_back(lambda);
  }

  double rho(EdgeIndex e) const { return rho_at(e, c_[e]); }

  double rho_at(EdgeIndex e, double c) const {
    if (c <= 0.0) return 0.0;
    return std::pow(g_.graph.length(e) * c / (p_ * g_.edge_mass[e]), q_);
  }

  double path_length(std::size_t j) const {
    double len = 0.0;
    for (const EdgeIndex e : paths_[j]) len += rho(e) * g_.graph.length(e);
    return len;
  }

  double objective(const std::vector<double>& lambda) const {
    std::vector<double> c(g_.num_edges(), 0.0);
    for (std::size_t j = 0; j < paths_.size(); ++j) {
      for (const EdgeIndex e : paths_[j]) c[e] += lambda[j];
    }
    double f = -std::accumulate(lambda.begin(), lambda.end(), 0.0);
    for (const EdgeIndex e : used_) f += (p_ - 1.0) * g_.edge_mass[e] * std::pow(rho_at(e, c[e]), p_);
    return f;
  }

  double primal() const {
    double total = 0.0;
    for (const EdgeIndex e : used_) total += g_.edge_mass[e] * std::pow(rho(e), p_);
    return total;
  }

  // Chooses lambda_j of the newest path so that its rho-length is 1, others fixed.
  void balance_last() {
    const std::size_t j = paths_.size() - 1;
    const auto len_with = [&](double x) {
      double len = 0.0;
      for (const EdgeIndex e : paths_[j]) len += rho_at(e, c_[e] - lambda_[j] + x) * g_.graph.length(e);
      return len;
    };
    double lo = 0.0, hi = 1.0;
    if (len_with(0.0) >= 1.0) return;
    while (len_with(hi) < 1.0 && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (len_with(mid) < 1.0 ? lo : hi) = mid;
    }
    set(j, hi);
  }

  // Projected Newton on lambda >= 0. Returns the final KKT residual.
  double solve(double kkt_tol, int max_iter) {
    const std::size_t k = paths_.size();
    double kkt = kInfinity;
    for (int it = 0; it < max_iter; ++it) {
      Eigen::VectorXd grad(k);
      for (std::size_t j = 0; j < k; ++j) grad[j] = path_length(j) - 1.0;
      kkt = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        kkt = std::max(kkt, lambda_[j] > 0.0 ? std::abs(grad[j]) : std::max(0.0, -grad[j]));
      }
      if (kkt <= kkt_tol) break;

      double eps_active = 0.0;
      for (std::size_t j = 0; j < k; ++j) eps_active = std::max(eps_active, std::abs(lambda_[j] - std::max(0.0, lambda_[j] - grad[j])));
      eps_active = std::min(eps_active, 1e-3);
      std::vector<int> free;
      std::vector<char> active(k, 0);
      for (std::size_t j = 0; j < k; ++j) {
        if (lambda_[j] <= eps_active && grad[j] > 0.0) {
          active[j] = 1;
        } else {
          free.push_back(static_cast<int>(j));
        }
      }
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      for (std::size_t j = 0; j < k; ++j) {
        if (active[j]) dir[j] = -grad[j] * std::max(lambda_[j], 1e-300) / std::max(grad[j], 1e-300);
      }
      if (!free.empty()) {
        const auto nf = static_cast<Eigen::Index>(free.size());
        std::vector<int> index(k, -1);
        for (std::size_t i = 0; i < free.size(); ++i) index[free[i]] = static_cast<int>(i);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nf, nf);
        for (const EdgeIndex e : used_) {
          const double c = c_[e];
          if (c <= 0.0) continue;
          const double w = g_.graph.length(e) * rho(e) / ((p_ - 1.0) * c);
          for (const std::size_t a : on_edge_[e]) {
            if (index[a] < 0) continue;
            for (const std::size_t b : on_edge_[e]) {
              if (index[b] >= 0) h(index[a], index[b]) += w;
            }
          }
        }
        Eigen::VectorXd gf(nf);
        for (Eigen::Index i = 0; i < nf; ++i) gf[i] = grad[free[i]];
        double ridge = 0.0;
        const double diag = std::max(h.diagonal().maxCoeff(), 1e-300);
        Eigen::VectorXd d;
        for (int attempt = 0; attempt < 8; ++attempt) {
          Eigen::LDLT<Eigen::MatrixXd> ldlt((h + ridge * Eigen::MatrixXd::Identity(nf, nf)).eval());
          if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            d = ldlt.solve(-gf);
            if (d.allFinite() && d.dot(gf) < 0.0) break;
          }
          ridge = ridge == 0.0 ? 1e-12 * diag : ridge * 100.0;
          d.resize(0);
        }
        if (d.size() == 0) d = -gf / diag;
        for (Eigen::Index i = 0; i < nf; ++i) dir[free[i]] = d[i];
      }

      const double f0 = objective(lambda_);
      std::vector<double> trial(k);
      bool accepted = false;
      for (double t = 1.0; t > 1e-20; t *= 0.5) {
        double decrease = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          trial[j] = std::max(0.0, lambda_[j] + t * dir[j]);
          decrease += grad[j] * (lambda_[j] - trial[j]);
        }
        const double f1 = objective(trial);
        if (f1 <= f0 - 1e-4 * std::max(decrease, 0.0) && f1 <= f0) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      bool moved = false;
      for (std::size_t j = 0; j < k; ++j) {
        moved = moved || trial[j] != lambda_[j];
        set(j, trial[j]);
      }
      if (!moved) break;
    }
    return kkt;
  }

 private:
  void set(std::size_t j, double value) {
    const double delta = value - lambda_[j];
    if (delta == 0.0) return;
    for (const EdgeIndex e : paths_[j]) c_[e] += delta;
    lambda_[j] = value;
  }

  const MeasuredGraph& g_;
  double p_;
  double q_;
  std::vector<std::vector<EdgeIndex>> paths_;
  std::vector<double> lambda_;
  std::vector<double> c_;
  std::vector<std::vector<std::size_t>> on_edge_;
  std::vector<EdgeIndex> used_;
};

}  // namespace

ModulusResult modulus(const MeasuredGraph& g, const Condenser& cond, double p, const ModulusOptions& options) {
  if (!(p > 1.0)) throw DomainError("modulus needs p > 1");
  const std::size_t n = g.num_vertices();
  if (cond.E.empty() || cond.F.empty()) throw PreconditionError("condenser sets E and F must be non-empty");
  std::vector<signed char> role(n, 0);
  for (const VertexIndex v : cond.E) role[v] = 1;
  for (const VertexIndex v : cond.F) {
    if (role[v] == 1) throw PreconditionError("condenser sets E and F must be disjoint");
    role[v] = 2;
  }
  std::vector<char> allowed = cond.U.empty() ? std::vector<char>(n, 1) : cond.U;

  std::vector<double> weight(g.num_edges());
  const auto shortest = [&](bool use_rho, const PathProgram* prog, double& length) {
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
      if (g.edge_mass[e] == 0.0) {
        weight[e] = kInfinity;
      } else {
        weight[e] = use_rho ? prog->rho(e) * g.graph.length(e) : g.graph.length(e);
      }
    }
    DijkstraOptions opt;
    opt.allowed = allowed;
    opt.weights = weight;
    const auto tree = shortest_paths(g.graph, cond.E, opt);
    VertexIndex best = kNoVertex;
    for (const VertexIndex f : cond.F) {
      if (!(tree.dist[f] < kInfinity)) continue;
      if (best == kNoVertex || tree.dist[f] < tree.dist[best] ||
          (tree.dist[f] == tree.dist[best] && g.graph.tie_rank(f) < g.graph.tie_rank(best))) {
        best = f;
      }
    }
    std::vector<EdgeIndex> path;
    if (best == kNoVertex) {
      length = kInfinity;
      return path;
    }
    // Walk back from the target, cutting at the first F vertex and the last E vertex.
    std::vector<VertexIndex> verts{best};
    for (VertexIndex v = best; tree.parent[v] != kNoVertex; v = tree.parent[v]) {
      path.push_back(tree.parent_edge[v]);
      verts.push_back(tree.parent[v]);
    }
    std::reverse(path.begin(), path.end());
    std::reverse(verts.begin(), verts.end());
    std::size_t start = 0, stop = verts.size() - 1;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (role[verts[i]] == 1) start = i;
    }
    for (std::size_t i = start; i < verts.size(); ++i) {
      if (role[verts[i]] == 2) {
        stop = i;
        break;
      }
    }
    path = std::vector<EdgeIndex>(path.begin() + static_cast<std::ptrdiff_t>(start),
                                  path.begin() + static_cast<std::ptrdiff_t>(stop));
    length = 0.0;
    for (const EdgeIndex e : path) length += weight[e];
    return path;
  };

  ModulusResult out;
  double len = 0.0;
  auto first = shortest(false, nullptr, len);
  if (!(len < kInfinity)) {
    out.shortest = kInfinity;
    return out;
  }
  PathProgram prog(g, p);
  std::set<std::vector<EdgeIndex>> seen;
  seen.insert(first);
  prog.add(std::move(first), 0.0);
  prog.balance_last();
  while (true) {
    const double kkt = prog.solve(options.kkt_tol, options.max_newton);
    if (kkt > 1e3 * options.kkt_tol) out.flags.emplace_back("restricted program KKT residual " + std::to_string(kkt));
    auto path = shortest(true, &prog, len);
    out.shortest = len;
    if (len >= 1.0 - options.tol) break;
    if (prog.size() >= options.max_paths) {
      out.converged = false;
      out.flags.emplace_back("path cap reached");
      break;
    }
    if (!seen.insert(path).second) {
      out.converged = false;
      out.flags.emplace_back("violated path already active");
      break;
    }
    prog.add(std::move(path), 0.0);
    prog.balance_last();
  }
  out.rho.assign(g.num_edges(), 0.0);
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    if (g.edge_mass[e] > 0.0) out.rho[e] = prog.rho(e);
  }
  out.value = prog.primal();
  out.paths_used = prog.size();
  return out;
}

}  // namespace uniformizer
