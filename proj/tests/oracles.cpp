#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

MeasuredGraph make_graph(std::size_t n, std::vector<uniformizer::Edge> edges, std::vector<double> mass,
                         std::vector<char> boundary) {
  MeasuredGraph g;
  g.graph = uniformizer::WeightedGraph(n, std::move(edges));
  g.edge_mass = std::move(mass);
  g.boundary = boundary.empty() ? std::vector<char>(n, 0) : std::move(boundary);
  g.vertex_measure.assign(n, 1.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.boundary[v]) g.vertex_measure[v] = 0.0;
  }
  return g;
}

MeasuredGraph unit_grid(std::size_t rows, std::size_t cols) {
  std::vector<uniformizer::Edge> edges;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto v = static_cast<VertexIndex>(i * cols + j);
      if (j + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (i + 1 < rows) edges.push_back({v, static_cast<VertexIndex>(v + cols), 1.0});
    }
  }
  std::vector<double> mass(edges.size(), 1.0);
  return make_graph(rows * cols, std::move(edges), std::move(mass), {});
}

double energy(const MeasuredGraph& g, std::span<const double> u, double p) {
  double total = 0.0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.graph.edge(static_cast<EdgeIndex>(e));
    total += g.edge_mass[e] * std::pow(std::abs(u[ed.u] - u[ed.v]) / ed.length, p);
  }
  return total;
}

std::vector<double> dense_dirichlet(const MeasuredGraph& g, std::span<const uniformizer::Pin> pins) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.graph.edge(static_cast<EdgeIndex>(e));
    const double c = g.edge_mass[e] / (ed.length * ed.length);
    L(ed.u, ed.u) += c;
    L(ed.v, ed.v) += c;
    L(ed.u, ed.v) -= c;
    L(ed.v, ed.u) -= c;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const auto& pin : pins) {
    L.row(pin.vertex).setZero();
    L(pin.vertex, pin.vertex) = 1.0;
    rhs(pin.vertex) = pin.value;
  }
  const Eigen::VectorXd x = L.fullPivLu().solve(rhs);
  return {x.data(), x.data() + n};
}

std::vector<std::vector<EdgeIndex>> simple_paths(const MeasuredGraph& g, const uniformizer::Condenser& cond,
                                                 std::size_t limit) {
  const std::size_t n = g.num_vertices();
  std::vector<char> inE(n, 0), inF(n, 0), inU(n, 1), used(n, 0);
  for (auto v : cond.E) inE[v] = 1;
  for (auto v : cond.F) inF[v] = 1;
  if (!cond.U.empty()) inU.assign(cond.U.begin(), cond.U.end());
  std::vector<std::vector<EdgeIndex>> out;
  std::vector<EdgeIndex> stack;
  std::function<void(VertexIndex)> dfs = [&](VertexIndex v) {
    if (out.size() >= limit) return;
    for (const auto& inc : g.graph.neighbors(v)) {
      const VertexIndex w = inc.to;
      if (used[w] || !inU[w] || inE[w]) continue;
      stack.push_back(inc.edge);
      if (inF[w]) {
        out.push_back(stack);
      } else {
        used[w] = 1;
        dfs(w);
        used[w] = 0;
      }
      stack.pop_back();
    }
  };
  for (auto s : cond.E) {
    used[s] = 1;
    dfs(s);
    used[s] = 0;
  }
  return out;
}

double full_program_modulus(const MeasuredGraph& g, const std::vector<std::vector<EdgeIndex>>& paths, double p) {
  if (paths.empty()) return 0.0;
  // Variables: edges that appear on some path.
  std::vector<int> slot(g.num_edges(), -1);
  std::vector<EdgeIndex> vars;
  for (const auto& path : paths) {
    for (auto e : path) {
      if (slot[e] < 0) {
        slot[e] = static_cast<int>(vars.size());
        vars.push_back(e);
      }
    }
  }
  const auto nv = static_cast<Eigen::Index>(vars.size());
  const auto np = static_cast<Eigen::Index>(paths.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(np, nv);
  double min_len = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < np; ++i) {
    double len = 0.0;
    for (auto e : paths[i]) {
      A(i, slot[e]) += g.graph.length(e);
      len += g.graph.length(e);
    }
    min_len = std::min(min_len, len);
  }
  Eigen::VectorXd m(nv);
  for (Eigen::Index j = 0; j < nv; ++j) m(j) = g.edge_mass[vars[j]];

  Eigen::VectorXd x = Eigen::VectorXd::Constant(nv, 2.0 / min_len);
  const auto objective = [&](const Eigen::VectorXd& y) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < nv; ++j) s += m(j) * std::pow(y(j), p);
    return s;
  };
  const auto barrier = [&](const Eigen::VectorXd& y, double t) {
    const Eigen::VectorXd slack = A * y - Eigen::VectorXd::Ones(np);
    if (slack.minCoeff() <= 0.0 || y.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
    return t * objective(y) - slack.array().log().sum() - y.array().log().sum();
  };
  double t = 1.0;
  for (int outer = 0; outer < 80; ++outer) {
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd slack = A * x - Eigen::VectorXd::Ones(np);
      const Eigen::VectorXd inv_s = slack.cwiseInverse();
      Eigen::VectorXd grad(nv);
      Eigen::MatrixXd hess = A.transpose() * inv_s.cwiseProduct(inv_s).asDiagonal() * A;
      for (Eigen::Index j = 0; j < nv; ++j) {
        grad(j) = t * m(j) * p * std::pow(x(j), p - 1.0) - 1.0 / x(j);
        hess(j, j) += t * m(j) * p * (p - 1.0) * std::pow(x(j), p - 2.0) + 1.0 / (x(j) * x(j));
      }
      grad -= A.transpose() * inv_s;
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (decrement < 1e-18) break;
      double s = 1.0;
      const double f0 = barrier(x, t);
      while (s > 1e-20 && barrier(x + s * step, t) > f0 - 0.25 * s * decrement) s *= 0.5;
      x += s * step;
      if (decrement < 1e-24) break;
    }
    // Duality gap of the barrier central point is (np + nv) / t.
    if (static_cast<double>(np + nv) / t < 1e-13 * objective(x)) break;
    t *= 4.0;
  }
  return objective(x);
}

std::pair<double, double> minimize_2d(const std::function<double(double, double)>& f, double lo, double hi,
                                      int grid) {
  double bx = lo, by = lo, best = std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double x = lo + i * h, y = lo + j * h;
      const double v = f(x, y);
      if (v < best) {
        best = v;
        bx = x;
        by = y;
      }
    }
  }
  const auto golden = [](const std::function<double(double)>& g, double a, double b) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = g(c), fd = g(d);
    while (b - a > 1e-13) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - r * (b - a);
        fc = g(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + r * (b - a);
        fd = g(d);
      }
    }
    return 0.5 * (a + b);
  };
  double width = 2.0 * h;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double px = bx, py = by;
    bx = golden([&](double x) { return f(x, by); }, bx - width, bx + width);
    by = golden([&](double y) { return f(bx, y); }, by - width, by + width);
    if (std::abs(bx - px) + std::abs(by - py) < 1e-12) break;
  }
  return {bx, by};
}

}  // namespace oracle
