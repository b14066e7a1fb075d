#include "uniformizer/graph_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <utility>

#include "uniformizer/error.hpp"

namespace uniformizer {

WeightedGraph::WeightedGraph(std::size_t num_vertices, std::vector<Edge> edges,
                             std::vector<std::uint32_t> tie_rank)
    : num_vertices_(num_vertices), edges_(std::move(edges)), tie_rank_(std::move(tie_rank)) {
  if (tie_rank_.empty()) {
    tie_rank_.resize(num_vertices_);
    std::iota(tie_rank_.begin(), tie_rank_.end(), 0u);
  }
  if (tie_rank_.size() != num_vertices_) {
    throw PreconditionError("tie rank size does not match vertex count");
  }
  std::vector<std::size_t> degree(num_vertices_, 0);
  for (const auto& e : edges_) {
    if (e.u >= num_vertices_ || e.v >= num_vertices_) {
      throw PreconditionError("edge endpoint out of range");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw PreconditionError("edge length must be positive and finite");
    }
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(num_vertices_ + 1, 0);
  for (std::size_t v = 0; v < num_vertices_; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  incidences_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeIndex e = 0; e < edges_.size(); ++e) {
    incidences_[cursor[edges_[e].u]++] = {edges_[e].v, e};
    incidences_[cursor[edges_[e].v]++] = {edges_[e].u, e};
  }
}

bool WeightedGraph::is_connected() const {
  if (num_vertices_ == 0) return true;
  std::vector<char> seen(num_vertices_, 0);
  std::vector<VertexIndex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const VertexIndex v = stack.back();
    stack.pop_back();
    for (const auto& inc : neighbors(v)) {
      if (!seen[inc.to]) {
        seen[inc.to] = 1;
        ++count;
        stack.push_back(inc.to);
      }
    }
  }
  return count == num_vertices_;
}

std::vector<double> split_vertex_measure(const WeightedGraph& graph,
                                         std::span<const double> vertex_measure) {
  std::vector<double> incident(graph.num_vertices(), 0.0);
  for (const auto& e : graph.edges()) {
    incident[e.u] += e.length;
    incident[e.v] += e.length;
  }
  std::vector<double> mass(graph.num_edges(), 0.0);
  for (EdgeIndex i = 0; i < graph.num_edges(); ++i) {
    const auto& e = graph.edge(i);
    mass[i] = e.length * (vertex_measure[e.u] / incident[e.u] + vertex_measure[e.v] / incident[e.v]);
  }
  return mass;
}

GraphSpace::GraphSpace(std::vector<VertexRecord> vertices, std::vector<EdgeRecord> edges) {
  using Section = InvariantViolation::Section;
  const std::size_t n = vertices.size();
  if (n == 0) throw InvariantViolation(Section::global, 0, "domain has no vertices");

  ids_.reserve(n);
  coords_.reserve(n);
  frontier_.assign(n, 0);
  std::vector<double> measure(n);
  std::vector<char> boundary(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = vertices[i];
    if (rec.id.empty()) throw InvariantViolation(Section::vertices, i, "empty vertex id");
    if (!index_.emplace(rec.id, static_cast<VertexIndex>(i)).second) {
      throw InvariantViolation(Section::vertices, i, "duplicate vertex id '" + rec.id + "'");
    }
    if (!std::isfinite(rec.measure) || rec.measure < 0.0) {
      throw InvariantViolation(Section::vertices, i, "measure must be finite and non-negative");
    }
    if (rec.boundary && rec.measure != 0.0) {
      throw InvariantViolation(Section::vertices, i, "boundary vertex '" + rec.id + "' must have zero measure");
    }
    if (!rec.boundary && !(rec.measure > 0.0)) {
      throw InvariantViolation(Section::vertices, i, "interior vertex '" + rec.id + "' must have positive measure");
    }
    measure[i] = rec.measure;
    boundary[i] = rec.boundary ? 1 : 0;
    frontier_[i] = rec.frontier ? 1 : 0;
    has_frontier_ = has_frontier_ || rec.frontier;
    ids_.push_back(std::move(rec.id));
    coords_.push_back(std::move(rec.coords));
  }

  std::vector<Edge> edge_list;
  edge_list.reserve(edges.size());
  std::set<std::pair<VertexIndex, VertexIndex>> seen_pairs;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& rec = edges[i];
    const auto u = index_.find(rec.u);
    const auto v = index_.find(rec.v);
    if (u == index_.end()) throw InvariantViolation(Section::edges, i, "unknown vertex id '" + rec.u + "'");
    if (v == index_.end()) throw InvariantViolation(Section::edges, i, "unknown vertex id '" + rec.v + "'");
    if (u->second == v->second) throw InvariantViolation(Section::edges, i, "self-loop at '" + rec.u + "'");
    if (!(rec.length > 0.0) || !std::isfinite(rec.length)) {
      throw InvariantViolation(Section::edges, i, "edge length must be positive and finite");
    }
    const auto key = std::minmax(u->second, v->second);
    if (!seen_pairs.insert(key).second) {
      throw InvariantViolation(Section::edges, i, "parallel edge between '" + rec.u + "' and '" + rec.v + "'");
    }
    edge_list.push_back({u->second, v->second, rec.length});
  }

  std::vector<VertexIndex> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](VertexIndex a, VertexIndex b) { return ids_[a] < ids_[b]; });
  std::vector<std::uint32_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<std::uint32_t>(r);

  WeightedGraph graph(n, std::move(edge_list), std::move(rank));
  if (!graph.is_connected()) throw InvariantViolation(Section::global, 0, "graph is not connected");

  for (VertexIndex v = 0; v < n; ++v) {
    if (boundary[v]) {
      boundary_list_.push_back(v);
    } else {
      interior_list_.push_back(v);
      total_measure_ += measure[v];
    }
  }
  if (boundary_list_.empty()) throw InvariantViolation(Section::global, 0, "boundary is empty");

  measured_.edge_mass = split_vertex_measure(graph, measure);
  measured_.graph = std::move(graph);
  measured_.vertex_measure = std::move(measure);
  measured_.boundary = std::move(boundary);
}

std::optional<VertexIndex> GraphSpace::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VertexIndex GraphSpace::index_of(const std::string& id) const {
  const auto found = find(id);
  if (!found) throw PreconditionError("unknown vertex id '" + id + "'");
  return *found;
}

ShortestPathTree shortest_paths(const WeightedGraph& graph, std::span<const VertexIndex> sources,
                                const DijkstraOptions& options) {
  const std::size_t n = graph.num_vertices();
  ShortestPathTree tree;
  tree.dist.assign(n, kInfinity);
  tree.parent.assign(n, kNoVertex);
  tree.parent_edge.assign(n, kNoEdge);
  std::vector<char> done(n, 0);

  using Item = std::pair<double, std::uint32_t>;  // (distance, tie rank)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<VertexIndex> by_rank(n);
  for (VertexIndex v = 0; v < n; ++v) by_rank[graph.tie_rank(v)] = v;

  const bool masked = !options.allowed.empty();
  for (const VertexIndex s : sources) {
    if (masked && !options.allowed[s]) continue;
    if (tree.dist[s] != 0.0) {
      tree.dist[s] = 0.0;
      heap.emplace(0.0, graph.tie_rank(s));
    }
  }
  const bool weighted = !options.weights.empty();
  while (!heap.empty()) {
    const auto [d, rank] = heap.top();
    heap.pop();
    const VertexIndex v = by_rank[rank];
    if (done[v] || d > tree.dist[v]) continue;
    if (d > options.radius) break;
    done[v] = 1;
    for (const auto& inc : graph.neighbors(v)) {
      const VertexIndex w = inc.to;
      if (done[w] || (masked && !options.allowed[w])) continue;
      const double len = weighted ? options.weights[inc.edge] : graph.length(inc.edge);
      if (!(len < kInfinity)) continue;
      const double nd = d + len;
      if (nd < tree.dist[w]) {
        tree.dist[w] = nd;
        tree.parent[w] = v;
        tree.parent_edge[w] = inc.edge;
        heap.emplace(nd, graph.tie_rank(w));
      } else if (nd == tree.dist[w] && tree.parent[w] != kNoVertex &&
                 graph.tie_rank(v) < graph.tie_rank(tree.parent[w])) {
        tree.parent[w] = v;
        tree.parent_edge[w] = inc.edge;
      }
    }
  }
  if (options.radius < kInfinity) {
    for (VertexIndex v = 0; v < n; ++v) {
      if (tree.dist[v] > options.radius) {
        tree.dist[v] = kInfinity;
        tree.parent[v] = kNoVertex;
        tree.parent_edge[v] = kNoEdge;
      }
    }
  }
  return tree;
}

std::vector<double> distances_from(const WeightedGraph& graph, VertexIndex source, double radius) {
  const VertexIndex sources[] = {source};
  DijkstraOptions options;
  options.radius = radius;
  return shortest_paths(graph, sources, options).dist;
}

std::vector<EdgeIndex> tree_path_edges(const ShortestPathTree& tree, VertexIndex target) {
  std::vector<EdgeIndex> path;
  if (!(tree.dist[target] < kInfinity)) return path;
  for (VertexIndex v = target; tree.parent[v] != kNoVertex; v = tree.parent[v]) {
    path.push_back(tree.parent_edge[v]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_distance(const WeightedGraph& graph, VertexIndex x, VertexIndex y) {
  if (x >= graph.num_vertices() || y >= graph.num_vertices()) {
    throw PreconditionError("vertex index out of range");
  }
  if (x == y) return 0.0;
  const double d = distances_from(graph, x)[y];
  if (!(d < kInfinity)) throw UnreachableError("unreachable: vertices lie in different components");
  return d;
}

double path_distance(const GraphSpace& space, VertexIndex x, VertexIndex y) {
  return path_distance(space.graph(), x, y);
}

std::vector<double> boundary_distance(const GraphSpace& space) {
  const auto tree = shortest_paths(space.graph(), space.boundary_vertices());
  for (const double d : tree.dist) {
    if (!(d < kInfinity)) throw UnreachableError("unreachable: vertex not connected to the boundary");
  }
  return tree.dist;
}

int band_index(double d) {
  // Relative slack so that accumulated lattice distances such as 64 * (1/3) * 3
  // stay in the band of the exact dyadic value.
  constexpr double kSlack = 1.0 + 1e-9;
  if (d <= kSlack) return 0;
  int n = 1;
  double upper = 2.0;
  while (upper * kSlack < d) {
    upper *= 2.0;
    ++n;
  }
  return n;
}

BandDecomposition bands(const GraphSpace& space, std::span<const double> d_omega) {
  BandDecomposition out;
  out.band_of.assign(space.num_vertices(), -1);
  for (const VertexIndex v : space.interior_vertices()) {
    const int n = band_index(d_omega[v]);
    out.band_of[v] = n;
    if (static_cast<int>(out.band_measure.size()) <= n) out.band_measure.resize(n + 1, 0.0);
    out.band_measure[n] += space.measure(v);
  }
  return out;
}

BandDecomposition bands(const GraphSpace& space) {
  const auto d = boundary_distance(space);
  return bands(space, d);
}

double band_comparability(const BandDecomposition& bands, int first, int last) {
  if (last < 0) last = bands.max_band();
  double worst = 1.0;
  for (int n = first; n < last; ++n) {
    const double a = bands.measure(n);
    const double b = bands.measure(n + 1);
    if (!(a > 0.0) || !(b > 0.0)) return kInfinity;
    worst = std::max({worst, a / b, b / a});
  }
  return worst;
}

std::vector<VertexIndex> metric_ball(const WeightedGraph& graph, VertexIndex center, double r) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  const auto dist = distances_from(graph, center, r);
  std::vector<VertexIndex> ball;
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    if (dist[v] < r) ball.push_back(v);
  }
  return ball;
}

std::vector<VertexIndex> metric_ball(const GraphSpace& space, VertexIndex center, double r) {
  return metric_ball(space.graph(), center, r);
}

}  // namespace uniformizer
