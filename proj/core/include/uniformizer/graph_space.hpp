#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace uniformizer {

using VertexIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr VertexIndex kNoVertex = std::numeric_limits<VertexIndex>::max();
inline constexpr EdgeIndex kNoEdge = std::numeric_limits<EdgeIndex>::max();

struct Edge {
  VertexIndex u;
  VertexIndex v;
  double length;
};

struct Incidence {
  VertexIndex to;
  EdgeIndex edge;
};

/// Undirected graph with positive edge lengths and CSR adjacency.
///
/// `tie_rank` orders vertices for deterministic tie-breaking in shortest-path
/// trees; GraphSpace sets it to the lexicographic rank of the vertex ids.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(std::size_t num_vertices, std::vector<Edge> edges,
                std::vector<std::uint32_t> tie_rank = {});

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  double length(EdgeIndex e) const { return edges_[e].length; }

  std::span<const Incidence> neighbors(VertexIndex v) const {
    return {incidences_.data() + offsets_[v], incidences_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexIndex v) const { return offsets_[v + 1] - offsets_[v]; }

  VertexIndex other(EdgeIndex e, VertexIndex v) const {
    return edges_[e].u == v ? edges_[e].v : edges_[e].u;
  }

  std::uint32_t tie_rank(VertexIndex v) const { return tie_rank_[v]; }

  bool is_connected() const;

 private:
  std::size_t num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidences_;
  std::vector<std::uint32_t> tie_rank_;
};

/// Metric-measure graph: what every energy, solver and analysis routine consumes.
/// Base spaces and transformed spaces both expose one.
struct MeasuredGraph {
  WeightedGraph graph;
  std::vector<double> vertex_measure;
  std::vector<double> edge_mass;
  std::vector<char> boundary;

  std::size_t num_vertices() const noexcept { return graph.num_vertices(); }
  std::size_t num_edges() const noexcept { return graph.num_edges(); }
  bool is_boundary(VertexIndex v) const { return boundary[v] != 0; }
};

/// Length-share split of vertex measures onto edges:
/// m(e) = len(e) * (mu(x)/S(x) + mu(y)/S(y)), S(v) the total incident length.
std::vector<double> split_vertex_measure(const WeightedGraph& graph,
                                         std::span<const double> vertex_measure);

/// Finite weighted-graph model of a metric measure space with marked boundary.
///
/// Invariants (checked on construction, violations raise InvariantViolation):
/// connected, positive finite edge lengths, no self-loops or parallel edges,
/// non-empty boundary carrying zero measure, positive measure on the interior.
/// `frontier` marks the truncation frontier of generated unbounded domains.
class GraphSpace {
 public:
  struct VertexRecord {
    std::string id;
    double measure = 0.0;
    bool boundary = false;
    std::vector<double> coords;
    bool frontier = false;
  };
  struct EdgeRecord {
    std::string u;
    std::string v;
    double length = 0.0;
  };

  GraphSpace(std::vector<VertexRecord> vertices, std::vector<EdgeRecord> edges);

  std::size_t num_vertices() const noexcept { return ids_.size(); }
  std::size_t num_edges() const noexcept { return measured_.num_edges(); }

  const std::string& id(VertexIndex v) const { return ids_[v]; }
  std::optional<VertexIndex> find(const std::string& id) const;
  VertexIndex index_of(const std::string& id) const;

  const WeightedGraph& graph() const noexcept { return measured_.graph; }
  const MeasuredGraph& measured() const noexcept { return measured_; }

  double measure(VertexIndex v) const { return measured_.vertex_measure[v]; }
  bool is_boundary(VertexIndex v) const { return measured_.boundary[v] != 0; }
  bool is_frontier(VertexIndex v) const { return frontier_[v] != 0; }
  bool has_frontier() const noexcept { return has_frontier_; }
  std::span<const double> coords(VertexIndex v) const { return coords_[v]; }

  std::span<const VertexIndex> boundary_vertices() const noexcept { return boundary_list_; }
  std::span<const VertexIndex> interior_vertices() const noexcept { return interior_list_; }

  double total_interior_measure() const noexcept { return total_measure_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, VertexIndex> index_;
  std::vector<std::vector<double>> coords_;
  std::vector<char> frontier_;
  bool has_frontier_ = false;
  std::vector<VertexIndex> boundary_list_;
  std::vector<VertexIndex> interior_list_;
  double total_measure_ = 0.0;
  MeasuredGraph measured_;
};

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<VertexIndex> parent;
  std::vector<EdgeIndex> parent_edge;
};

struct DijkstraOptions {
  /// Vertices farther than this are left at infinity (search stops early).
  double radius = kInfinity;
  /// Optional vertex mask; masked-out vertices are never entered.
  std::span<const char> allowed = {};
  /// Optional per-edge weights replacing the graph lengths. Infinite weights
  /// disable the edge.
  std::span<const double> weights = {};
};

/// Multi-source Dijkstra. Equal-distance ties choose the parent of smallest tie rank.
ShortestPathTree shortest_paths(const WeightedGraph& graph,
                                std::span<const VertexIndex> sources,
                                const DijkstraOptions& options = {});

std::vector<double> distances_from(const WeightedGraph& graph, VertexIndex source,
                                   double radius = kInfinity);

/// Edges of the tree path from a source to `target`, ordered source to target.
std::vector<EdgeIndex> tree_path_edges(const ShortestPathTree& tree, VertexIndex target);

double path_distance(const GraphSpace& space, VertexIndex x, VertexIndex y);
double path_distance(const WeightedGraph& graph, VertexIndex x, VertexIndex y);

/// d_Omega(v) = distance to the nearest boundary vertex.
std::vector<double> boundary_distance(const GraphSpace& space);

/// Band index of a boundary distance: 0 for d <= 1, n for 2^(n-1) < d <= 2^n.
int band_index(double d);

struct BandDecomposition {
  /// -1 for boundary vertices.
  std::vector<int> band_of;
  std::vector<double> band_measure;

  int max_band() const noexcept { return static_cast<int>(band_measure.size()) - 1; }
  double measure(int n) const {
    return n >= 0 && n < static_cast<int>(band_measure.size()) ? band_measure[n] : 0.0;
  }
};

BandDecomposition bands(const GraphSpace& space, std::span<const double> d_omega);
BandDecomposition bands(const GraphSpace& space);

/// Worst adjacent-band measure ratio max(mu_n/mu_{n+1}, mu_{n+1}/mu_n) over
/// bands [first, last); 1 when there are fewer than two bands.
double band_comparability(const BandDecomposition& bands, int first = 0, int last = -1);

/// Open ball { v : d(center, v) < r }, sorted by vertex index.
std::vector<VertexIndex> metric_ball(const WeightedGraph& graph, VertexIndex center, double r);
std::vector<VertexIndex> metric_ball(const GraphSpace& space, VertexIndex center, double r);

}  // namespace uniformizer
