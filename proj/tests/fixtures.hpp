#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "uniformizer/graph_space.hpp"

namespace fixtures {

using uniformizer::GraphSpace;

/// Space from (id, measure, boundary) triples and (u, v, length) edges.
inline GraphSpace space(const std::vector<std::tuple<std::string, double, bool>>& vs,
                        const std::vector<std::tuple<std::string, std::string, double>>& es) {
  std::vector<GraphSpace::VertexRecord> vertices;
  for (const auto& [id, mu, b] : vs) vertices.push_back({id, mu, b, {}, false});
  std::vector<GraphSpace::EdgeRecord> edges;
  for (const auto& [u, v, l] : es) edges.push_back({u, v, l});
  return GraphSpace(std::move(vertices), std::move(edges));
}

/// Path b - v1 - ... - vn with unit lengths; b is the only boundary vertex.
inline GraphSpace path(int n, double len = 1.0) {
  std::vector<std::tuple<std::string, double, bool>> vs{{"b", 0.0, true}};
  std::vector<std::tuple<std::string, std::string, double>> es;
  std::string prev = "b";
  for (int i = 1; i <= n; ++i) {
    const std::string id = "v" + std::to_string(i);
    vs.emplace_back(id, 1.0, false);
    es.emplace_back(prev, id, len);
    prev = id;
  }
  return space(vs, es);
}

}  // namespace fixtures
