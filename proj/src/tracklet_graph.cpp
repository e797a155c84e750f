#include "mvo/tracklet_graph.hpp"

#include "mvo/kernels.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace mvo {

double tracklet_distance(const Tracklet& p, const Tracklet& q) { return kernels::tracklet_distance(p, q); }

NeighborhoodGraph::NeighborhoodGraph(std::vector<TrackletId> ids, std::vector<GraphEdge> edges)
    : ids_(std::move(ids)), edges_(std::move(edges)), adjacency_(ids_.size()) {
  for (const GraphEdge& e : edges_) {
    adjacency_[e.p].push_back(e.q);
    adjacency_[e.q].push_back(e.p);
  }
  for (auto& a : adjacency_) std::sort(a.begin(), a.end());
}

NeighborhoodGraph build_graph(std::span<const Tracklet> tracklets, int k_nn) {
  if (k_nn < 1) throw std::invalid_argument("k_nn must be >= 1");
  const auto knn = kernels::nearest_neighbors_parallel(tracklets, k_nn);
  std::map<std::pair<int, int>, double> unique;
  for (int i = 0; i < static_cast<int>(knn.size()); ++i) {
    for (const kernels::Neighbor& n : knn[i]) unique.emplace(std::minmax(i, n.index), n.distance);
  }
  std::vector<GraphEdge> edges;
  edges.reserve(unique.size());
  for (const auto& [key, d] : unique) edges.push_back({key.first, key.second, 1.0, d});
  std::vector<TrackletId> ids;
  ids.reserve(tracklets.size());
  for (const Tracklet& t : tracklets) ids.push_back(t.id);
  return NeighborhoodGraph(std::move(ids), std::move(edges));
}

std::vector<std::vector<int>> connected_components(const NeighborhoodGraph& graph, std::span<const int> subset) {
  std::vector<char> member(graph.vertex_count(), 0), seen(graph.vertex_count(), 0);
  for (int v : subset) member[v] = 1;
  std::vector<int> order(subset.begin(), subset.end());
  std::sort(order.begin(), order.end());

  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  for (int start : order) {
    if (seen[start]) continue;
    std::vector<int> comp;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int w : graph.neighbors(v)) {
        if (member[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace mvo
