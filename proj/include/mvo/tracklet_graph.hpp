#pragma once

#include "mvo/tracklet.hpp"

#include <span>
#include <vector>

namespace mvo {

/// Max over co-observed frames of the (u,v) image distance, in pixels;
/// infinite if the tracklets never share a frame.
double tracklet_distance(const Tracklet& p, const Tracklet& q);

struct GraphEdge {
  int p = 0;  // vertex indices, p < q
  int q = 0;
  double weight = 1.0;
  double distance = 0.0;
};

/// Undirected k-nearest-neighbour graph over a fixed tracklet list. Vertex i is
/// tracklets[i]; edges are the union of every vertex's k-NN list.
class NeighborhoodGraph {
 public:
  NeighborhoodGraph() = default;
  NeighborhoodGraph(std::vector<TrackletId> ids, std::vector<GraphEdge> edges);

  int vertex_count() const { return static_cast<int>(ids_.size()); }
  TrackletId id(int v) const { return ids_[v]; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  /// Sorted neighbour vertex indices.
  const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }

 private:
  std::vector<TrackletId> ids_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Ties at equal distance go to the lower tracklet id.
NeighborhoodGraph build_graph(std::span<const Tracklet> tracklets, int k_nn);

/// Maximal connected components of the subgraph induced by `subset` (vertex
/// indices). Components are sorted internally and ordered by smallest vertex.
std::vector<std::vector<int>> connected_components(const NeighborhoodGraph& graph, std::span<const int> subset);

}  // namespace mvo
