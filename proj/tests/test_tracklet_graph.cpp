#include "mvo/kernels.hpp"
#include "mvo/tracklet_graph.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace mvo;

namespace {

std::optional<StereoObservation> at(double u, double v) { return StereoObservation{u, v, 10.0}; }

// Full scan oracle for one vertex.
std::vector<kernels::Neighbor> brute_knn(const std::vector<Tracklet>& ts, int i, int k) {
  std::vector<kernels::Neighbor> all;
  for (int j = 0; j < static_cast<int>(ts.size()); ++j) {
    if (j == i) continue;
    const double d = tracklet_distance(ts[i], ts[j]);
    if (std::isfinite(d)) all.push_back({j, d});
  }
  std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : ts[a.index].id < ts[b.index].id;
  });
  if (static_cast<int>(all.size()) > k) all.resize(k);
  return all;
}

int find(std::vector<int>& parent, int v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

}  // namespace

TEST_CASE("tracklet distance is the max over co-observed frames") {
  const StereoIntrinsics K;
  const Tracklet a = *make_tracklet(K, 1, 0, {at(0, 0), at(0, 0), at(0, 0), std::nullopt, at(0, 0)});
  const Tracklet b = *make_tracklet(K, 2, 1, {at(3, 4), at(1, 0), at(100, 100), at(0, 1)});
  CHECK(tracklet_distance(a, b) == doctest::Approx(5.0));  // frame 3 is a gap in a
  CHECK(tracklet_distance(a, b) == tracklet_distance(b, a));

  const Tracklet c = *make_tracklet(K, 3, 10, {at(0, 0), at(0, 0)});
  CHECK(std::isinf(tracklet_distance(a, c)));
}

TEST_CASE("k-NN lists match a full scan") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ts = testing::random_tracklets(gen, 60, 8);
    for (int k : {1, 3, 5}) {
      const auto knn = kernels::nearest_neighbors_serial(ts, k);
      for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
        const auto oracle = brute_knn(ts, i, k);
        REQUIRE(knn[i].size() == oracle.size());
        for (std::size_t n = 0; n < oracle.size(); ++n) {
          CHECK(knn[i][n].index == oracle[n].index);
          CHECK(knn[i][n].distance == oracle[n].distance);
        }
      }
    }
  }
}

TEST_CASE("graph edges are the symmetric union of k-NN lists") {
  std::mt19937_64 gen(22);
  const auto ts = testing::random_tracklets(gen, 80, 10);
  const NeighborhoodGraph g = build_graph(ts, 3);
  CHECK(g.vertex_count() == static_cast<int>(ts.size()));

  std::set<std::pair<int, int>> expected;
  for (int i = 0; i < static_cast<int>(ts.size()); ++i) {
    for (const auto& n : brute_knn(ts, i, 3)) expected.insert(std::minmax(i, n.index));
  }
  std::set<std::pair<int, int>> got;
  for (const GraphEdge& e : g.edges()) {
    CHECK(e.p < e.q);
    CHECK(e.weight == 1.0);
    CHECK(e.distance == tracklet_distance(ts[e.p], ts[e.q]));
    got.insert({e.p, e.q});
  }
  CHECK(got == expected);
  CHECK(got.size() == g.edges().size());
  for (int v = 0; v < g.vertex_count(); ++v) {
    for (int w : g.neighbors(v)) CHECK(std::binary_search(g.neighbors(w).begin(), g.neighbors(w).end(), v));
  }
}

TEST_CASE("components agree with union-find over the induced subgraph") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ts = testing::random_tracklets(gen, 50, 12);
    const NeighborhoodGraph g = build_graph(ts, 2);
    std::vector<int> subset;
    std::bernoulli_distribution keep(0.6);
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (keep(gen)) subset.push_back(v);
    }
    std::vector<int> parent(g.vertex_count());
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<char> in(g.vertex_count(), 0);
    for (int v : subset) in[v] = 1;
    for (const GraphEdge& e : g.edges()) {
      if (in[e.p] && in[e.q]) parent[find(parent, e.p)] = find(parent, e.q);
    }
    const auto comps = connected_components(g, subset);
    std::size_t total = 0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      CHECK(std::is_sorted(comps[c].begin(), comps[c].end()));
      if (c > 0) CHECK(comps[c - 1].front() < comps[c].front());
      for (int v : comps[c]) CHECK(find(parent, v) == find(parent, comps[c].front()));
      total += comps[c].size();
    }
    CHECK(total == subset.size());
    std::set<int> roots;
    for (int v : subset) roots.insert(find(parent, v));
    CHECK(roots.size() == comps.size());
  }
}

TEST_CASE("graph construction rejects k_nn < 1") {
  CHECK_THROWS(build_graph({}, 0));
  CHECK(build_graph({}, 3).vertex_count() == 0);
}
