#pragma once

#include <vector>

namespace mvo {

/// Dinic max-flow on a small directed graph with real capacities. After
/// solve(), in_source_set(v) reports the side of the minimum cut.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);

  int source() const { return source_; }
  int sink() const { return sink_; }

  void add_edge(int from, int to, double capacity, double reverse_capacity = 0.0);
  /// Adds terminal capacities: `to_sink` is paid if v ends on the source side,
  /// `from_source` if it ends on the sink side.
  void add_terminal(int v, double from_source, double to_sink);

  double solve();
  bool in_source_set(int v) const { return reachable_[v] != 0; }

 private:
  struct Arc {
    int to;
    int rev;
    double cap;
  };
  bool bfs();
  double dfs(int v, double pushed);

  int source_, sink_;
  std::vector<std::vector<Arc>> graph_;
  std::vector<int> level_, next_;
  std::vector<char> reachable_;
};

}  // namespace mvo
