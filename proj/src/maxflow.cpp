#include "mvo/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace mvo {

namespace {
constexpr double kEps = 1e-12;
}

MaxFlow::MaxFlow(int nodes) : source_(nodes), sink_(nodes + 1), graph_(nodes + 2) {}

void MaxFlow::add_edge(int from, int to, double capacity, double reverse_capacity) {
  graph_[from].push_back({to, static_cast<int>(graph_[to].size()), capacity});
  graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, reverse_capacity});
}

void MaxFlow::add_terminal(int v, double from_source, double to_sink) {
  // Only the difference matters for the cut.
  const double m = std::min(from_source, to_sink);
  from_source -= m;
  to_sink -= m;
  if (from_source > 0) add_edge(source_, v, from_source);
  if (to_sink > 0) add_edge(v, sink_, to_sink);
}

bool MaxFlow::bfs() {
  level_.assign(graph_.size(), -1);
  std::queue<int> q;
  level_[source_] = 0;
  q.push(source_);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const Arc& a : graph_[v]) {
      if (a.cap > kEps && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        q.push(a.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

double MaxFlow::dfs(int v, double pushed) {
  if (v == sink_) return pushed;
  for (int& i = next_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
    Arc& a = graph_[v][i];
    if (a.cap <= kEps || level_[a.to] != level_[v] + 1) continue;
    const double got = dfs(a.to, std::min(pushed, a.cap));
    if (got > kEps) {
      a.cap -= got;
      graph_[a.to][a.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve() {
  double flow = 0.0;
  while (bfs()) {
    next_.assign(graph_.size(), 0);
    while (true) {
      const double f = dfs(source_, std::numeric_limits<double>::infinity());
      if (f <= kEps) break;
      flow += f;
    }
  }
  // residual reachability from the source
  reachable_.assign(graph_.size(), 0);
  std::queue<int> q;
  reachable_[source_] = 1;
  q.push(source_);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const Arc& a : graph_[v]) {
      if (a.cap > kEps && !reachable_[a.to]) {
        reachable_[a.to] = 1;
        q.push(a.to);
      }
    }
  }
  return flow;
}

}  // namespace mvo
