#include "maxsurv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace maxsurv {
namespace {

// Dinic's algorithm on real capacities. Residuals below `eps_` count as
// saturated.
class Dinic {
 public:
  explicit Dinic(std::size_t nodes) : adj_(nodes), level_(nodes), next_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double cap) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap, cap});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0.0, 0.0});
    return edges_.size() - 2;
  }

  double flow_on(std::size_t edge) const { return edges_[edge].cap - edges_[edge].residual; }

  double run(std::size_t source, std::size_t sink, double eps) {
    eps_ = eps;
    double total = 0.0;
    while (bfs(source, sink)) {
      std::fill(next_.begin(), next_.end(), 0);
      for (;;) {
        const double pushed = dfs(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Edge {
    std::size_t to;
    double residual;
    double cap;
  };

  bool bfs(std::size_t source, std::size_t sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (std::size_t e : adj_[v]) {
        const Edge& edge = edges_[e];
        if (edge.residual > eps_ && level_[edge.to] < 0) {
          level_[edge.to] = level_[v] + 1;
          q.push(edge.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double dfs(std::size_t v, std::size_t sink, double limit) {
    if (v == sink) return limit;
    for (std::size_t& k = next_[v]; k < adj_[v].size(); ++k) {
      const std::size_t e = adj_[v][k];
      Edge& edge = edges_[e];
      if (edge.residual <= eps_ || level_[edge.to] != level_[v] + 1) continue;
      const double pushed = dfs(edge.to, sink, std::min(limit, edge.residual));
      if (pushed > 0.0) {
        edge.residual -= pushed;
        edges_[e ^ 1].residual += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
  double eps_ = 0.0;
};

}  // namespace

FlowResult max_flow(const FlowInstance& instance) {
  const std::size_t n = instance.supplies.size();
  const std::size_t m = instance.demands.size();
  if (instance.capacities.size() != n) throw InputError("capacity matrix needs one row per device");
  double scale = 0.0;
  for (double s : instance.supplies) {
    if (!(s >= 0.0)) throw InputError("supplies must be nonnegative");
    scale = std::max(scale, s);
  }
  for (double d : instance.demands) {
    if (!(d >= 0.0)) throw InputError("demands must be nonnegative");
    scale = std::max(scale, d);
  }
  for (const auto& row : instance.capacities) {
    if (row.size() != m) throw InputError("capacity matrix needs one column per segment");
    for (double c : row) {
      if (!(c >= 0.0)) throw InputError("capacities must be nonnegative");
    }
  }

  const std::size_t source = 0;
  const std::size_t sink = n + m + 1;
  Dinic graph(n + m + 2);
  for (std::size_t i = 0; i < n; ++i) graph.add_edge(source, 1 + i, instance.supplies[i]);
  std::vector<std::vector<std::size_t>> edge_ids(n, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      edge_ids[i][k] = graph.add_edge(1 + i, 1 + n + k, instance.capacities[i][k]);
    }
  }
  for (std::size_t k = 0; k < m; ++k) graph.add_edge(1 + n + k, sink, instance.demands[k]);

  FlowResult result;
  result.value = graph.run(source, sink, scale * 1e-15);
  result.flows.assign(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) result.flows[i][k] = graph.flow_on(edge_ids[i][k]);
  }
  return result;
}

std::vector<SegmentWindow> windows_until(const ReferenceSignal& signal, Hours t) {
  std::vector<SegmentWindow> out;
  for (std::size_t k = 0; k < signal.segment_count(); ++k) {
    const Hours a = signal.segment_start(k);
    const Hours b = std::min(signal.segment_end(k), t);
    if (b <= a) break;
    out.push_back({a, b, signal.values()[k]});
  }
  return out;
}

FlowInstance build_flow_instance(std::span<const Device> fleet, const FleetState& initial,
                                 std::span<const SegmentWindow> windows) {
  if (initial.size() != fleet.size()) throw InputError("initial state does not match the fleet");
  FlowInstance inst;
  inst.supplies.reserve(fleet.size());
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    inst.supplies.push_back(fleet[i].max_power * initial[i]);
  }
  for (const SegmentWindow& w : windows) inst.demands.push_back(w.power * (w.end - w.start));
  inst.capacities.assign(fleet.size(), std::vector<double>(windows.size()));
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    for (std::size_t k = 0; k < windows.size(); ++k) {
      inst.capacities[i][k] = fleet[i].max_power * (windows[k].end - windows[k].start);
    }
  }
  return inst;
}

FeasibilityReport check_feasibility(std::span<const Device> fleet, const FleetState& initial,
                                    const ReferenceSignal& signal, Hours t) {
  validate(fleet);
  if (!(t >= 0.0)) throw InputError("feasibility horizon must be nonnegative");
  FeasibilityReport report;
  report.horizon = t;
  report.windows = windows_until(signal, t);
  const FlowInstance inst = build_flow_instance(fleet, initial, report.windows);
  for (double d : inst.demands) report.demand += d;
  report.certificate = max_flow(inst);
  report.flow = report.certificate.value;
  report.feasible = report.flow >= report.demand - kFlowSlack * std::max(1.0, report.demand);
  report.unmet.resize(report.windows.size());
  for (std::size_t k = 0; k < report.windows.size(); ++k) {
    double in = 0.0;
    for (const auto& row : report.certificate.flows) in += row[k];
    report.unmet[k] = std::max(0.0, inst.demands[k] - in);
  }
  return report;
}

bool feasible(std::span<const Device> fleet, const FleetState& initial,
              const ReferenceSignal& signal, Hours t) {
  return check_feasibility(fleet, initial, signal, t).feasible;
}

Hours oracle_time_to_failure(std::span<const Device> fleet, const FleetState& initial,
                             const ReferenceSignal& signal, Hours tolerance) {
  if (!(tolerance > 0.0)) throw InputError("bisection tolerance must be positive");
  const Hours horizon = signal.horizon();
  if (feasible(fleet, initial, signal, horizon)) return horizon;
  Hours lo = 0.0;
  Hours hi = horizon;
  while (hi - lo > tolerance) {
    const Hours mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (feasible(fleet, initial, signal, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace maxsurv
