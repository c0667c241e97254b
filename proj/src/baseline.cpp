#include "ueassign/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "ueassign/error.hpp"

namespace ueassign::baseline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string od_name(NodeIndex r, NodeIndex s) {
  return "(" + std::to_string(r + 1) + "," + std::to_string(s + 1) + ")";
}

// Derivative of the Beckmann objective along x + lambda * d.
double directional_derivative(const Network& net, std::span<const double> x,
                              std::span<const double> d, double lambda) {
  double sum = 0.0;
  for (LinkIndex a = 0; a < x.size(); ++a) {
    if (d[a] == 0.0) continue;
    sum += travel_time(net.link(a), std::max(0.0, x[a] + lambda * d[a])) * d[a];
  }
  return sum;
}

}  // namespace

bool ShortestPathTree::reachable(NodeIndex node) const {
  return node < distance.size() && std::isfinite(distance[node]);
}

std::vector<LinkIndex> ShortestPathTree::path_to(const Network& network, NodeIndex node) const {
  if (!reachable(node))
    throw InfeasibleError("node " + std::to_string(node + 1) + " is unreachable from " +
                          std::to_string(source + 1));
  std::vector<LinkIndex> links;
  for (NodeIndex v = node; v != source;) {
    const LinkIndex a = *predecessor[v];
    links.push_back(a);
    v = network.link(a).tail;
  }
  std::reverse(links.begin(), links.end());
  return links;
}

ShortestPathTree dijkstra(const Network& network, std::span<const double> lengths,
                          NodeIndex source) {
  if (lengths.size() != network.link_count())
    throw DomainError("length vector does not match link count");
  if (source >= network.node_count()) throw DomainError("source outside the network");

  ShortestPathTree tree;
  tree.source = source;
  tree.distance.assign(network.node_count(), kInf);
  tree.predecessor.assign(network.node_count(), std::nullopt);
  tree.distance[source] = 0.0;

  using Entry = std::pair<double, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.emplace(0.0, source);
  std::vector<bool> settled(network.node_count(), false);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = true;
    for (LinkIndex a : network.out_links(u)) {
      const NodeIndex v = network.link(a).head;
      if (v == source) continue;
      const double nd = d + lengths[a];
      if (nd < tree.distance[v]) {
        tree.distance[v] = nd;
        tree.predecessor[v] = a;
        heap.emplace(nd, v);
      } else if (nd == tree.distance[v] && a < *tree.predecessor[v]) {
        tree.predecessor[v] = a;
      }
    }
  }
  return tree;
}

FlowVector all_or_nothing(const Network& network, std::span<const double> lengths,
                          const DemandTable& demands) {
  FlowVector y(network.link_count(), 0.0);
  for (NodeIndex r : demands.origins()) {
    const ShortestPathTree tree = dijkstra(network, lengths, r);
    for (const OdDemand& e : demands.from_origin(r)) {
      if (!tree.reachable(e.destination))
        throw InfeasibleError("OD pair " + od_name(r, e.destination) + " is not connected");
      for (LinkIndex a : tree.path_to(network, e.destination)) y[a] += e.demand;
    }
  }
  return y;
}

double shortest_path_travel_time(const Network& network, std::span<const double> lengths,
                                 const DemandTable& demands) {
  double total = 0.0;
  for (NodeIndex r : demands.origins()) {
    const ShortestPathTree tree = dijkstra(network, lengths, r);
    for (const OdDemand& e : demands.from_origin(r)) {
      if (!tree.reachable(e.destination))
        throw InfeasibleError("OD pair " + od_name(r, e.destination) + " is not connected");
      total += e.demand * tree.distance[e.destination];
    }
  }
  return total;
}

std::optional<double> relative_gap(const Problem& problem, std::span<const double> flows) {
  const std::vector<double> times = travel_times(problem.network, flows);
  double total = 0.0;
  for (LinkIndex a = 0; a < flows.size(); ++a) total += times[a] * flows[a];
  if (total <= 0.0) return std::nullopt;
  const double shortest = shortest_path_travel_time(problem.network, times, problem.demands);
  return (total - shortest) / total;
}

SolutionReport frank_wolfe(const Problem& problem, const FrankWolfeConfig& config,
                           const IterationObserver& observer) {
  validate_problem(problem);
  const Network& net = problem.network;
  SolutionReport report;
  report.algorithm = "fw";

  FlowVector x = all_or_nothing(net, net.free_flow_times(), problem.demands);
  std::vector<double> times = travel_times(net, x);

  for (std::size_t n = 1; n <= config.max_iterations; ++n) {
    report.iterations = n;
    const FlowVector y = all_or_nothing(net, times, problem.demands);

    double total = 0.0, shortest = 0.0;
    for (LinkIndex a = 0; a < x.size(); ++a) {
      total += times[a] * x[a];
      shortest += times[a] * y[a];
    }
    const double gap = total > 0.0 ? (total - shortest) / total : 0.0;
    if (gap <= config.rgap_target) {
      report.converged = true;
      if (observer) observer(IterationRecord{n, 0.0, x, times});
      break;
    }

    std::vector<double> d(x.size());
    for (LinkIndex a = 0; a < x.size(); ++a) d[a] = y[a] - x[a];

    double lambda = 1.0;
    if (directional_derivative(net, x, d, 1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (std::size_t k = 0; k < config.max_bisections && hi - lo > config.line_search_tolerance;
           ++k) {
        const double mid = 0.5 * (lo + hi);
        if (directional_derivative(net, x, d, mid) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      lambda = 0.5 * (lo + hi);
    }

    double delta = 0.0;
    for (LinkIndex a = 0; a < x.size(); ++a) {
      const double next = std::max(0.0, x[a] + lambda * d[a]);
      delta += std::abs(next - x[a]);
      x[a] = next;
    }
    report.epsilon_history.push_back(delta);
    times = travel_times(net, x);
    if (observer) observer(IterationRecord{n, delta, x, times});
  }

  report.flows = std::move(x);
  report.travel_times = std::move(times);
  report.lengths = report.travel_times;
  report.beckmann = beckmann_objective(net, report.flows);
  report.rgap = relative_gap(problem, report.flows);
  return report;
}

std::vector<PathRecord> enumerate_simple_paths(const Network& network,
                                               std::span<const double> times, NodeIndex origin,
                                               NodeIndex destination) {
  std::vector<PathRecord> paths;
  std::vector<bool> on_path(network.node_count(), false);
  PathRecord current;
  current.nodes.push_back(origin);
  on_path[origin] = true;

  std::function<void(NodeIndex)> extend = [&](NodeIndex u) {
    if (u == destination) {
      paths.push_back(current);
      return;
    }
    for (LinkIndex a : network.out_links(u)) {
      const NodeIndex v = network.link(a).head;
      if (on_path[v]) continue;
      on_path[v] = true;
      current.nodes.push_back(v);
      current.links.push_back(a);
      current.cost += times[a];
      extend(v);
      current.cost -= times[a];
      current.links.pop_back();
      current.nodes.pop_back();
      on_path[v] = false;
    }
  };
  extend(origin);
  return paths;
}

GapReport gap_metrics(const Problem& problem, std::span<const double> flows,
                      std::optional<std::span<const double>> previous_flows,
                      std::size_t path_enum_limit, double used_flow_threshold) {
  const Network& net = problem.network;
  const std::vector<double> times = travel_times(net, flows);

  GapReport report;
  for (LinkIndex a = 0; a < flows.size(); ++a) report.total_travel_time += times[a] * flows[a];

  const bool enumerate = net.node_count() <= path_enum_limit;
  report.path_gap_note =
      enumerate ? "" : "path enumeration skipped: " + std::to_string(net.node_count()) +
                           " nodes exceeds the limit of " + std::to_string(path_enum_limit);

  for (NodeIndex r : problem.demands.origins()) {
    const ShortestPathTree tree = dijkstra(net, times, r);
    for (const OdDemand& e : problem.demands.from_origin(r)) {
      if (!tree.reachable(e.destination))
        throw InfeasibleError("OD pair " + od_name(r, e.destination) + " is not connected");
      OdGap g{r, e.destination, e.demand, tree.distance[e.destination], std::nullopt};
      report.shortest_path_travel_time += e.demand * g.shortest_time;
      if (enumerate) {
        double longest_used = -kInf;
        for (const PathRecord& p : enumerate_simple_paths(net, times, r, e.destination)) {
          const bool used = std::all_of(p.links.begin(), p.links.end(), [&](LinkIndex a) {
            return flows[a] > used_flow_threshold;
          });
          if (used) longest_used = std::max(longest_used, p.cost);
        }
        g.max_min_gap = std::isfinite(longest_used) ? longest_used - g.shortest_time : 0.0;
      }
      report.od.push_back(g);
    }
  }

  if (report.total_travel_time > 0.0)
    report.rgap = (report.total_travel_time - report.shortest_path_travel_time) /
                  report.total_travel_time;

  if (previous_flows) {
    if (previous_flows->size() != flows.size())
      throw DomainError("previous flow vector does not match link count");
    double delta = 0.0;
    for (LinkIndex a = 0; a < flows.size(); ++a) delta += std::abs(flows[a] - (*previous_flows)[a]);
    report.principle1_delta = delta;
  }
  return report;
}

ErrorMetrics error_metrics(std::span<const double> flows, std::span<const double> reference) {
  if (flows.size() != reference.size())
    throw DomainError("flow and reference vectors differ in length");
  ErrorMetrics m;
  for (std::size_t a = 0; a < flows.size(); ++a) {
    const double err = std::abs(flows[a] - reference[a]);
    m.epsilon_sum += err;
    if (reference[a] > 0.0) m.epsilon_rel_max = std::max(m.epsilon_rel_max, err / reference[a]);
  }
  return m;
}

}  // namespace ueassign::baseline
