#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ueassign/network.hpp"
#include "ueassign/solution.hpp"

namespace ueassign::baseline {

struct ShortestPathTree {
  NodeIndex source = 0;
  /// Infinity for unreachable nodes.
  std::vector<double> distance;
  std::vector<std::optional<LinkIndex>> predecessor;

  bool reachable(NodeIndex node) const;
  /// Links from source to `node` in travel order. Throws InfeasibleError when
  /// `node` is unreachable.
  std::vector<LinkIndex> path_to(const Network& network, NodeIndex node) const;
};

/// Label-setting shortest paths. Equal-distance ties keep the smallest
/// predecessor link id.
ShortestPathTree dijkstra(const Network& network, std::span<const double> lengths,
                          NodeIndex source);

/// Loads every demand onto its current shortest path.
FlowVector all_or_nothing(const Network& network, std::span<const double> lengths,
                          const DemandTable& demands);

/// Sum over OD pairs of q_rs * u_rs at the given link lengths.
double shortest_path_travel_time(const Network& network, std::span<const double> lengths,
                                 const DemandTable& demands);

struct FrankWolfeConfig {
  double rgap_target = 1e-4;
  std::size_t max_iterations = 20000;
  double line_search_tolerance = 1e-10;
  std::size_t max_bisections = 64;
};

/// Frank-Wolfe with all-or-nothing directions and bisection line search on
/// the Beckmann objective.
SolutionReport frank_wolfe(const Problem& problem, const FrankWolfeConfig& config = {},
                           const IterationObserver& observer = {});

/// (total travel time - shortest-path travel time) / total travel time, or
/// nullopt when the total travel time is zero.
std::optional<double> relative_gap(const Problem& problem, std::span<const double> flows);

struct PathRecord {
  std::vector<NodeIndex> nodes;
  std::vector<LinkIndex> links;
  double cost = 0.0;
  /// Set only when a path decomposition is known.
  std::optional<double> flow;
};

/// All simple paths from `origin` to `destination`, costed with `times`.
std::vector<PathRecord> enumerate_simple_paths(const Network& network,
                                               std::span<const double> times, NodeIndex origin,
                                               NodeIndex destination);

struct OdGap {
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  double demand = 0.0;
  /// u_rs: shortest travel time at the current link times.
  double shortest_time = 0.0;
  /// Longest used path minus shortest path; set only when paths were enumerated.
  std::optional<double> max_min_gap;
};

struct GapReport {
  std::optional<double> rgap;
  std::optional<double> principle1_delta;
  double total_travel_time = 0.0;
  double shortest_path_travel_time = 0.0;
  std::vector<OdGap> od;
  /// Why max_min_gap is absent, if it is.
  std::string path_gap_note;
};

inline constexpr std::size_t kDefaultPathEnumerationLimit = 12;

/// Convergence measures of a flow vector. A path counts as used when every
/// link on it carries more than `used_flow_threshold`.
GapReport gap_metrics(const Problem& problem, std::span<const double> flows,
                      std::optional<std::span<const double>> previous_flows = std::nullopt,
                      std::size_t path_enum_limit = kDefaultPathEnumerationLimit,
                      double used_flow_threshold = 1e-6);

struct ErrorMetrics {
  double epsilon_sum = 0.0;
  /// Max over links with positive reference of |x - ref| / ref.
  double epsilon_rel_max = 0.0;
};

ErrorMetrics error_metrics(std::span<const double> flows, std::span<const double> reference);

}  // namespace ueassign::baseline
