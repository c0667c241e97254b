#pragma once

// Node indices are 0-based everywhere inside the library. All external formats
// (TNTP, tabular CSV, flow tables, CLI flags) use 1-based node identifiers; the
// io module is the only place that converts between the two.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ueassign {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

/// Per-link flow values, indexed by link position in the network.
using FlowVector = std::vector<double>;

inline constexpr double kDefaultBprCoefficient = 0.15;
inline constexpr double kDefaultBprPower = 4.0;

/// Directed arc with a BPR volume-delay function
/// t(x) = free_flow_time * (1 + bpr_coefficient * (x / capacity)^bpr_power).
struct Link {
  NodeIndex tail = 0;
  NodeIndex head = 0;
  double free_flow_time = 1.0;
  double capacity = 1.0;
  double bpr_coefficient = kDefaultBprCoefficient;
  double bpr_power = kDefaultBprPower;

  /// b in the polynomial form t(x) = a + b * x^power.
  double delay_coefficient() const;
};

/// Unordered node pair joined by one or two opposite links.
struct NodePair {
  NodeIndex first = 0;
  NodeIndex second = 0;
};

/// Immutable directed graph. Links keep their input order; a link's id is its
/// position in `links()`.
class Network {
 public:
  /// Throws DomainError on bad endpoints or parameters and DuplicateLinkError
  /// when an ordered (tail, head) pair appears twice.
  Network(std::size_t node_count, std::vector<Link> links);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t link_count() const noexcept { return links_.size(); }

  const std::vector<Link>& links() const noexcept { return links_; }
  const Link& link(LinkIndex id) const { return links_.at(id); }

  std::span<const LinkIndex> out_links(NodeIndex node) const;
  std::span<const LinkIndex> in_links(NodeIndex node) const;

  std::optional<LinkIndex> find_link(NodeIndex tail, NodeIndex head) const;

  /// Undirected pairs in order of first appearance. Two-way roads map both
  /// directions onto the same pair.
  const std::vector<NodePair>& pairs() const noexcept { return pairs_; }
  std::size_t pair_of(LinkIndex id) const { return pair_of_link_.at(id); }

  std::vector<double> free_flow_times() const;

 private:
  std::size_t node_count_;
  std::vector<Link> links_;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<LinkIndex> out_list_, in_list_;
  std::vector<NodePair> pairs_;
  std::vector<std::size_t> pair_of_link_;
};

struct OdDemand {
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  double demand = 0.0;
};

/// Origin-destination demands. Entries are stored grouped by origin in
/// ascending origin order; within an origin, destinations keep input order.
class DemandTable {
 public:
  DemandTable() = default;

  /// Throws DomainError for self pairs, non-positive or non-finite demand, and
  /// repeated (origin, destination) pairs.
  explicit DemandTable(std::vector<OdDemand> entries);

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<OdDemand>& entries() const noexcept { return entries_; }

  /// Distinct origins, ascending.
  const std::vector<NodeIndex>& origins() const noexcept { return origins_; }

  /// Entries whose origin is `origin`; empty when it is not an origin.
  std::span<const OdDemand> from_origin(NodeIndex origin) const;

  /// I_r: total demand leaving `origin`.
  double origin_total(NodeIndex origin) const;

  double total_demand() const noexcept { return total_; }

  /// Largest node index referenced, or nullopt for an empty table.
  std::optional<NodeIndex> max_node() const;

 private:
  std::vector<OdDemand> entries_;
  std::vector<NodeIndex> origins_;
  std::vector<std::size_t> origin_begin_;  // size origins_.size() + 1
  double total_ = 0.0;
};

/// A network together with the demand to be assigned on it.
struct Problem {
  Network network;
  DemandTable demands;
};

/// Throws DomainError unless every demand endpoint is a node of the network.
void validate_problem(const Problem& problem);

/// Throws DomainError unless `flows` has one finite, non-negative entry per link.
void validate_flows(const Network& network, std::span<const double> flows);

/// BPR travel time of `link` at `flow`. Throws DomainError for negative or
/// non-finite flow.
double travel_time(const Link& link, double flow);

std::vector<double> travel_times(const Network& network, std::span<const double> flows);

/// Sum over links of the integral of t_a from 0 to x_a.
double beckmann_objective(const Network& network, std::span<const double> flows);

/// Component a is t_a(x_a).
std::vector<double> beckmann_gradient(const Network& network, std::span<const double> flows);

}  // namespace ueassign
