#include "ueassign/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "ueassign/error.hpp"

namespace ueassign {

namespace {

// CSR-style adjacency: offsets has node_count + 1 entries.
void build_index(std::size_t node_count, const std::vector<Link>& links, bool by_tail,
                 std::vector<std::size_t>& offsets, std::vector<LinkIndex>& list) {
  offsets.assign(node_count + 1, 0);
  for (const Link& l : links) ++offsets[(by_tail ? l.tail : l.head) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  list.resize(links.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (LinkIndex id = 0; id < links.size(); ++id) {
    const Link& l = links[id];
    list[cursor[by_tail ? l.tail : l.head]++] = id;
  }
}

std::string link_name(const Link& l) {
  return "(" + std::to_string(l.tail + 1) + "," + std::to_string(l.head + 1) + ")";
}

}  // namespace

double Link::delay_coefficient() const {
  return bpr_coefficient * free_flow_time / std::pow(capacity, bpr_power);
}

Network::Network(std::size_t node_count, std::vector<Link> links)
    : node_count_(node_count), links_(std::move(links)) {
  if (node_count_ == 0) throw DomainError("network must have at least one node");

  std::map<std::pair<NodeIndex, NodeIndex>, std::size_t> pair_ids;
  std::map<std::pair<NodeIndex, NodeIndex>, LinkIndex> seen;
  pair_of_link_.reserve(links_.size());

  for (LinkIndex id = 0; id < links_.size(); ++id) {
    const Link& l = links_[id];
    if (l.tail >= node_count_ || l.head >= node_count_)
      throw DomainError("link " + link_name(l) + " has an endpoint outside [1, " +
                        std::to_string(node_count_) + "]");
    if (l.tail == l.head) throw DomainError("self-loop link " + link_name(l));
    if (!(std::isfinite(l.free_flow_time) && l.free_flow_time > 0.0))
      throw DomainError("link " + link_name(l) + ": free-flow time must be positive");
    if (!(std::isfinite(l.capacity) && l.capacity > 0.0))
      throw DomainError("link " + link_name(l) + ": capacity must be positive");
    if (!(std::isfinite(l.bpr_coefficient) && l.bpr_coefficient >= 0.0))
      throw DomainError("link " + link_name(l) + ": BPR coefficient must be >= 0");
    if (!(std::isfinite(l.bpr_power) && l.bpr_power >= 1.0))
      throw DomainError("link " + link_name(l) + ": BPR power must be >= 1");
    const double b = l.delay_coefficient();
    if (!std::isfinite(b))
      throw DomainError("link " + link_name(l) + ": delay coefficient is not finite");

    if (!seen.emplace(std::pair{l.tail, l.head}, id).second)
      throw DuplicateLinkError("duplicate link " + link_name(l));

    const auto key = std::minmax(l.tail, l.head);
    auto [it, inserted] = pair_ids.emplace(std::pair{key.first, key.second}, pairs_.size());
    if (inserted) pairs_.push_back(NodePair{key.first, key.second});
    pair_of_link_.push_back(it->second);
  }

  build_index(node_count_, links_, true, out_offsets_, out_list_);
  build_index(node_count_, links_, false, in_offsets_, in_list_);
}

std::span<const LinkIndex> Network::out_links(NodeIndex node) const {
  return {out_list_.data() + out_offsets_.at(node), out_offsets_.at(node + 1) - out_offsets_[node]};
}

std::span<const LinkIndex> Network::in_links(NodeIndex node) const {
  return {in_list_.data() + in_offsets_.at(node), in_offsets_.at(node + 1) - in_offsets_[node]};
}

std::optional<LinkIndex> Network::find_link(NodeIndex tail, NodeIndex head) const {
  if (tail >= node_count_) return std::nullopt;
  for (LinkIndex id : out_links(tail))
    if (links_[id].head == head) return id;
  return std::nullopt;
}

std::vector<double> Network::free_flow_times() const {
  std::vector<double> out(links_.size());
  std::transform(links_.begin(), links_.end(), out.begin(),
                 [](const Link& l) { return l.free_flow_time; });
  return out;
}

DemandTable::DemandTable(std::vector<OdDemand> entries) {
  std::map<std::pair<NodeIndex, NodeIndex>, bool> seen;
  for (const OdDemand& e : entries) {
    const std::string od = "(" + std::to_string(e.origin + 1) + "," +
                           std::to_string(e.destination + 1) + ")";
    if (e.origin == e.destination) throw DomainError("self-pair demand " + od);
    if (!(std::isfinite(e.demand) && e.demand > 0.0))
      throw DomainError("demand " + od + " must be positive and finite");
    if (!seen.emplace(std::pair{e.origin, e.destination}, true).second)
      throw DomainError("duplicate demand entry " + od);
  }

  entries_ = std::move(entries);
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const OdDemand& a, const OdDemand& b) { return a.origin < b.origin; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == 0 || entries_[i].origin != entries_[i - 1].origin) {
      origins_.push_back(entries_[i].origin);
      origin_begin_.push_back(i);
    }
    total_ += entries_[i].demand;
  }
  origin_begin_.push_back(entries_.size());
}

std::span<const OdDemand> DemandTable::from_origin(NodeIndex origin) const {
  const auto it = std::lower_bound(origins_.begin(), origins_.end(), origin);
  if (it == origins_.end() || *it != origin) return {};
  const auto k = static_cast<std::size_t>(it - origins_.begin());
  return {entries_.data() + origin_begin_[k], origin_begin_[k + 1] - origin_begin_[k]};
}

double DemandTable::origin_total(NodeIndex origin) const {
  double sum = 0.0;
  for (const OdDemand& e : from_origin(origin)) sum += e.demand;
  return sum;
}

std::optional<NodeIndex> DemandTable::max_node() const {
  if (entries_.empty()) return std::nullopt;
  NodeIndex m = 0;
  for (const OdDemand& e : entries_) m = std::max({m, e.origin, e.destination});
  return m;
}

void validate_problem(const Problem& problem) {
  const auto m = problem.demands.max_node();
  if (m && *m >= problem.network.node_count())
    throw DomainError("demand references node " + std::to_string(*m + 1) +
                      " but the network has " +
                      std::to_string(problem.network.node_count()) + " nodes");
}

void validate_flows(const Network& network, std::span<const double> flows) {
  if (flows.size() != network.link_count())
    throw DomainError("flow vector has " + std::to_string(flows.size()) + " entries, expected " +
                      std::to_string(network.link_count()));
  for (std::size_t a = 0; a < flows.size(); ++a)
    if (!(std::isfinite(flows[a]) && flows[a] >= 0.0))
      throw DomainError("flow on link " + std::to_string(a) + " is negative or not finite");
}

double travel_time(const Link& link, double flow) {
  if (!(std::isfinite(flow) && flow >= 0.0))
    throw DomainError("travel_time: flow must be finite and non-negative");
  return link.free_flow_time *
         (1.0 + link.bpr_coefficient * std::pow(flow / link.capacity, link.bpr_power));
}

std::vector<double> travel_times(const Network& network, std::span<const double> flows) {
  validate_flows(network, flows);
  std::vector<double> out(flows.size());
  for (LinkIndex a = 0; a < flows.size(); ++a) out[a] = travel_time(network.link(a), flows[a]);
  return out;
}

double beckmann_objective(const Network& network, std::span<const double> flows) {
  validate_flows(network, flows);
  double z = 0.0;
  for (LinkIndex a = 0; a < flows.size(); ++a) {
    const Link& l = network.link(a);
    const double x = flows[a];
    // alpha*x + alpha*B*c/(P+1) * (x/c)^(P+1)  ==  a*x + b*x^(P+1)/(P+1)
    z += l.free_flow_time * x +
         l.free_flow_time * l.bpr_coefficient * l.capacity / (l.bpr_power + 1.0) *
             std::pow(x / l.capacity, l.bpr_power + 1.0);
  }
  return z;
}

std::vector<double> beckmann_gradient(const Network& network, std::span<const double> flows) {
  return travel_times(network, flows);
}

}  // namespace ueassign
