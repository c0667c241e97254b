#include "ueassign/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ueassign/error.hpp"

namespace ueassign {

namespace {

using Adjacency = std::vector<std::vector<std::pair<NodeIndex, double>>>;

// Parallel entries summed per unordered pair; pairs below `cutoff` dropped.
Adjacency combined_adjacency(const ConductanceGraph& graph, double cutoff) {
  Adjacency adj(graph.node_count());
  for (const Conductance& e : graph.edges()) {
    if (e.value <= 0.0) continue;
    adj[e.u].emplace_back(e.v, e.value);
    adj[e.v].emplace_back(e.u, e.value);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && row[w - 1].first == row[r].first)
        row[w - 1].second += row[r].second;
      else
        row[w++] = row[r];
    }
    row.resize(w);
    std::erase_if(row, [&](const auto& p) { return p.second < cutoff; });
  }
  return adj;
}

}  // namespace

void ConductanceGraph::add(NodeIndex u, NodeIndex v, double value) {
  if (u >= node_count_ || v >= node_count_) throw DomainError("conductance endpoint out of range");
  if (u == v) throw DomainError("conductance on a self-loop");
  if (!(std::isfinite(value) && value >= 0.0))
    throw DomainError("conductance must be finite and non-negative");
  edges_.push_back({u, v, value});
}

double ConductanceGraph::max_conductance() const noexcept {
  double m = 0.0;
  for (const Conductance& e : edges_) m = std::max(m, e.value);
  return m;
}

std::vector<double> laplacian_outflow(const ConductanceGraph& graph,
                                      std::span<const double> pressure, double cutoff) {
  const Adjacency adj = combined_adjacency(graph, cutoff);
  std::vector<double> out(graph.node_count(), 0.0);
  for (NodeIndex j = 0; j < adj.size(); ++j)
    for (const auto& [i, g] : adj[j]) out[j] += g * (pressure[j] - pressure[i]);
  return out;
}

PressureSolution DenseCholeskySolver::solve(const ConductanceGraph& graph,
                                            std::span<const double> injection,
                                            NodeIndex pinned) const {
  const std::size_t n = graph.node_count();
  if (injection.size() != n) throw DomainError("injection size does not match node count");
  if (pinned >= n) throw DomainError("pinned node out of range");
  for (double q : injection)
    if (!std::isfinite(q)) throw DomainError("injection must be finite");

  PressureSolution sol;
  sol.pinned = pinned;
  sol.pressure.assign(n, 0.0);
  sol.active.assign(n, false);
  sol.conductance_cutoff = kConductanceFloor * graph.max_conductance();
  const double cutoff = sol.conductance_cutoff;

  const Adjacency adj = combined_adjacency(graph, cutoff);

  // Component of the pinned node.
  std::vector<NodeIndex> stack{pinned};
  sol.active[pinned] = true;
  while (!stack.empty()) {
    const NodeIndex u = stack.back();
    stack.pop_back();
    for (const auto& [v, g] : adj[u])
      if (!sol.active[v]) {
        sol.active[v] = true;
        stack.push_back(v);
      }
  }

  double balance = 0.0, scale = 0.0;
  for (NodeIndex j = 0; j < n; ++j) {
    if (injection[j] != 0.0 && !sol.active[j])
      throw DisconnectedError("node " + std::to_string(j + 1) +
                                  " carries demand but is disconnected from node " +
                                  std::to_string(pinned + 1),
                              j);
    balance += injection[j];
    scale += std::abs(injection[j]);
  }
  if (std::abs(balance) > 1e-9 * scale)
    throw InfeasibleError("injections do not balance (net " + std::to_string(balance) + ")");
  if (scale == 0.0) return sol;

  // Reduced system over active nodes except the pin.
  std::vector<std::ptrdiff_t> slot(n, -1);
  std::vector<NodeIndex> order;
  for (NodeIndex j = 0; j < n; ++j)
    if (sol.active[j] && j != pinned) {
      slot[j] = static_cast<std::ptrdiff_t>(order.size());
      order.push_back(j);
    }
  const auto m = static_cast<Eigen::Index>(order.size());
  if (m > 0) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const NodeIndex j = order[static_cast<std::size_t>(k)];
      b(k) = injection[j];
      for (const auto& [i, g] : adj[j]) {
        a(k, k) += g;
        if (slot[i] >= 0) a(k, slot[i]) -= g;
      }
    }
    // Jacobi scaling keeps weakly attached nodes from dominating the estimate.
    const Eigen::VectorXd d = a.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = d.asDiagonal() * a * d.asDiagonal();
    const Eigen::LLT<Eigen::MatrixXd> llt(scaled);
    if (llt.info() != Eigen::Success || !(llt.rcond() * kMaxConditionNumber >= 1.0))
      throw ConditioningError("reduced Laplacian is numerically singular (rcond " +
                              std::to_string(llt.rcond()) + ")");
    const Eigen::VectorXd y = llt.solve(d.asDiagonal() * b);
    const Eigen::VectorXd p = d.asDiagonal() * y;
    for (Eigen::Index k = 0; k < m; ++k) sol.pressure[order[static_cast<std::size_t>(k)]] = p(k);
  }

  const std::vector<double> outflow = laplacian_outflow(graph, sol.pressure, cutoff);
  double res = 0.0, rhs = 0.0;
  for (NodeIndex j = 0; j < n; ++j) {
    if (!sol.active[j]) continue;
    res += (outflow[j] - injection[j]) * (outflow[j] - injection[j]);
    rhs += injection[j] * injection[j];
  }
  sol.residual_norm = std::sqrt(res / rhs);
  return sol;
}

PressureSolution solve_pressures(const ConductanceGraph& graph, std::span<const double> injection,
                                 NodeIndex pinned) {
  return DenseCholeskySolver{}.solve(graph, injection, pinned);
}

}  // namespace ueassign
