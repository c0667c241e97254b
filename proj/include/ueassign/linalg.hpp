#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ueassign/network.hpp"

namespace ueassign {

/// Conductances relative to the largest one below this ratio are dropped from
/// the system (decayed tubes).
inline constexpr double kConductanceFloor = 1e-12;

/// Reduced systems whose estimated condition number exceeds this are rejected.
inline constexpr double kMaxConditionNumber = 1e14;

struct Conductance {
  NodeIndex u = 0;
  NodeIndex v = 0;
  double value = 0.0;
};

/// Symmetric weighted graph feeding the Laplacian solve. Repeated (u, v)
/// entries are summed, so adding both D_ij/L_ij and D_ji/L_ji for a two-way
/// road yields the combined pair conductance.
class ConductanceGraph {
 public:
  explicit ConductanceGraph(std::size_t node_count) : node_count_(node_count) {}

  void add(NodeIndex u, NodeIndex v, double value);

  std::size_t node_count() const noexcept { return node_count_; }
  const std::vector<Conductance>& edges() const noexcept { return edges_; }

  /// Largest single entry, 0 for an empty graph.
  double max_conductance() const noexcept;

 private:
  std::size_t node_count_;
  std::vector<Conductance> edges_;
};

struct PressureSolution {
  std::vector<double> pressure;
  NodeIndex pinned = 0;
  /// Nodes in the connected component of the pinned node.
  std::vector<bool> active;
  /// Entries below this value were treated as absent.
  double conductance_cutoff = 0.0;
  /// ||L p - injection||_2 / ||injection||_2 over active nodes.
  double residual_norm = 0.0;
};

/// Solves L p = injection with p[pinned] = 0, where L is the weighted
/// Laplacian (L p)_j = sum_i g_ij (p_j - p_i). Positive injection enters the
/// network, so the source of a unit flow ends up at the highest pressure.
class PressureSolver {
 public:
  virtual ~PressureSolver() = default;
  virtual PressureSolution solve(const ConductanceGraph& graph, std::span<const double> injection,
                                 NodeIndex pinned) const = 0;
};

/// Dense Cholesky factorization of the Jacobi-scaled reduced Laplacian.
class DenseCholeskySolver final : public PressureSolver {
 public:
  PressureSolution solve(const ConductanceGraph& graph, std::span<const double> injection,
                         NodeIndex pinned) const override;
};

/// Convenience wrapper around DenseCholeskySolver.
PressureSolution solve_pressures(const ConductanceGraph& graph, std::span<const double> injection,
                                 NodeIndex pinned);

/// Net Laplacian outflow sum_i g_ij (p_j - p_i) at every node, counting only
/// pair conductances at or above `cutoff`.
std::vector<double> laplacian_outflow(const ConductanceGraph& graph,
                                      std::span<const double> pressure, double cutoff = 0.0);

}  // namespace ueassign
