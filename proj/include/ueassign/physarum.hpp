#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ueassign/linalg.hpp"
#include "ueassign/network.hpp"
#include "ueassign/solution.hpp"

namespace ueassign::physarum {

enum class Mode {
  /// One single-source multi-sink subnetwork per origin, fluxes superposed.
  modified,
  /// A single pressure system for all origins and destinations (legacy).
  aggregate,
  /// Static lengths, unit injection between one source and one sink.
  shortest_path,
};

struct SolverConfig {
  /// Stop once sum_a |Q_a^{n+1} - Q_a^n| <= epsilon0.
  double epsilon0 = 0.01;
  std::size_t max_iterations = 5000;
  std::uint64_t rng_seed = 42;
  double d_init_min = 0.5;
  double d_init_max = 1.0;
  Mode mode = Mode::modified;
  /// Give up when epsilon has not improved on its best value for this many
  /// consecutive iterations. 0 disables the guard.
  std::size_t stall_window = 50;

  /// Throws DomainError on an invalid configuration.
  void validate() const;
};

/// Per-origin tube state. Vectors are indexed by link id.
struct OriginState {
  NodeIndex origin = 0;
  std::vector<double> conductivity;
  std::vector<double> flux;
  PressureSolution pressures;
};

/// Initial conductivity of `link` for `origin`, uniform in
/// [d_init_min, d_init_max] from a stream keyed by (seed, origin, link).
double initial_conductivity(const SolverConfig& config, NodeIndex origin, LinkIndex link);

/// One state per origin of `demands`, in ascending origin order.
std::vector<OriginState> init_origin_states(const Network& network, const DemandTable& demands,
                                            const SolverConfig& config);

/// One Physarum step for a single origin subnetwork: solve pressures with
/// injection +I_r at the origin and -I_rs at each sink (pinned at the origin),
/// emit truncated fluxes Q_ij = max(0, D_ij/L_ij (p_i - p_j)), then average
/// D <- (D + Q) / 2.
void origin_flux(const Network& network, OriginState& state, std::span<const double> lengths,
                 std::span<const OdDemand> sinks,
                 const PressureSolver& solver = DenseCholeskySolver{});

/// Origin-decomposed user-equilibrium assignment.
SolutionReport solve_ue(const Problem& problem, const SolverConfig& config,
                        const IterationObserver& observer = {});

/// Legacy model with one pressure system and one conductivity field for all
/// origins. Does not keep OD pairs apart.
SolutionReport solve_aggregate(const Problem& problem, const SolverConfig& config,
                               const IterationObserver& observer = {});

/// Dispatches on config.mode (modified or aggregate).
SolutionReport solve(const Problem& problem, const SolverConfig& config,
                     const IterationObserver& observer = {});

struct ShortestPathResult {
  /// Per-link flux of a unit flow from source to sink.
  std::vector<double> flux;
  std::vector<double> conductivity;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Physarum shortest path with static `lengths`; the flux concentrates on a
/// shortest source-to-sink path.
ShortestPathResult shortest_path_flux(const Network& network, std::span<const double> lengths,
                                      NodeIndex source, NodeIndex sink,
                                      const SolverConfig& config);

}  // namespace ueassign::physarum
