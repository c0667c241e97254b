#include "ueassign/physarum.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ueassign/baseline.hpp"
#include "ueassign/error.hpp"

namespace ueassign::physarum {

namespace {

ConductanceGraph tube_conductances(const Network& network, std::span<const double> conductivity,
                                   std::span<const double> lengths) {
  ConductanceGraph graph(network.node_count());
  for (LinkIndex a = 0; a < network.link_count(); ++a) {
    const Link& l = network.link(a);
    graph.add(l.tail, l.head, conductivity[a] / lengths[a]);
  }
  return graph;
}

// Directional flux through each tube. Tubes whose pair fell below the cutoff
// or that touch a node outside the solved component carry nothing.
std::vector<double> truncated_flux(const Network& network, std::span<const double> conductivity,
                                   std::span<const double> lengths, const PressureSolution& sol) {
  std::vector<double> pair_g(network.pairs().size(), 0.0);
  for (LinkIndex a = 0; a < network.link_count(); ++a)
    pair_g[network.pair_of(a)] += conductivity[a] / lengths[a];

  std::vector<double> q(network.link_count(), 0.0);
  for (LinkIndex a = 0; a < network.link_count(); ++a) {
    const Link& l = network.link(a);
    if (!sol.active[l.tail] || !sol.active[l.head]) continue;
    if (pair_g[network.pair_of(a)] < sol.conductance_cutoff) continue;
    const double f = conductivity[a] / lengths[a] * (sol.pressure[l.tail] - sol.pressure[l.head]);
    if (f > 0.0) q[a] = f;
  }
  return q;
}

void average_into(std::vector<double>& conductivity, std::span<const double> flux) {
  for (std::size_t a = 0; a < conductivity.size(); ++a)
    conductivity[a] = (conductivity[a] + flux[a]) / 2.0;
}

void check_lengths(const Network& network, std::span<const double> lengths) {
  if (lengths.size() != network.link_count())
    throw DomainError("length vector does not match link count");
  for (double len : lengths)
    if (!(std::isfinite(len) && len > 0.0)) throw DomainError("link lengths must be positive");
}

// Every OD pair must be joined by a directed path.
void check_reachability(const Problem& problem) {
  const Network& net = problem.network;
  for (NodeIndex r : problem.demands.origins()) {
    std::vector<bool> seen(net.node_count(), false);
    std::vector<NodeIndex> stack{r};
    seen[r] = true;
    while (!stack.empty()) {
      const NodeIndex u = stack.back();
      stack.pop_back();
      for (LinkIndex a : net.out_links(u)) {
        const NodeIndex v = net.link(a).head;
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    for (const OdDemand& e : problem.demands.from_origin(r))
      if (!seen[e.destination])
        throw InfeasibleError("destination " + std::to_string(e.destination + 1) +
                              " is unreachable from origin " + std::to_string(r + 1));
  }
}

// Shared outer loop: `step` produces Q^{all,n+1} from the lengths L^n.
template <class Step>
SolutionReport iterate(const Problem& problem, const SolverConfig& config, const char* name,
                       const IterationObserver& observer, Step&& step) {
  const Network& net = problem.network;
  SolutionReport report;
  report.algorithm = name;

  std::vector<double> lengths = net.free_flow_times();
  std::vector<double> previous(net.link_count(), 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;

  for (std::size_t n = 1; n <= config.max_iterations; ++n) {
    std::vector<double> total = step(std::span<const double>(lengths));

    double delta = 0.0;
    for (LinkIndex a = 0; a < net.link_count(); ++a) delta += std::abs(total[a] - previous[a]);
    report.epsilon_history.push_back(delta);

    for (LinkIndex a = 0; a < net.link_count(); ++a)
      lengths[a] = (lengths[a] + travel_time(net.link(a), total[a])) / 2.0;

    previous = std::move(total);
    report.iterations = n;
    if (observer) observer(IterationRecord{n, delta, previous, lengths});

    if (delta <= config.epsilon0) {
      report.converged = true;
      break;
    }
    if (delta < best) {
      best = delta;
      stalled = 0;
    } else if (config.stall_window > 0 && ++stalled >= config.stall_window) {
      break;
    }
  }

  report.flows = std::move(previous);
  report.travel_times = travel_times(net, report.flows);
  report.lengths = std::move(lengths);
  report.beckmann = beckmann_objective(net, report.flows);
  report.rgap = baseline::relative_gap(problem, report.flows);
  return report;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(std::isfinite(epsilon0) && epsilon0 > 0.0)) throw DomainError("epsilon0 must be positive");
  if (!(d_init_min > 0.0 && d_init_min <= d_init_max && d_init_max <= 1.0))
    throw DomainError("initial conductivity range must lie within (0, 1]");
}

double initial_conductivity(const SolverConfig& config, NodeIndex origin, LinkIndex link) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.rng_seed),
                    static_cast<std::uint32_t>(config.rng_seed >> 32),
                    static_cast<std::uint32_t>(origin), static_cast<std::uint32_t>(link)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  const std::uint64_t bits = ((std::uint64_t{words[0]} << 32) | words[1]) >> 11;
  const double unit = static_cast<double>(bits) * 0x1.0p-53;
  return config.d_init_min + (config.d_init_max - config.d_init_min) * unit;
}

std::vector<OriginState> init_origin_states(const Network& network, const DemandTable& demands,
                                            const SolverConfig& config) {
  config.validate();
  std::vector<OriginState> states;
  states.reserve(demands.origins().size());
  for (NodeIndex r : demands.origins()) {
    OriginState s;
    s.origin = r;
    s.conductivity.resize(network.link_count());
    for (LinkIndex a = 0; a < network.link_count(); ++a)
      s.conductivity[a] = initial_conductivity(config, r, a);
    s.flux.assign(network.link_count(), 0.0);
    states.push_back(std::move(s));
  }
  return states;
}

void origin_flux(const Network& network, OriginState& state, std::span<const double> lengths,
                 std::span<const OdDemand> sinks, const PressureSolver& solver) {
  check_lengths(network, lengths);
  std::vector<double> injection(network.node_count(), 0.0);
  for (const OdDemand& e : sinks) {
    if (e.origin != state.origin) throw DomainError("sink entry belongs to a different origin");
    injection[e.origin] += e.demand;
    injection[e.destination] -= e.demand;
  }

  const ConductanceGraph graph = tube_conductances(network, state.conductivity, lengths);
  state.pressures = solver.solve(graph, injection, state.origin);
  state.flux = truncated_flux(network, state.conductivity, lengths, state.pressures);
  average_into(state.conductivity, state.flux);
}

SolutionReport solve_ue(const Problem& problem, const SolverConfig& config,
                        const IterationObserver& observer) {
  validate_problem(problem);
  check_reachability(problem);
  std::vector<OriginState> states = init_origin_states(problem.network, problem.demands, config);
  const DenseCholeskySolver solver;

  return iterate(problem, config, "physarum", observer, [&](std::span<const double> lengths) {
    std::vector<double> total(problem.network.link_count(), 0.0);
    for (OriginState& s : states) {
      origin_flux(problem.network, s, lengths, problem.demands.from_origin(s.origin), solver);
      for (LinkIndex a = 0; a < total.size(); ++a) total[a] += s.flux[a];
    }
    return total;
  });
}

SolutionReport solve_aggregate(const Problem& problem, const SolverConfig& config,
                               const IterationObserver& observer) {
  validate_problem(problem);
  check_reachability(problem);
  config.validate();
  const Network& net = problem.network;

  std::vector<double> injection(net.node_count(), 0.0);
  for (const OdDemand& e : problem.demands.entries()) {
    injection[e.origin] += e.demand;
    injection[e.destination] -= e.demand;
  }
  const NodeIndex pinned =
      problem.demands.empty() ? NodeIndex{0} : problem.demands.origins().front();

  // Single conductivity field, seeded like the first origin's subnetwork.
  std::vector<double> conductivity(net.link_count());
  for (LinkIndex a = 0; a < net.link_count(); ++a)
    conductivity[a] = initial_conductivity(config, pinned, a);
  const DenseCholeskySolver solver;

  return iterate(problem, config, "zhang", observer, [&](std::span<const double> lengths) {
    if (problem.demands.empty()) return std::vector<double>(net.link_count(), 0.0);
    const PressureSolution sol =
        solver.solve(tube_conductances(net, conductivity, lengths), injection, pinned);
    std::vector<double> q = truncated_flux(net, conductivity, lengths, sol);
    average_into(conductivity, q);
    return q;
  });
}

SolutionReport solve(const Problem& problem, const SolverConfig& config,
                     const IterationObserver& observer) {
  switch (config.mode) {
    case Mode::modified:
      return solve_ue(problem, config, observer);
    case Mode::aggregate:
      return solve_aggregate(problem, config, observer);
    case Mode::shortest_path:
      break;
  }
  throw DomainError("shortest-path mode has no assignment report; use shortest_path_flux");
}

ShortestPathResult shortest_path_flux(const Network& network, std::span<const double> lengths,
                                      NodeIndex source, NodeIndex sink,
                                      const SolverConfig& config) {
  config.validate();
  check_lengths(network, lengths);
  if (source >= network.node_count() || sink >= network.node_count())
    throw DomainError("source or sink outside the network");
  if (source == sink) throw DomainError("source and sink must differ");
  if (!baseline::dijkstra(network, lengths, source).reachable(sink))
    throw InfeasibleError("sink " + std::to_string(sink + 1) + " is unreachable from source " +
                          std::to_string(source + 1));

  ShortestPathResult result;
  result.conductivity.resize(network.link_count());
  for (LinkIndex a = 0; a < network.link_count(); ++a)
    result.conductivity[a] = initial_conductivity(config, source, a);
  result.flux.assign(network.link_count(), 0.0);

  std::vector<double> injection(network.node_count(), 0.0);
  injection[source] = 1.0;
  injection[sink] = -1.0;
  const DenseCholeskySolver solver;

  for (std::size_t n = 1; n <= config.max_iterations; ++n) {
    const PressureSolution sol = solver.solve(
        tube_conductances(network, result.conductivity, lengths), injection, source);
    std::vector<double> q = truncated_flux(network, result.conductivity, lengths, sol);
    average_into(result.conductivity, q);

    double delta = 0.0;
    for (LinkIndex a = 0; a < q.size(); ++a) delta += std::abs(q[a] - result.flux[a]);
    result.flux = std::move(q);
    result.iterations = n;
    if (delta <= config.epsilon0) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace ueassign::physarum
