#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ueassign/baseline.hpp"
#include "ueassign/network.hpp"
#include "ueassign/solution.hpp"

namespace ueassign::io {

enum class InputFormat { tntp, tabular };
enum class OutputFormat { csv, json };

struct ProblemMetadata {
  InputFormat format = InputFormat::tntp;
  std::optional<std::size_t> declared_nodes;
  std::optional<std::size_t> declared_links;
  std::optional<std::size_t> declared_zones;
  std::optional<double> declared_total_flow;
  /// Positive self-pair demands dropped while reading trips.
  std::size_t dropped_self_pairs = 0;
};

struct ParsedProblem : Problem {
  ProblemMetadata metadata;
};

struct LinksHeader {
  std::optional<std::size_t> nodes;
  std::optional<std::size_t> links;
};

struct TripsHeader {
  std::optional<std::size_t> zones;
  std::optional<double> total_flow;
  std::size_t dropped_self_pairs = 0;
};

/// Reads a link table. TNTP rows are `init term capacity length fftime b power
/// [speed toll type] [;]`; tabular files carry the header
/// `from,to,free_flow_time,capacity,b,power`. Throws ParseError with a line
/// number, DuplicateLinkError, or DomainError.
Network parse_links(std::istream& in, InputFormat format, LinksHeader* header = nullptr);

/// Reads OD demands. Zero demands are skipped; positive self pairs are skipped
/// and counted. `node_count` bounds the node ids accepted.
DemandTable parse_trips(std::istream& in, InputFormat format,
                        std::optional<std::size_t> node_count = std::nullopt,
                        TripsHeader* header = nullptr);

/// `.tntp` files are TNTP, `.csv` files tabular; otherwise the first
/// non-blank character decides (`<` or `~` means TNTP).
InputFormat detect_format(const std::filesystem::path& path);

/// Loads a network and trips file; formats are detected per file. A missing
/// or unreadable file raises ParseError.
ParsedProblem load_problem(const std::filesystem::path& links_path,
                           const std::filesystem::path& trips_path);

ParsedProblem parse_problem(std::istream& links, InputFormat links_format, std::istream& trips,
                            InputFormat trips_format);

/// One row of a flow table, with 1-based external node ids already converted.
struct FlowRecord {
  NodeIndex tail = 0;
  NodeIndex head = 0;
  double flow = 0.0;
  double travel_time = 0.0;
};

/// Writes `from,to,flow,travel_time` rows (or a JSON array of the same
/// records) in link order with 17 significant digits.
void write_flows(const Network& network, std::span<const double> flows,
                 std::span<const double> times, std::ostream& out, OutputFormat format);

std::vector<FlowRecord> parse_flows(std::istream& in, OutputFormat format);

/// Maps records onto the network's links by (tail, head). Every link must be
/// present exactly once.
FlowVector flows_for_network(const Network& network, const std::vector<FlowRecord>& records);

/// JSON object with iterations, converged, epsilon_history, beckmann, rgap.
void write_report(const SolutionReport& report, std::ostream& out);

void write_gap_report(const baseline::GapReport& report, std::ostream& out, OutputFormat format);

/// Flushes `out` and throws Error if the stream is in a failed state.
void require_good(std::ostream& out, const std::string& what);

}  // namespace ueassign::io
