#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ueassign::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kNotConverged = 3,
  kInfeasible = 4,
};

struct RunRequest {
  std::string command;
  std::string links_path;
  std::string trips_path;
  std::string flows_path;
  std::string previous_flows_path;
  std::string algo = "physarum";
  std::optional<double> epsilon0;
  std::optional<std::size_t> max_iter;
  std::uint64_t seed = 42;
  std::string out_path;
  std::string history_path;
  std::string format = "csv";
  bool strict = false;
  double tolerance = 0.03;
  double rgap_target = 1e-4;
  std::size_t source = 0;
  std::size_t sink = 0;
};

int cmd_solve(const RunRequest& req, std::ostream& out, std::ostream& err);
int cmd_compare(const RunRequest& req, std::ostream& out, std::ostream& err);
int cmd_metrics(const RunRequest& req, std::ostream& out, std::ostream& err);
int cmd_shortest_path(const RunRequest& req, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the matching command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ueassign::cli
