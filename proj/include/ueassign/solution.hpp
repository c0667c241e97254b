#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ueassign/network.hpp"

namespace ueassign {

/// Snapshot handed to an IterationObserver after each solver iteration.
struct IterationRecord {
  std::size_t iteration = 0;
  /// Sum over links of |x^{n+1} - x^n|.
  double principle1_delta = 0.0;
  std::span<const double> flows;
  /// Current link lengths (Physarum) or travel times (Frank-Wolfe).
  std::span<const double> lengths;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

struct SolutionReport {
  std::string algorithm;
  FlowVector flows;
  std::vector<double> travel_times;
  /// Final effective lengths; equals travel_times for Frank-Wolfe.
  std::vector<double> lengths;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> epsilon_history;
  double beckmann = 0.0;
  /// Relative gap of the final flows; empty when total travel time is zero.
  std::optional<double> rgap;
};

}  // namespace ueassign
