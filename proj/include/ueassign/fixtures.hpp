#pragma once

#include "ueassign/io.hpp"

namespace ueassign::fixtures {

/// Four nodes, links 1->2, 1->3, 4->2, 4->3 and demands q(1,2) = q(4,3) = 100.
/// Free-flow times are 10 on the direct links and 5 on the cross links, all
/// capacities 100, B = 0.15, power 4.
io::ParsedProblem crossed_pairs();

/// Sioux Falls: 24 nodes, 76 links, total demand 360600 (LeBlanc table x 100).
io::ParsedProblem sioux_falls();

/// Published equilibrium link flows for Sioux Falls in network link order.
FlowVector sioux_falls_reference_flows();

}  // namespace ueassign::fixtures
