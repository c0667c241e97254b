"""Regenerates src/fixtures.cpp from the files under data/."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
data = root / "data"


def raw(name):
    return 'R"ueassign(' + (data / name).read_text() + ')ueassign"'


ref = [float(l.split(",")[2]) for l in (data / "SiouxFalls_reference_flows.csv").read_text().splitlines()[1:]]
ref_body = ",\n      ".join(", ".join(f"{v:.1f}" for v in ref[i:i + 6]) for i in range(0, len(ref), 6))

src = f"""// Generated by scripts/embed_fixtures.py from data/. Do not edit by hand.
#include "ueassign/fixtures.hpp"

#include <sstream>

namespace ueassign::fixtures {{

namespace {{

constexpr const char* kCrossedPairsLinks = {raw("crossed_pairs_links.csv")};

constexpr const char* kCrossedPairsTrips = {raw("crossed_pairs_trips.csv")};

constexpr const char* kSiouxFallsNet = {raw("SiouxFalls_net.tntp")};

constexpr const char* kSiouxFallsTrips = {raw("SiouxFalls_trips.tntp")};

io::ParsedProblem from_text(const char* links, io::InputFormat lf, const char* trips,
                            io::InputFormat tf) {{
  std::istringstream l(links), t(trips);
  return io::parse_problem(l, lf, t, tf);
}}

}}  // namespace

io::ParsedProblem crossed_pairs() {{
  return from_text(kCrossedPairsLinks, io::InputFormat::tabular, kCrossedPairsTrips,
                   io::InputFormat::tabular);
}}

io::ParsedProblem sioux_falls() {{
  return from_text(kSiouxFallsNet, io::InputFormat::tntp, kSiouxFallsTrips,
                   io::InputFormat::tntp);
}}

FlowVector sioux_falls_reference_flows() {{
  return {{
      {ref_body}}};
}}

}}  // namespace ueassign::fixtures
"""
(root / "src" / "fixtures.cpp").write_text(src)
