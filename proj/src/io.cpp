#include "ueassign/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include "ueassign/error.hpp"

namespace ueassign::io {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

double parse_number(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  return v;
}

std::size_t parse_count(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  return v;
}

// External 1-based node id to internal index.
NodeIndex parse_node(std::string_view tok, std::size_t line) {
  const std::size_t id = parse_count(tok, line, "node id");
  if (id == 0) throw ParseError("node ids are 1-based; got 0", line);
  return id - 1;
}

struct LineReader {
  explicit LineReader(std::istream& stream) : in(stream) {}

  std::istream& in;
  std::string text;
  std::size_t number = 0;

  bool next() {
    if (!std::getline(in, text)) return false;
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return true;
  }
};

// "<TAG> value" -> (TAG, value). Returns false when the line is not a tag.
bool metadata_line(std::string_view line, std::string& tag, std::string_view& value,
                   std::size_t number) {
  if (line.empty() || line.front() != '<') return false;
  const auto close = line.find('>');
  if (close == std::string_view::npos) throw ParseError("unterminated metadata tag", number);
  tag = std::string(trim(line.substr(1, close - 1)));
  std::transform(tag.begin(), tag.end(), tag.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  value = trim(line.substr(close + 1));
  return true;
}

std::map<std::string, std::size_t> header_columns(std::string_view line, std::size_t number,
                                                  std::initializer_list<const char*> required) {
  std::map<std::string, std::size_t> cols;
  const auto names = split_csv(line);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string name(names[i]);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!cols.emplace(name, i).second) throw ParseError("repeated column '" + name + "'", number);
  }
  for (const char* r : required)
    if (!cols.contains(r)) throw ParseError(std::string("missing column '") + r + "'", number);
  return cols;
}

Link make_link(NodeIndex tail, NodeIndex head, double capacity, double fft, double b,
               double power, std::size_t line) {
  if (tail == head) throw ParseError("self-loop link", line);
  if (capacity <= 0.0)
    throw DomainError("line " + std::to_string(line) + ": capacity must be positive");
  if (fft <= 0.0)
    throw DomainError("line " + std::to_string(line) + ": free-flow time must be positive");
  if (b < 0.0) throw DomainError("line " + std::to_string(line) + ": b must be >= 0");
  if (power < 1.0) throw DomainError("line " + std::to_string(line) + ": power must be >= 1");
  return Link{tail, head, fft, capacity, b, power};
}

void add_link(std::vector<Link>& links, std::set<std::pair<NodeIndex, NodeIndex>>& seen, Link l,
              std::size_t line) {
  if (!seen.emplace(l.tail, l.head).second)
    throw DuplicateLinkError("line " + std::to_string(line) + ": duplicate link (" +
                             std::to_string(l.tail + 1) + "," + std::to_string(l.head + 1) + ")");
  links.push_back(l);
}

Network finish_links(std::vector<Link> links, std::optional<std::size_t> declared_nodes,
                     std::optional<std::size_t> declared_links) {
  if (declared_links && *declared_links != links.size())
    throw ParseError("declared " + std::to_string(*declared_links) + " links but found " +
                         std::to_string(links.size()),
                     0);
  std::size_t max_node = 0;
  for (const Link& l : links) max_node = std::max({max_node, l.tail + 1, l.head + 1});
  if (declared_nodes && max_node > *declared_nodes)
    throw ParseError("node " + std::to_string(max_node) + " exceeds the declared " +
                         std::to_string(*declared_nodes) + " nodes",
                     0);
  return Network(std::max<std::size_t>(1, declared_nodes.value_or(max_node)), std::move(links));
}

Network parse_links_tntp(std::istream& in, LinksHeader& header) {
  LineReader reader(in);
  std::vector<Link> links;
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  std::string tag;
  std::string_view value;
  while (reader.next()) {
    const std::string_view line = trim(reader.text);
    if (line.empty() || line.front() == '~') continue;
    if (metadata_line(line, tag, value, reader.number)) {
      if (tag == "NUMBER OF NODES") header.nodes = parse_count(value, reader.number, "node count");
      if (tag == "NUMBER OF LINKS") header.links = parse_count(value, reader.number, "link count");
      continue;
    }
    std::string row(line);
    std::replace(row.begin(), row.end(), ';', ' ');
    const auto tok = split_ws(row);
    if (tok.empty()) continue;
    if (tok.size() < 5)
      throw ParseError("expected at least 5 columns (init term capacity length fftime)",
                       reader.number);
    const NodeIndex tail = parse_node(tok[0], reader.number);
    const NodeIndex head = parse_node(tok[1], reader.number);
    const double capacity = parse_number(tok[2], reader.number, "capacity");
    parse_number(tok[3], reader.number, "length");
    const double fft = parse_number(tok[4], reader.number, "free-flow time");
    const double b = tok.size() > 5 ? parse_number(tok[5], reader.number, "b")
                                    : kDefaultBprCoefficient;
    const double power = tok.size() > 6 ? parse_number(tok[6], reader.number, "power")
                                        : kDefaultBprPower;
    add_link(links, seen, make_link(tail, head, capacity, fft, b, power, reader.number),
             reader.number);
  }
  return finish_links(std::move(links), header.nodes, header.links);
}

Network parse_links_tabular(std::istream& in) {
  LineReader reader(in);
  std::vector<Link> links;
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  std::optional<std::map<std::string, std::size_t>> cols;
  while (reader.next()) {
    const std::string_view line = trim(reader.text);
    if (line.empty() || line.front() == '#') continue;
    if (!cols) {
      cols = header_columns(line, reader.number, {"from", "to", "free_flow_time", "capacity"});
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != cols->size())
      throw ParseError("expected " + std::to_string(cols->size()) + " fields, found " +
                           std::to_string(f.size()),
                       reader.number);
    const auto field = [&](const char* name) { return f[cols->at(name)]; };
    const NodeIndex tail = parse_node(field("from"), reader.number);
    const NodeIndex head = parse_node(field("to"), reader.number);
    const double fft = parse_number(field("free_flow_time"), reader.number, "free_flow_time");
    const double capacity = parse_number(field("capacity"), reader.number, "capacity");
    const double b = cols->contains("b") ? parse_number(field("b"), reader.number, "b")
                                         : kDefaultBprCoefficient;
    const double power = cols->contains("power")
                             ? parse_number(field("power"), reader.number, "power")
                             : kDefaultBprPower;
    add_link(links, seen, make_link(tail, head, capacity, fft, b, power, reader.number),
             reader.number);
  }
  if (!cols) throw ParseError("missing header line", 0);
  return finish_links(std::move(links), std::nullopt, std::nullopt);
}

class TripsBuilder {
 public:
  TripsBuilder(std::optional<std::size_t> bound, TripsHeader& header)
      : bound_(bound), header_(header) {}

  void check_node(NodeIndex node, std::size_t line) const {
    if (bound_ && node >= *bound_)
      throw ParseError("node " + std::to_string(node + 1) + " exceeds node count " +
                           std::to_string(*bound_),
                       line);
  }

  void add(NodeIndex r, NodeIndex s, double q, std::size_t line) {
    check_node(r, line);
    check_node(s, line);
    if (q < 0.0) throw DomainError("line " + std::to_string(line) + ": negative demand");
    if (!seen_.emplace(r, s).second)
      throw ParseError("duplicate OD pair (" + std::to_string(r + 1) + "," +
                           std::to_string(s + 1) + ")",
                       line);
    if (q == 0.0) return;
    if (r == s) {
      ++header_.dropped_self_pairs;
      return;
    }
    entries_.push_back({r, s, q});
  }

  DemandTable finish() { return DemandTable(std::move(entries_)); }

 private:
  std::optional<std::size_t> bound_;
  TripsHeader& header_;
  std::set<std::pair<NodeIndex, NodeIndex>> seen_;
  std::vector<OdDemand> entries_;
};

DemandTable parse_trips_tntp(std::istream& in, std::optional<std::size_t> node_count,
                             TripsHeader& header) {
  LineReader reader(in);
  std::string tag;
  std::string_view value;

  struct Token {
    std::string text;
    std::size_t line;
  };
  std::vector<Token> tokens;
  while (reader.next()) {
    const std::string_view line = trim(reader.text);
    if (line.empty() || line.front() == '~') continue;
    if (metadata_line(line, tag, value, reader.number)) {
      if (tag == "NUMBER OF ZONES") header.zones = parse_count(value, reader.number, "zone count");
      if (tag == "TOTAL OD FLOW")
        header.total_flow = parse_number(value, reader.number, "total OD flow");
      continue;
    }
    std::string row;
    for (char c : line) {
      if (c == ':' || c == ';') {
        row += ' ';
        row += c;
        row += ' ';
      } else {
        row += c;
      }
    }
    for (std::string_view t : split_ws(row)) tokens.push_back({std::string(t), reader.number});
  }

  TripsBuilder builder(node_count ? node_count : header.zones, header);
  std::optional<NodeIndex> origin;
  for (std::size_t i = 0; i < tokens.size();) {
    const Token& t = tokens[i];
    if (t.text == ";") {
      ++i;
      continue;
    }
    if (t.text == "Origin" || t.text == "origin") {
      if (i + 1 >= tokens.size()) throw ParseError("'Origin' without a node id", t.line);
      origin = parse_node(tokens[i + 1].text, tokens[i + 1].line);
      builder.check_node(*origin, tokens[i + 1].line);
      i += 2;
      continue;
    }
    if (!origin) throw ParseError("demand entry before any 'Origin' line", t.line);
    if (i + 2 >= tokens.size() || tokens[i + 1].text != ":")
      throw ParseError("expected 'destination : demand'", t.line);
    const NodeIndex dest = parse_node(t.text, t.line);
    const double q = parse_number(tokens[i + 2].text, tokens[i + 2].line, "demand");
    builder.add(*origin, dest, q, t.line);
    i += 3;
  }
  return builder.finish();
}

DemandTable parse_trips_tabular(std::istream& in, std::optional<std::size_t> node_count,
                                TripsHeader& header) {
  LineReader reader(in);
  TripsBuilder builder(node_count, header);
  std::optional<std::map<std::string, std::size_t>> cols;
  while (reader.next()) {
    const std::string_view line = trim(reader.text);
    if (line.empty() || line.front() == '#') continue;
    if (!cols) {
      cols = header_columns(line, reader.number, {"origin", "destination", "demand"});
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != cols->size())
      throw ParseError("expected " + std::to_string(cols->size()) + " fields, found " +
                           std::to_string(f.size()),
                       reader.number);
    builder.add(parse_node(f[cols->at("origin")], reader.number),
                parse_node(f[cols->at("destination")], reader.number),
                parse_number(f[cols->at("demand")], reader.number, "demand"), reader.number);
  }
  if (!cols) throw ParseError("missing header line", 0);
  return builder.finish();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Network parse_links(std::istream& in, InputFormat format, LinksHeader* header) {
  LinksHeader local;
  LinksHeader& h = header ? *header : local;
  return format == InputFormat::tntp ? parse_links_tntp(in, h) : parse_links_tabular(in);
}

DemandTable parse_trips(std::istream& in, InputFormat format,
                        std::optional<std::size_t> node_count, TripsHeader* header) {
  TripsHeader local;
  TripsHeader& h = header ? *header : local;
  return format == InputFormat::tntp ? parse_trips_tntp(in, node_count, h)
                                     : parse_trips_tabular(in, node_count, h);
}

InputFormat detect_format(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".tntp") return InputFormat::tntp;
  if (ext == ".csv") return InputFormat::tabular;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c))
    if (!std::isspace(static_cast<unsigned char>(c))) break;
  return (c == '<' || c == '~') ? InputFormat::tntp : InputFormat::tabular;
}

ParsedProblem parse_problem(std::istream& links, InputFormat links_format, std::istream& trips,
                            InputFormat trips_format) {
  LinksHeader lh;
  Network net = parse_links(links, links_format, &lh);
  TripsHeader th;
  DemandTable demands = parse_trips(trips, trips_format, net.node_count(), &th);

  ParsedProblem p{Problem{std::move(net), std::move(demands)}, {}};
  p.metadata.format = links_format;
  p.metadata.declared_nodes = lh.nodes;
  p.metadata.declared_links = lh.links;
  p.metadata.declared_zones = th.zones;
  p.metadata.declared_total_flow = th.total_flow;
  p.metadata.dropped_self_pairs = th.dropped_self_pairs;
  return p;
}

ParsedProblem load_problem(const std::filesystem::path& links_path,
                           const std::filesystem::path& trips_path) {
  std::ifstream links(links_path);
  if (!links) throw ParseError("cannot open " + links_path.string(), 0);
  std::ifstream trips(trips_path);
  if (!trips) throw ParseError("cannot open " + trips_path.string(), 0);
  return parse_problem(links, detect_format(links_path), trips, detect_format(trips_path));
}

void require_good(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw Error("failed writing " + what);
}

void write_flows(const Network& network, std::span<const double> flows,
                 std::span<const double> times, std::ostream& out, OutputFormat format) {
  validate_flows(network, flows);
  if (times.size() != flows.size()) throw DomainError("travel time vector size mismatch");

  if (format == OutputFormat::csv) {
    out << "from,to,flow,travel_time\n";
    for (LinkIndex a = 0; a < flows.size(); ++a) {
      const Link& l = network.link(a);
      out << l.tail + 1 << ',' << l.head + 1 << ',' << format_double(flows[a]) << ','
          << format_double(times[a]) << '\n';
    }
  } else {
    json rows = json::array();
    for (LinkIndex a = 0; a < flows.size(); ++a) {
      const Link& l = network.link(a);
      rows.push_back({{"from", l.tail + 1},
                      {"to", l.head + 1},
                      {"flow", flows[a]},
                      {"travel_time", times[a]}});
    }
    out << json{{"links", rows}}.dump(2) << '\n';
  }
  require_good(out, "flow table");
}

std::vector<FlowRecord> parse_flows(std::istream& in, OutputFormat format) {
  std::vector<FlowRecord> records;
  if (format == OutputFormat::json) {
    try {
      const json doc = json::parse(in);
      for (const json& row : doc.at("links")) {
        const auto from = row.at("from").get<std::size_t>();
        const auto to = row.at("to").get<std::size_t>();
        if (from == 0 || to == 0) throw ParseError("node ids are 1-based", 0);
        records.push_back({from - 1, to - 1, row.at("flow").get<double>(),
                           row.contains("travel_time") ? row.at("travel_time").get<double>()
                                                       : 0.0});
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed flow JSON: ") + e.what(), 0);
    }
    return records;
  }

  LineReader reader(in);
  std::optional<std::map<std::string, std::size_t>> cols;
  while (reader.next()) {
    const std::string_view line = trim(reader.text);
    if (line.empty()) continue;
    if (!cols) {
      cols = header_columns(line, reader.number, {"from", "to", "flow"});
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != cols->size())
      throw ParseError("expected " + std::to_string(cols->size()) + " fields", reader.number);
    FlowRecord r;
    r.tail = parse_node(f[cols->at("from")], reader.number);
    r.head = parse_node(f[cols->at("to")], reader.number);
    r.flow = parse_number(f[cols->at("flow")], reader.number, "flow");
    if (cols->contains("travel_time"))
      r.travel_time = parse_number(f[cols->at("travel_time")], reader.number, "travel_time");
    records.push_back(r);
  }
  if (!cols) throw ParseError("missing header line", 0);
  return records;
}

FlowVector flows_for_network(const Network& network, const std::vector<FlowRecord>& records) {
  FlowVector x(network.link_count(), 0.0);
  std::vector<bool> filled(network.link_count(), false);
  for (const FlowRecord& r : records) {
    const auto id = network.find_link(r.tail, r.head);
    const std::string name = "(" + std::to_string(r.tail + 1) + "," + std::to_string(r.head + 1) + ")";
    if (!id) throw ParseError("flow record for unknown link " + name, 0);
    if (filled[*id]) throw ParseError("repeated flow record for link " + name, 0);
    if (r.flow < 0.0) throw DomainError("negative flow on link " + name);
    x[*id] = r.flow;
    filled[*id] = true;
  }
  if (std::find(filled.begin(), filled.end(), false) != filled.end())
    throw ParseError("flow table does not cover every link", 0);
  return x;
}

void write_report(const SolutionReport& report, std::ostream& out) {
  json doc{{"algorithm", report.algorithm},
           {"iterations", report.iterations},
           {"converged", report.converged},
           {"epsilon_history", report.epsilon_history},
           {"beckmann", report.beckmann},
           {"rgap", report.rgap ? json(*report.rgap) : json(nullptr)}};
  out << doc.dump(2) << '\n';
  require_good(out, "report");
}

void write_gap_report(const baseline::GapReport& report, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::json) {
    json od = json::array();
    for (const auto& g : report.od)
      od.push_back({{"origin", g.origin + 1},
                    {"destination", g.destination + 1},
                    {"demand", g.demand},
                    {"shortest_time", g.shortest_time},
                    {"max_min_gap", g.max_min_gap ? json(*g.max_min_gap) : json(nullptr)}});
    json doc{{"rgap", report.rgap ? json(*report.rgap) : json(nullptr)},
             {"principle1_delta",
              report.principle1_delta ? json(*report.principle1_delta) : json(nullptr)},
             {"total_travel_time", report.total_travel_time},
             {"shortest_path_travel_time", report.shortest_path_travel_time},
             {"od", od}};
    if (!report.path_gap_note.empty()) doc["path_gap_note"] = report.path_gap_note;
    out << doc.dump(2) << '\n';
  } else {
    out << "rgap: " << (report.rgap ? format_double(*report.rgap) : std::string("n/a")) << '\n'
        << "total_travel_time: " << format_double(report.total_travel_time) << '\n'
        << "shortest_path_travel_time: " << format_double(report.shortest_path_travel_time)
        << '\n';
    if (report.principle1_delta)
      out << "principle1_delta: " << format_double(*report.principle1_delta) << '\n';
    double worst = 0.0;
    bool any = false;
    for (const auto& g : report.od)
      if (g.max_min_gap) {
        worst = std::max(worst, *g.max_min_gap);
        any = true;
      }
    if (any) out << "max_od_path_gap: " << format_double(worst) << '\n';
    if (!report.path_gap_note.empty()) out << "note: " << report.path_gap_note << '\n';
  }
  require_good(out, "gap report");
}

}  // namespace ueassign::io
