#pragma once

#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entroute/gml.hpp"
#include "entroute/graph.hpp"

namespace entroute {

// Full-precision decimal rendering; shortest form that round-trips a double.
inline std::string format_full(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Native plain-text topology format:
//   R <km>
//   N <id> <x> <y>     (one per node, ids ascending from 0)
//   E <u> <v>          (one per edge)
// Positions carry full precision, so read(write(t)) == t exactly.
inline void write_topology(std::ostream& os, const PhysicalTopology& topo) {
  os << "R " << format_full(topo.region_km()) << "\n";
  for (NodeId v = 0; v < topo.node_count(); ++v) {
    const auto& p = topo.position(v);
    os << "N " << v << " " << format_full(p.x_km) << " " << format_full(p.y_km) << "\n";
  }
  for (const auto& e : topo.edges()) os << "E " << e.a << " " << e.b << "\n";
}

inline std::string write_topology_string(const PhysicalTopology& topo) {
  std::ostringstream os;
  write_topology(os, topo);
  return os.str();
}

inline PhysicalTopology read_topology(std::string_view text) {
  bool have_region = false;
  double region = 0.0;
  std::vector<Position> positions;
  std::vector<EdgeEndpoints> edges;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line =
        text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;

    std::istringstream fields{std::string(line)};
    std::string tag;
    fields >> tag;
    if (tag == "R") {
      if (!(fields >> region) || region < 0.0) throw ParseError(line_no, "bad region size");
      have_region = true;
    } else if (tag == "N") {
      long long id = 0;
      double x = 0.0, y = 0.0;
      if (!(fields >> id >> x >> y)) throw ParseError(line_no, "bad node line");
      if (id != static_cast<long long>(positions.size()))
        throw ParseError(line_no, "node ids must be contiguous from 0");
      positions.push_back({x, y});
    } else if (tag == "E") {
      long long u = 0, v = 0;
      if (!(fields >> u >> v)) throw ParseError(line_no, "bad edge line");
      if (u < 0 || v < 0 || u >= static_cast<long long>(positions.size()) ||
          v >= static_cast<long long>(positions.size()))
        throw ParseError(line_no, "edge references unknown node");
      edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    } else {
      throw ParseError(line_no, "unknown line tag '" + tag + "'");
    }
    std::string extra;
    if (fields >> extra) throw ParseError(line_no, "trailing content '" + extra + "'");
  }
  if (!have_region) throw ParseError(line_no, "missing 'R <km>' header");
  try {
    return {std::move(positions), std::move(edges), region};
  } catch (const std::invalid_argument& err) {
    throw ParseError(line_no, std::string("invalid topology: ") + err.what());
  }
}

}  // namespace entroute
