#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "entroute/graph.hpp"

namespace entroute {

struct ParseError : std::runtime_error {
  ParseError(int line_, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_) + ": " + message), line(line_) {}
  int line;
};

struct GeoNode {
  std::int64_t id = 0;
  std::string label;
  std::optional<double> longitude;  // degrees east
  std::optional<double> latitude;   // degrees north
};

inline constexpr double kEarthRadiusKm = 6371.0;

// Equirectangular projection about the mean latitude of the located nodes;
// nodes without coordinates are placed at the centroid of the located ones.
// Output is translated so the bounding box's lower-left corner is (0,0).
// Adequate at country scale (distortion < 1% for extents of a few hundred km).
inline std::vector<Position> project_to_km(std::span<const GeoNode> nodes) {
  double lon_sum = 0.0, lat_sum = 0.0;
  std::size_t located = 0;
  for (const auto& n : nodes) {
    if (n.longitude && n.latitude) {
      lon_sum += *n.longitude;
      lat_sum += *n.latitude;
      ++located;
    }
  }
  if (located == 0) throw std::invalid_argument("project_to_km: no located node");
  const double lon0 = lon_sum / located;
  const double lat0 = lat_sum / located;

  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  const double kx = kEarthRadiusKm * std::cos(lat0 * kDegToRad) * kDegToRad;
  const double ky = kEarthRadiusKm * kDegToRad;

  std::vector<Position> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) {
    const double lon = n.longitude && n.latitude ? *n.longitude : lon0;
    const double lat = n.longitude && n.latitude ? *n.latitude : lat0;
    out.push_back({kx * lon, ky * lat});
  }
  double min_x = out[0].x_km, min_y = out[0].y_km;
  for (const auto& p : out) {
    min_x = std::min(min_x, p.x_km);
    min_y = std::min(min_y, p.y_km);
  }
  for (auto& p : out) {
    p.x_km -= min_x;
    p.y_km -= min_y;
  }
  return out;
}

namespace gml_detail {

struct Value;
using List = std::vector<std::pair<std::string, Value>>;

struct Value {
  std::variant<std::string, List> data;  // scalar kept as raw text
  int line = 0;

  bool is_list() const { return std::holds_alternative<List>(data); }
  const List& list() const { return std::get<List>(data); }
  const std::string& scalar() const { return std::get<std::string>(data); }
};

struct Token {
  enum Kind { kWord, kString, kOpen, kClose, kEnd } kind;
  std::string text;
  int line;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    if (pos_ >= text_.size()) return {Token::kEnd, "", line_};
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      return {Token::kOpen, "[", line_};
    }
    if (c == ']') {
      ++pos_;
      return {Token::kClose, "]", line_};
    }
    if (c == '"') {
      const int start_line = line_;
      ++pos_;
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\n') ++line_;
        s.push_back(text_[pos_++]);
      }
      if (pos_ >= text_.size()) throw ParseError(start_line, "unterminated string");
      ++pos_;
      return {Token::kString, std::move(s), start_line};
    }
    std::string w;
    const int start_line = line_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '[' && text_[pos_] != ']') {
      w.push_back(text_[pos_++]);
    }
    return {Token::kWord, std::move(w), start_line};
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

// Parses a brace-balanced key/value list; `closed` distinguishes the
// top-level list (terminated by end of input) from a bracketed block.
inline List parse_list(Lexer& lex, bool closed, int open_line) {
  List items;
  for (;;) {
    Token key = lex.next();
    if (key.kind == Token::kEnd) {
      if (closed) throw ParseError(open_line, "unbalanced brackets: missing ']'");
      return items;
    }
    if (key.kind == Token::kClose) {
      if (!closed) throw ParseError(key.line, "unbalanced brackets: unexpected ']'");
      return items;
    }
    if (key.kind != Token::kWord) throw ParseError(key.line, "expected a key");

    Token val = lex.next();
    switch (val.kind) {
      case Token::kOpen: {
        Value v;
        v.line = val.line;
        v.data = parse_list(lex, true, val.line);
        items.emplace_back(std::move(key.text), std::move(v));
        break;
      }
      case Token::kWord:
      case Token::kString: {
        Value v;
        v.line = val.line;
        v.data = std::move(val.text);
        items.emplace_back(std::move(key.text), std::move(v));
        break;
      }
      default: throw ParseError(val.line, "missing value for key '" + key.text + "'");
    }
  }
}

inline const Value* find(const List& list, std::string_view key) {
  for (const auto& [k, v] : list)
    if (k == key) return &v;
  return nullptr;
}

inline std::int64_t to_int(const Value& v, std::string_view what) {
  if (v.is_list()) throw ParseError(v.line, std::string(what) + ": expected an integer");
  const auto& s = v.scalar();
  std::int64_t out = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError(v.line, std::string(what) + ": bad integer '" + s + "'");
  return out;
}

inline double to_double(const Value& v, std::string_view what) {
  if (v.is_list()) throw ParseError(v.line, std::string(what) + ": expected a number");
  const auto& s = v.scalar();
  try {
    std::size_t used = 0;
    const double out = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return out;
  } catch (const std::exception&) {
    throw ParseError(v.line, std::string(what) + ": bad number '" + s + "'");
  }
}

}  // namespace gml_detail

struct GmlParseResult {
  PhysicalTopology topology;
  std::vector<GeoNode> geo_nodes;  // in topology id order
  std::vector<std::string> warnings;
};

// Parses the Topology Zoo GML dialect:
//   graph [ node [ id .. label .. Longitude .. Latitude .. ] edge [ source .. target .. ] ]
// Node ids are re-indexed contiguously in order of appearance; duplicate edges
// and self-loops are dropped with a warning; nodes lacking coordinates get the
// centroid of the located nodes. Positions are projected to km and translated
// so the bounding box's lower-left corner is (0,0).
inline GmlParseResult parse_gml(std::string_view text) {
  gml_detail::Lexer lex(text);
  const gml_detail::List document = gml_detail::parse_list(lex, false, 1);

  const gml_detail::Value* graph = gml_detail::find(document, "graph");
  if (!graph || !graph->is_list()) throw ParseError(1, "missing 'graph [ ... ]' block");

  std::vector<GeoNode> geo_nodes;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  std::vector<int> edge_lines;
  std::vector<std::string> warnings;

  for (const auto& [key, value] : graph->list()) {
    if (key == "node") {
      if (!value.is_list()) throw ParseError(value.line, "node: expected a block");
      const auto& block = value.list();
      const auto* id = gml_detail::find(block, "id");
      if (!id) throw ParseError(value.line, "node: missing id");
      GeoNode node;
      node.id = gml_detail::to_int(*id, "node id");
      if (const auto* label = gml_detail::find(block, "label"); label && !label->is_list())
        node.label = label->scalar();
      const auto* lon = gml_detail::find(block, "Longitude");
      const auto* lat = gml_detail::find(block, "Latitude");
      if (lon && lat) {
        node.longitude = gml_detail::to_double(*lon, "Longitude");
        node.latitude = gml_detail::to_double(*lat, "Latitude");
        if (std::abs(*node.latitude) > 90.0)
          throw ParseError(lat->line, "latitude out of range");
        if (std::abs(*node.longitude) > 180.0)
          throw ParseError(lon->line, "longitude out of range");
      }
      geo_nodes.push_back(std::move(node));
    } else if (key == "edge") {
      if (!value.is_list()) throw ParseError(value.line, "edge: expected a block");
      const auto& block = value.list();
      const auto* source = gml_detail::find(block, "source");
      const auto* target = gml_detail::find(block, "target");
      if (!source) throw ParseError(value.line, "edge: missing source");
      if (!target) throw ParseError(value.line, "edge: missing target");
      raw_edges.emplace_back(gml_detail::to_int(*source, "edge source"),
                             gml_detail::to_int(*target, "edge target"));
      edge_lines.push_back(value.line);
    }
  }

  if (geo_nodes.empty()) throw ParseError(1, "graph has no nodes");

  // Re-index node ids contiguously in order of appearance.
  std::vector<std::pair<std::int64_t, NodeId>> id_map;
  for (const auto& n : geo_nodes) {
    for (const auto& [raw, _] : id_map)
      if (raw == n.id) throw ParseError(1, "duplicate node id " + std::to_string(n.id));
    id_map.emplace_back(n.id, static_cast<NodeId>(id_map.size()));
  }
  const auto lookup = [&](std::int64_t raw, int line) {
    for (const auto& [r, mapped] : id_map)
      if (r == raw) return mapped;
    throw ParseError(line, "edge references unknown node id " + std::to_string(raw));
  };

  std::size_t missing = 0;
  for (const auto& n : geo_nodes)
    if (!(n.longitude && n.latitude)) ++missing;
  if (missing == geo_nodes.size()) throw ParseError(1, "no node has coordinates");
  for (const auto& n : geo_nodes) {
    if (!(n.longitude && n.latitude))
      warnings.push_back("node " + std::to_string(n.id) + " ('" + n.label +
                         "') has no coordinates; placed at centroid");
  }

  std::vector<EdgeEndpoints> edges;
  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    NodeId a = lookup(raw_edges[i].first, edge_lines[i]);
    NodeId b = lookup(raw_edges[i].second, edge_lines[i]);
    if (a == b) {
      warnings.push_back("self-loop on node " + std::to_string(raw_edges[i].first) + " dropped");
      continue;
    }
    if (a > b) std::swap(a, b);
    bool duplicate = false;
    for (const auto& e : edges) {
      if (e.a == a && e.b == b) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      warnings.push_back("duplicate edge " + std::to_string(raw_edges[i].first) + "-" +
                         std::to_string(raw_edges[i].second) + " dropped");
      continue;
    }
    edges.push_back({a, b});
  }

  const std::vector<Position> positions = project_to_km(geo_nodes);
  double max_x = 0.0, max_y = 0.0;
  for (const auto& p : positions) {
    max_x = std::max(max_x, p.x_km);
    max_y = std::max(max_y, p.y_km);
  }
  PhysicalTopology topo(positions, std::move(edges), std::max(max_x, max_y));
  return {std::move(topo), std::move(geo_nodes), std::move(warnings)};
}

}  // namespace entroute
