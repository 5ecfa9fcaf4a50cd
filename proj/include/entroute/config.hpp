#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entroute/csv.hpp"
#include "entroute/montecarlo.hpp"

namespace entroute {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.size() - start
                                                                            : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
}

inline long long parse_int(std::string_view s, int line) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError("line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(std::string_view s, int line) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("line " + std::to_string(line) + ": bad boolean '" + std::string(s) + "'");
}

}  // namespace config_detail

// Experiment configs are flat key = value text with [sections]; '#' and ';'
// start comments; sweep lists are comma-separated. Unknown sections or keys
// are errors so typos cannot silently fall back to defaults.
inline ExperimentConfig parse_experiment_config(std::string_view text) {
  using namespace config_detail;
  ExperimentConfig cfg;
  cfg.strategies.clear();
  cfg.q_values.clear();

  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  bool kind_seen = false;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view raw =
        text.substr(start, end == std::string_view::npos ? text.size() - start : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string_view::npos) raw = raw.substr(0, comment);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "topology" && section != "link" && section != "strategies" &&
          section != "sampling")
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");

    if (section == "topology") {
      if (key == "kind") {
        kind_seen = true;
        if (value == "grid") cfg.topology.kind = TopologyKind::kGrid;
        else if (value == "waxman") cfg.topology.kind = TopologyKind::kWaxman;
        else if (value == "scalefree") cfg.topology.kind = TopologyKind::kScaleFree;
        else if (value == "file") cfg.topology.kind = TopologyKind::kFile;
        else throw ConfigError("line " + std::to_string(line_no) + ": unknown kind '" + value + "'");
      } else if (key == "sizes" || key == "nodes" || key == "side") {
        cfg.topology.sizes.clear();
        for (const auto& piece : split_list(value))
          cfg.topology.sizes.push_back(static_cast<int>(parse_int(piece, line_no)));
        if (cfg.topology.sizes.empty())
          throw ConfigError("line " + std::to_string(line_no) + ": empty size list");
      } else if (key == "region_km") {
        cfg.topology.region_km = parse_double(value, line_no);
      } else if (key == "alpha") {
        cfg.topology.alpha = parse_double(value, line_no);
      } else if (key == "beta") {
        cfg.topology.beta = parse_double(value, line_no);
      } else if (key == "m") {
        cfg.topology.edges_per_node = static_cast<int>(parse_int(value, line_no));
      } else if (key == "m0") {
        cfg.topology.seed_clique = static_cast<int>(parse_int(value, line_no));
      } else if (key == "mu") {
        cfg.topology.degree_exponent = parse_double(value, line_no);
      } else if (key == "nu") {
        cfg.topology.distance_exponent = parse_double(value, line_no);
      } else if (key == "path") {
        cfg.topology.path = value;
      } else {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown topology key '" + key + "'");
      }
    } else if (section == "link") {
      if (key == "gamma") cfg.link.gamma_per_km = parse_double(value, line_no);
      else if (key == "attempts") cfg.link.attempts = static_cast<int>(parse_int(value, line_no));
      else throw ConfigError("line " + std::to_string(line_no) + ": unknown link key '" + key + "'");
    } else if (section == "strategies") {
      if (key == "list") {
        cfg.strategies.clear();
        if (value == "all") {
          cfg.strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
        } else {
          for (const auto& piece : split_list(value)) {
            const auto s = strategy_from_name(piece);
            if (!s)
              throw ConfigError("line " + std::to_string(line_no) + ": unknown strategy '" +
                                piece + "'");
            cfg.strategies.push_back(*s);
          }
        }
      } else if (key == "q") {
        cfg.q_values.clear();
        for (const auto& piece : split_list(value))
          cfg.q_values.push_back(parse_double(piece, line_no));
      } else {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown strategies key '" + key +
                          "'");
      }
    } else if (section == "sampling") {
      if (key == "mode") {
        if (value == "average") cfg.mode = ExperimentMode::kAverageRate;
        else if (value == "rate_vs_distance") cfg.mode = ExperimentMode::kRateVsDistance;
        else throw ConfigError("line " + std::to_string(line_no) + ": unknown mode '" + value + "'");
      } else if (key == "topologies") {
        cfg.plan.topologies = static_cast<int>(parse_int(value, line_no));
      } else if (key == "pairs") {
        cfg.plan.pairs = value == "all" ? -1 : static_cast<int>(parse_int(value, line_no));
      } else if (key == "virtual_samples") {
        cfg.plan.virtual_samples = static_cast<int>(parse_int(value, line_no));
      } else if (key == "same_component_only") {
        cfg.plan.same_component_only = parse_bool(value, line_no);
      } else if (key == "master_seed") {
        cfg.master_seed = static_cast<std::uint64_t>(parse_int(value, line_no));
      } else {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown sampling key '" + key +
                          "'");
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    }
  }

  if (!kind_seen) throw ConfigError("config: missing [topology] kind");
  if (cfg.strategies.empty()) throw ConfigError("config: [strategies] list is required");
  if (cfg.q_values.empty()) throw ConfigError("config: [strategies] q is required");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

// Canonical echo of a resolved config; parses back to an equivalent config.
inline std::string serialize_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[topology]\n";
  os << "kind = " << topology_kind_name(cfg.topology.kind) << "\n";
  if (cfg.topology.kind == TopologyKind::kFile) {
    os << "path = " << cfg.topology.path << "\n";
  } else {
    os << "sizes = ";
    for (std::size_t i = 0; i < cfg.topology.sizes.size(); ++i)
      os << (i ? "," : "") << cfg.topology.sizes[i];
    os << "\n";
    os << "region_km = " << format_csv_double(cfg.topology.region_km) << "\n";
  }
  if (cfg.topology.kind == TopologyKind::kWaxman) {
    os << "alpha = " << format_csv_double(cfg.topology.alpha) << "\n";
    os << "beta = " << format_csv_double(cfg.topology.beta) << "\n";
  } else if (cfg.topology.kind == TopologyKind::kScaleFree) {
    os << "m = " << cfg.topology.edges_per_node << "\n";
    os << "m0 = " << cfg.topology.seed_clique << "\n";
    os << "mu = " << format_csv_double(cfg.topology.degree_exponent) << "\n";
    os << "nu = " << format_csv_double(cfg.topology.distance_exponent) << "\n";
  }
  os << "\n[link]\n";
  os << "gamma = " << format_csv_double(cfg.link.gamma_per_km) << "\n";
  os << "attempts = " << cfg.link.attempts << "\n";
  os << "\n[strategies]\n";
  os << "list = ";
  for (std::size_t i = 0; i < cfg.strategies.size(); ++i)
    os << (i ? "," : "") << strategy_name(cfg.strategies[i]);
  os << "\n";
  os << "q = ";
  for (std::size_t i = 0; i < cfg.q_values.size(); ++i)
    os << (i ? "," : "") << format_csv_double(cfg.q_values[i]);
  os << "\n";
  os << "\n[sampling]\n";
  os << "mode = "
     << (cfg.mode == ExperimentMode::kAverageRate ? "average" : "rate_vs_distance") << "\n";
  os << "topologies = " << cfg.plan.topologies << "\n";
  os << "pairs = " << (cfg.plan.pairs < 0 ? std::string("all") : std::to_string(cfg.plan.pairs))
     << "\n";
  os << "virtual_samples = " << cfg.plan.virtual_samples << "\n";
  os << "same_component_only = " << (cfg.plan.same_component_only ? "true" : "false") << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  return os.str();
}

}  // namespace entroute
