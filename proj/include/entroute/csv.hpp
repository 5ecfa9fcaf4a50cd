#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entroute/strategies.hpp"

namespace entroute {

// One per-pair rate estimate, as serialized to results CSV.
struct RateCsvRecord {
  std::uint32_t pair_u = 0;
  std::uint32_t pair_v = 0;
  double distance_km = 0.0;
  Strategy strategy = Strategy::kBsm;
  double q = 0.0;
  double rate = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

inline std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_csv_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Rows sorted by pair, then strategy, then q; LF line endings.
inline void write_rate_csv(std::ostream& os, std::vector<RateCsvRecord> records) {
  std::sort(records.begin(), records.end(), [](const RateCsvRecord& a, const RateCsvRecord& b) {
    if (a.pair_u != b.pair_u) return a.pair_u < b.pair_u;
    if (a.pair_v != b.pair_v) return a.pair_v < b.pair_v;
    if (a.strategy != b.strategy) return a.strategy < b.strategy;
    return a.q < b.q;
  });
  os << "pair_u,pair_v,distance_km,strategy,q,rate,stderr,n_samples\n";
  for (const auto& r : records) {
    os << r.pair_u << ',' << r.pair_v << ',' << format_csv_double(r.distance_km) << ','
       << csv_quote(strategy_name(r.strategy)) << ',' << format_csv_double(r.q) << ','
       << format_csv_double(r.rate) << ',' << format_csv_double(r.std_error) << ','
       << r.n_samples << '\n';
  }
}

// Aggregate (average-rate) results: one row per (sweep value, strategy, q).
struct AverageCsvRecord {
  std::string sweep_name;  // "n", "side", or "none"
  double sweep_value = 0.0;
  Strategy strategy = Strategy::kBsm;
  double q = 0.0;
  double avg_rate = 0.0;
  double std_error = 0.0;
  std::int64_t n_pair_estimates = 0;
  std::int64_t samples_per_pair = 0;
};

inline void write_average_csv(std::ostream& os, std::vector<AverageCsvRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const AverageCsvRecord& a, const AverageCsvRecord& b) {
              if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
              if (a.strategy != b.strategy) return a.strategy < b.strategy;
              return a.q < b.q;
            });
  os << "sweep,sweep_value,strategy,q,avg_rate,stderr,n_pair_estimates,samples_per_pair\n";
  for (const auto& r : records) {
    os << csv_quote(r.sweep_name) << ',' << format_csv_double(r.sweep_value) << ','
       << csv_quote(strategy_name(r.strategy)) << ',' << format_csv_double(r.q) << ','
       << format_csv_double(r.avg_rate) << ',' << format_csv_double(r.std_error) << ','
       << r.n_pair_estimates << ',' << r.samples_per_pair << '\n';
  }
}

// Minimal reader for the two CSV schemas above (used by the plot command).
// Returns rows of fields; understands RFC-4180 quoting.
inline std::vector<std::vector<std::string>> read_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r': break;
      case '\n':
        if (any || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
          any = false;
        }
        break;
      default: field += c; any = true; break;
    }
  }
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace entroute
