#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "entroute/analytics.hpp"
#include "entroute/config.hpp"
#include "entroute/csv.hpp"
#include "entroute/generators.hpp"
#include "entroute/manifest.hpp"
#include "entroute/montecarlo.hpp"
#include "entroute/svg.hpp"
#include "entroute/topology_format.hpp"
#include "entroute/version.hpp"

namespace {

using namespace entroute;
namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_topology(const PhysicalTopology& topo, const fs::path& out_path) {
  write_file(out_path, write_topology_string(topo));
  std::printf("wrote %s: %zu nodes, %zu edges\n", out_path.string().c_str(), topo.node_count(),
              topo.edge_count());
}

std::string series_label(Strategy s, double q, bool include_q) {
  std::string label{strategy_name(s)};
  if (include_q) label += " q=" + std::string(format_csv_double(q));
  return label;
}

std::string rate_csv_string(const std::vector<PairRateRecord>& records) {
  std::vector<RateCsvRecord> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({r.estimate.pair.u, r.estimate.pair.v, r.estimate.distance_km, r.strategy, r.q,
                    r.estimate.mean, r.estimate.std_error, r.estimate.n_samples});
  }
  std::ostringstream os;
  write_rate_csv(os, std::move(rows));
  return os.str();
}

std::string average_csv_string(const std::string& sweep_name,
                               const std::vector<AverageRateRecord>& records) {
  std::vector<AverageCsvRecord> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({sweep_name, r.sweep_value, r.strategy, r.q, r.mean, r.std_error,
                    r.n_pair_estimates, r.samples_per_pair});
  }
  std::ostringstream os;
  write_average_csv(os, std::move(rows));
  return os.str();
}

// Build plot series from one of the two CSV schemas written by `run`.
std::vector<PlotSeries> series_from_csv(const std::vector<std::vector<std::string>>& rows,
                                        const std::string& kind, std::string& x_label,
                                        std::string& y_label) {
  if (rows.empty()) return {};
  const auto& header = rows.front();
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  std::map<std::string, PlotSeries> by_label;
  if (kind == "rate_vs_distance") {
    for (const auto& name : {"distance_km", "strategy", "q", "rate"})
      if (!col.count(name))
        throw std::invalid_argument(std::string("csv is missing column '") + name + "'");
    std::set<std::string> qs;
    for (std::size_t i = 1; i < rows.size(); ++i) qs.insert(rows[i][col["q"]]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const std::string label =
          r[col["strategy"]] + (qs.size() > 1 ? " q=" + r[col["q"]] : "");
      by_label[label].label = label;
      by_label[label].points.emplace_back(std::stod(r[col["distance_km"]]),
                                          std::stod(r[col["rate"]]));
    }
    x_label = "distance (km)";
    y_label = "rate (pairs/cycle)";
  } else if (kind == "average_rate") {
    for (const auto& name : {"sweep_value", "strategy", "q", "avg_rate"})
      if (!col.count(name))
        throw std::invalid_argument(std::string("csv is missing column '") + name + "'");
    std::set<std::string> sweeps;
    for (std::size_t i = 1; i < rows.size(); ++i) sweeps.insert(rows[i][col["sweep_value"]]);
    const bool sweep_axis = sweeps.size() > 1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const std::string label =
          r[col["strategy"]] + (sweep_axis ? " q=" + r[col["q"]] : "");
      by_label[label].label = label;
      by_label[label].points.emplace_back(
          std::stod(sweep_axis ? r[col["sweep_value"]] : r[col["q"]]),
          std::stod(r[col["avg_rate"]]));
    }
    x_label = sweep_axis ? "network size" : "measurement success probability q";
    y_label = "average rate (pairs/cycle)";
  } else {
    throw std::invalid_argument("unknown plot kind '" + kind + "'");
  }

  std::vector<PlotSeries> out;
  for (auto& [_, s] : by_label) out.push_back(std::move(s));
  return out;
}

int run_experiment_command(const std::string& config_path, std::uint64_t seed_override,
                           bool have_seed_override, int threads, const std::string& out_dir,
                           const std::string& format, const std::string& sweep_param,
                           const std::vector<std::string>& sweep_values) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (have_seed_override) cfg.master_seed = seed_override;

  if (!sweep_param.empty()) {
    if (sweep_values.empty()) throw ConfigError("sweep: --values is required");
    if (sweep_param == "q") {
      cfg.q_values.clear();
      for (const auto& v : sweep_values) cfg.q_values.push_back(std::stod(v));
    } else if (sweep_param == "size") {
      if (cfg.topology.kind == TopologyKind::kFile)
        throw ConfigError("sweep: file topologies have no size parameter");
      cfg.topology.sizes.clear();
      for (const auto& v : sweep_values) cfg.topology.sizes.push_back(std::stoi(v));
    } else {
      throw ConfigError("sweep: unknown parameter '" + sweep_param + "' (use q or size)");
    }
    cfg.validate();
  }

  RunManifest manifest;
  manifest.master_seed = cfg.master_seed;
  manifest.config_echo = serialize_experiment_config(cfg);
  manifest.started_utc = utc_timestamp_now();

  const fs::path dir(out_dir);
  fs::create_directories(dir);

  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const ExperimentResults results = run_experiment(cfg, threads);

  const std::string sweep_name = cfg.topology.kind == TopologyKind::kGrid ? "side"
                                 : cfg.topology.kind == TopologyKind::kFile ? "none"
                                                                            : "n";
  if (cfg.mode == ExperimentMode::kRateVsDistance) {
    const fs::path csv_path = dir / "rates.csv";
    write_file(csv_path, rate_csv_string(results.pair_rates));
    manifest.outputs.push_back(csv_path.string());
    std::printf("wrote %s (%zu records)\n", csv_path.string().c_str(),
                results.pair_rates.size());
    if (format == "svg") {
      std::map<std::string, PlotSeries> by_label;
      const bool multi_q = cfg.q_values.size() > 1;
      for (const auto& r : results.pair_rates) {
        const std::string label = series_label(r.strategy, r.q, multi_q);
        by_label[label].label = label;
        by_label[label].points.emplace_back(r.estimate.distance_km, r.estimate.mean);
      }
      std::vector<PlotSeries> series;
      for (auto& [_, s] : by_label) series.push_back(std::move(s));
      PlotOptions opt{"rate vs distance", "distance (km)", "rate (pairs/cycle)", false, false};
      const fs::path svg_path = dir / "rates.svg";
      write_file(svg_path, render_svg_plot(series, opt));
      manifest.outputs.push_back(svg_path.string());
      std::printf("wrote %s\n", svg_path.string().c_str());
    }
  } else {
    const fs::path csv_path = dir / "average_rates.csv";
    write_file(csv_path, average_csv_string(sweep_name, results.averages));
    manifest.outputs.push_back(csv_path.string());
    std::printf("wrote %s (%zu records)\n", csv_path.string().c_str(), results.averages.size());
    if (format == "svg") {
      std::map<std::string, PlotSeries> by_label;
      const bool sweep_axis = cfg.topology.sizes.size() > 1 &&
                              cfg.topology.kind != TopologyKind::kFile;
      for (const auto& r : results.averages) {
        const std::string label = series_label(r.strategy, r.q, sweep_axis && cfg.q_values.size() > 1);
        by_label[label].label = label;
        by_label[label].points.emplace_back(sweep_axis ? r.sweep_value : r.q, r.mean);
      }
      std::vector<PlotSeries> series;
      for (auto& [_, s] : by_label) series.push_back(std::move(s));
      PlotOptions opt{"average rate", sweep_axis ? "network size" : "q",
                      "average rate (pairs/cycle)", false, true};
      const fs::path svg_path = dir / "average_rates.svg";
      write_file(svg_path, render_svg_plot(series, opt));
      manifest.outputs.push_back(svg_path.string());
      std::printf("wrote %s\n", svg_path.string().c_str());
    }
  }

  manifest.finished_utc = utc_timestamp_now();
  write_manifest_atomic(dir / "manifest.json", manifest);
  std::printf("wrote %s\n", (dir / "manifest.json").string().c_str());
  return 0;
}

int analyze_command(const WaxmanAnalyticParams& params, std::int64_t mc_samples,
                    std::int64_t corr_samples, std::uint64_t seed) {
  params.validate();
  RngStream mean_rng(derive_key(seed, StreamDomain::kGeneric, 1, 0, 0));
  const MeanEdgeProb e = mean_edge_prob(params, mc_samples, mean_rng);
  const PathCountResult paths = expected_paths(params.nodes, e.mean);
  const double threshold = connectivity_threshold(params.nodes);
  RngStream corr_rng(derive_key(seed, StreamDomain::kGeneric, 2, 0, 0));
  const CorrelationEstimate rho = path_prob_correlation(params, corr_samples, corr_rng);

  std::printf("Waxman analytics (R=%g km, alpha=%g, beta=%g, gamma=%g /km, attempts=%d, N=%d)\n",
              params.region_km, params.alpha, params.beta, params.link.gamma_per_km,
              params.link.attempts, params.nodes);
  std::printf("  %-34s %.6g +- %.2g  (%lld samples)\n", "mean edge probability E:", e.mean,
              e.std_error, static_cast<long long>(e.n_samples));
  std::printf("  %-34s %.6g  (log: %.6g)\n", "expected path count:", paths.series,
              paths.log_series);
  if (paths.lower)
    std::printf("  %-34s %.6g\n", "lower bound:", *paths.lower);
  else
    std::printf("  %-34s undefined (E*N <= 1)\n", "lower bound:");
  std::printf("  %-34s %.6g\n", "upper bound:", paths.upper);
  std::printf("  %-34s %.6g  (log: %.6g)\n", "asymptotic form:", paths.asymptotic,
              paths.log_asymptotic);
  std::printf("  %-34s %.6g  (leading order)\n", "connectivity threshold E*:", threshold);
  if (rho.rho)
    std::printf("  %-34s %.4g +- %.2g  (%lld samples)\n", "adjacent-hop correlation rho:",
                *rho.rho, rho.std_error, static_cast<long long>(rho.n_samples));
  else
    std::printf("  %-34s undefined (degenerate)\n", "adjacent-hop correlation rho:");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement routing rate simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool have_seed = false;
  int threads = 0;
  std::string out_dir = ".";
  std::string format = "csv";
  app.add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
    have_seed = true;
  });
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--format", format, "output format for run/sweep")
      ->check(CLI::IsMember({"csv", "svg"}));

  // generate
  auto* generate = app.add_subcommand("generate", "generate a physical topology file");
  generate->require_subcommand(1);
  std::string gen_out = "topology.topo";
  GridSpec grid_spec;
  auto* gen_grid = generate->add_subcommand("grid", "square grid topology");
  gen_grid->add_option("--side", grid_spec.nodes_per_side, "nodes per side")->required();
  gen_grid->add_option("--region", grid_spec.region_km, "region size in km");
  gen_grid->add_option("--out", gen_out, "output path");

  WaxmanSpec waxman_spec;
  auto* gen_waxman_cmd = generate->add_subcommand("waxman", "Waxman random topology");
  gen_waxman_cmd->add_option("--nodes", waxman_spec.nodes, "node count")->required();
  gen_waxman_cmd->add_option("--region", waxman_spec.region_km, "region size in km");
  gen_waxman_cmd->add_option("--alpha", waxman_spec.alpha, "Waxman alpha");
  gen_waxman_cmd->add_option("--beta", waxman_spec.beta, "Waxman beta");
  gen_waxman_cmd->add_option("--out", gen_out, "output path");

  ScaleFreeSpec sf_spec;
  auto* gen_sf = generate->add_subcommand("scalefree", "spatial scale-free topology");
  gen_sf->add_option("--nodes", sf_spec.nodes, "node count")->required();
  gen_sf->add_option("--region", sf_spec.region_km, "region size in km");
  gen_sf->add_option("--m", sf_spec.edges_per_node, "edges per new node");
  gen_sf->add_option("--m0", sf_spec.seed_clique, "seed clique size");
  gen_sf->add_option("--mu", sf_spec.degree_exponent, "degree exponent");
  gen_sf->add_option("--nu", sf_spec.distance_exponent, "distance exponent");
  gen_sf->add_option("--out", gen_out, "output path");

  // run / sweep
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  std::string config_path;
  run->add_option("--config", config_path, "experiment config file")->required();

  auto* sweep = app.add_subcommand("sweep", "run a config with an overridden sweep list");
  std::string sweep_config, sweep_param;
  std::vector<std::string> sweep_values;
  sweep->add_option("--config", sweep_config, "experiment config file")->required();
  sweep->add_option("--param", sweep_param, "parameter to sweep (q or size)")->required();
  sweep->add_option("--values", sweep_values, "comma-separated sweep values")
      ->required()
      ->delimiter(',');

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Waxman phase-transition analytics");
  WaxmanAnalyticParams analytic_params;
  std::int64_t mc_samples = 2'000'000;
  std::int64_t corr_samples = 2'000'000;
  analyze->add_option("--nodes", analytic_params.nodes, "node count N");
  analyze->add_option("--region", analytic_params.region_km, "region size in km");
  analyze->add_option("--alpha", analytic_params.alpha, "Waxman alpha");
  analyze->add_option("--beta", analytic_params.beta, "Waxman beta");
  analyze->add_option("--gamma", analytic_params.link.gamma_per_km, "fiber loss (1/km)");
  analyze->add_option("--attempts", analytic_params.link.attempts, "transmission attempts");
  analyze->add_option("--mc-samples", mc_samples, "samples for the mean edge probability");
  analyze->add_option("--corr-samples", corr_samples, "samples for the correlation coefficient");

  // plot
  auto* plot = app.add_subcommand("plot", "render a results CSV as an SVG plot");
  std::string plot_csv, plot_kind = "rate_vs_distance", plot_out = "plot.svg";
  bool log_y = false;
  plot->add_option("--csv", plot_csv, "input CSV (from run)")->required();
  plot->add_option("--kind", plot_kind, "csv schema")
      ->check(CLI::IsMember({"rate_vs_distance", "average_rate"}));
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_flag("--log-y", log_y, "logarithmic y axis");

  try {
    app.parse(argc, argv);

    if (generate->parsed()) {
      const fs::path out = fs::path(out_dir) / gen_out;
      fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
      if (gen_grid->parsed()) {
        save_topology(gen_square_grid(grid_spec), out);
      } else if (gen_waxman_cmd->parsed()) {
        RngStream rng(derive_key(seed, StreamDomain::kTopology, 0, 0, 0));
        save_topology(gen_waxman(waxman_spec, rng), out);
      } else {
        RngStream rng(derive_key(seed, StreamDomain::kTopology, 0, 0, 0));
        save_topology(gen_scale_free(sf_spec, rng), out);
      }
      return 0;
    }
    if (run->parsed())
      return run_experiment_command(config_path, seed, have_seed, threads, out_dir, format, "",
                                    {});
    if (sweep->parsed())
      return run_experiment_command(sweep_config, seed, have_seed, threads, out_dir, format,
                                    sweep_param, sweep_values);
    if (analyze->parsed()) return analyze_command(analytic_params, mc_samples, corr_samples, seed);
    if (plot->parsed()) {
      const auto rows = read_csv(read_file(plot_csv));
      if (rows.size() <= 1) std::fprintf(stderr, "warning: %s has no data rows\n", plot_csv.c_str());
      std::string x_label, y_label;
      const auto series = series_from_csv(rows, plot_kind, x_label, y_label);
      PlotOptions opt{plot_kind == "rate_vs_distance" ? "rate vs distance" : "average rate",
                      x_label, y_label, log_y, plot_kind != "rate_vs_distance"};
      const fs::path out = fs::path(out_dir) / plot_out;
      write_file(out, render_svg_plot(series, opt));
      std::printf("wrote %s\n", out.string().c_str());
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
