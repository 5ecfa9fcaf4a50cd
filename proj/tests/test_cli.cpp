#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "entroute/csv.hpp"
#include "entroute/topology_format.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ENTROUTE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

const char* kGridConfig = R"([topology]
kind = grid
side = 3

[strategies]
list = bsm, hybrid
q = 0.8

[sampling]
mode = rate_vs_distance
pairs = 6
virtual_samples = 40
master_seed = 5
)";

}  // namespace

TEST_CASE("generate writes deterministic topology files") {
  test_util::TempDir tmp("cli_gen");
  const auto out1 = (tmp.path / "a.topo").string();
  const auto out2 = (tmp.path / "b.topo").string();
  REQUIRE(run_cli("generate grid --side 4 --out " + out1) == 0);
  const auto text = test_util::read_file(out1);
  REQUIRE(test_util::read_file(out1).find("R 100") == 0);
  const auto topo = entroute::read_topology(text);
  REQUIRE(topo.node_count() == 16);
  REQUIRE(topo.edge_count() == 24);

  REQUIRE(run_cli("--seed 7 generate waxman --nodes 30 --out " + out1) == 0);
  REQUIRE(run_cli("--seed 7 generate waxman --nodes 30 --out " + out2) == 0);
  REQUIRE(test_util::read_file(out1) == test_util::read_file(out2));

  REQUIRE(run_cli("--seed 7 generate scalefree --nodes 30 --out " + out1) == 0);
  const auto sf = entroute::read_topology(test_util::read_file(out1));
  REQUIRE(sf.edge_count() == 15 + 5 * 24);
}

TEST_CASE("run produces csv and manifest; sweep and plot consume them") {
  test_util::TempDir tmp("cli_run");
  const auto cfg_path = tmp.path / "exp.cfg";
  test_util::write_file(cfg_path, kGridConfig);

  const std::string out_dir = (tmp.path / "out").string();
  REQUIRE(run_cli("--out-dir " + out_dir + " run --config " + cfg_path.string()) == 0);
  REQUIRE(fs::exists(fs::path(out_dir) / "rates.csv"));
  REQUIRE(fs::exists(fs::path(out_dir) / "manifest.json"));

  const auto rows = entroute::read_csv(test_util::read_file(fs::path(out_dir) / "rates.csv"));
  REQUIRE(rows.size() == 1 + 6 * 2);  // header + pairs x strategies

  const auto manifest = test_util::read_file(fs::path(out_dir) / "manifest.json");
  REQUIRE(manifest.find("\"master_seed\": 5") != std::string::npos);
  REQUIRE(manifest.find("rates.csv") != std::string::npos);

  SECTION("plot renders the csv deterministically") {
    const auto svg1 = (tmp.path / "p1.svg").string();
    const auto svg2 = (tmp.path / "p2.svg").string();
    const std::string csv = (fs::path(out_dir) / "rates.csv").string();
    REQUIRE(run_cli("plot --csv " + csv + " --kind rate_vs_distance --out " + svg1) == 0);
    REQUIRE(run_cli("plot --csv " + csv + " --kind rate_vs_distance --log-y --out " + svg2) == 0);
    REQUIRE(test_util::read_file(svg1).find("<svg") == 0);
    REQUIRE(run_cli("plot --csv " + csv + " --kind rate_vs_distance --out " + svg2) == 0);
    REQUIRE(test_util::read_file(svg1) == test_util::read_file(svg2));
  }

  SECTION("sweep overrides the q list") {
    const std::string sweep_dir = (tmp.path / "sweep").string();
    REQUIRE(run_cli("--out-dir " + sweep_dir + " sweep --config " + cfg_path.string() +
                    " --param q --values 0.5,0.9") == 0);
    const auto sweep_rows =
        entroute::read_csv(test_util::read_file(fs::path(sweep_dir) / "rates.csv"));
    REQUIRE(sweep_rows.size() == 1 + 6 * 2 * 2);
  }
}

TEST_CASE("average mode emits one row per (strategy, q)") {
  test_util::TempDir tmp("cli_avg");
  const auto cfg_path = tmp.path / "avg.cfg";
  test_util::write_file(cfg_path, R"([topology]
kind = grid
side = 3

[strategies]
list = all
q = 0.6, 0.9

[sampling]
mode = average
pairs = 5
virtual_samples = 30
master_seed = 6
)");
  const std::string out_dir = (tmp.path / "out").string();
  REQUIRE(run_cli("--out-dir " + out_dir + " --format svg run --config " + cfg_path.string()) ==
          0);
  const auto rows =
      entroute::read_csv(test_util::read_file(fs::path(out_dir) / "average_rates.csv"));
  REQUIRE(rows.size() == 1 + 5 * 2);
  REQUIRE(fs::exists(fs::path(out_dir) / "average_rates.svg"));
}

TEST_CASE("plot handles an empty csv with a warning") {
  test_util::TempDir tmp("cli_empty");
  const auto csv = tmp.path / "empty.csv";
  test_util::write_file(csv, "pair_u,pair_v,distance_km,strategy,q,rate,stderr,n_samples\n");
  const auto svg = tmp.path / "empty.svg";
  const auto err = tmp.path / "stderr.txt";
  const std::string cmd = std::string(ENTROUTE_CLI_PATH) + " plot --csv " + csv.string() +
                          " --out " + svg.string() + " >/dev/null 2>" + err.string();
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  REQUIRE(test_util::read_file(svg).find("no data") != std::string::npos);
  REQUIRE(test_util::read_file(err).find("no data rows") != std::string::npos);
}

TEST_CASE("a run is reproducible from its manifest alone") {
  test_util::TempDir tmp("cli_manifest");
  const auto cfg_path = tmp.path / "exp.cfg";
  test_util::write_file(cfg_path, kGridConfig);
  const std::string dir_a = (tmp.path / "a").string();
  REQUIRE(run_cli("--out-dir " + dir_a + " run --config " + cfg_path.string()) == 0);

  // extract the config echo from the manifest and rerun from it
  const auto manifest = nlohmann::json::parse(
      test_util::read_file(fs::path(dir_a) / "manifest.json"));
  const auto echo_path = tmp.path / "echo.cfg";
  test_util::write_file(echo_path, manifest["config"].get<std::string>());
  const std::string dir_b = (tmp.path / "b").string();
  REQUIRE(run_cli("--out-dir " + dir_b + " run --config " + echo_path.string()) == 0);

  REQUIRE(test_util::read_file(fs::path(dir_a) / "rates.csv") ==
          test_util::read_file(fs::path(dir_b) / "rates.csv"));
}

TEST_CASE("analyze prints the phase-transition table") {
  test_util::TempDir tmp("cli_an");
  const std::string out = (tmp.path / "analyze.txt").string();
  const std::string cmd = std::string(ENTROUTE_CLI_PATH) +
                          " analyze --nodes 100 --mc-samples 20000 --corr-samples 20000 > " + out +
                          " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const auto text = test_util::read_file(out);
  REQUIRE(text.find("mean edge probability E:") != std::string::npos);
  REQUIRE(text.find("expected path count:") != std::string::npos);
  REQUIRE(text.find("connectivity threshold E*:") != std::string::npos);
  REQUIRE(text.find("correlation rho:") != std::string::npos);
}

TEST_CASE("cli exit codes distinguish validation from io") {
  test_util::TempDir tmp("cli_err");
  const auto bad_cfg = tmp.path / "bad.cfg";
  test_util::write_file(bad_cfg, "[topology]\nkind = grid\nside = 3\n[strategies]\nq = 0.5\n");
  REQUIRE(run_cli("run --config " + bad_cfg.string()) == 1);        // empty strategy list
  REQUIRE(run_cli("run --config " + (tmp.path / "nope.cfg").string()) == 2);  // missing file
  REQUIRE(run_cli("frobnicate") == 1);                              // unknown subcommand
  REQUIRE(run_cli("generate grid --side 1 --out " + (tmp.path / "g.topo").string()) == 1);
  REQUIRE(run_cli("--version") == 0);
}
