// uavsim: runs the figure scenarios and the verification suite.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "properties.hpp"
#include "uavnoma/clustering.hpp"
#include "uavnoma/experiment.hpp"

#ifndef UAVSIM_DATA_DIR
#define UAVSIM_DATA_DIR "."
#endif

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kUnknownScenario = 3,
  kOutputDir = 4,
  kInfeasible = 5,
  kConfig = 6,
  kVerifyFailed = 7,
};

std::string default_golden() {
  if (const char* dir = std::getenv("UAVSIM_DATA_DIR")) return std::string(dir) + "/channel_golden.csv";
  // Relocated installs: <prefix>/bin/uavsim next to <prefix>/share/uavnoma.
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    const auto rel = exe.parent_path().parent_path() / "share" / "uavnoma" / "channel_golden.csv";
    if (std::filesystem::exists(rel, ec)) return rel.string();
  }
  return std::string(UAVSIM_DATA_DIR) + "/channel_golden.csv";
}

std::filesystem::path default_out(const std::string& scenario) {
  const char* root = std::getenv("UAVSIM_OUT_ROOT");
  return std::filesystem::path(root && *root ? root : "results") / scenario;
}

std::string scenario_list() {
  std::string s;
  for (const auto& n : uavnoma::scenario_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

int run(uavnoma::ScenarioRequest req, const std::vector<std::string>& sets, const std::string& config_path,
        double tr, bool quiet) {
  using namespace uavnoma;
  if (req.scenario.empty()) {
    std::cerr << "uavsim run: missing scenario name (one of: " << scenario_list() << ")\n";
    return kUsage;
  }
  if (!is_scenario(req.scenario)) {
    std::cerr << "uavsim run: unknown scenario '" << req.scenario << "' (one of: " << scenario_list() << ")\n";
    return kUnknownScenario;
  }
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      req.base = load_config(ss.str(), req.base);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
      req.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (tr >= 0.0) {
      std::ostringstream v;
      v.precision(17);
      v << tr;
      req.overrides.emplace_back("recluster_interval", v.str());
    }
    if (req.out_dir.empty()) req.out_dir = default_out(req.scenario);

    const ScenarioResult res = run_scenario(req);
    if (!quiet) {
      std::cout << res.scenario << "  config " << res.config_hash << "\n";
      for (const auto& v : res.variants) {
        std::printf("  %-16s final %.6g bits  episodes-to-90%% %.1f  (median of %zu seeds)\n", v.variant.c_str(),
                    v.median_final, v.median_episodes_to_90, v.seeds.size());
      }
      std::cout << "  wrote " << res.files.size() << " files to " << req.out_dir.string() << "\n";
    }
    return kOk;
  } catch (const UnknownScenarioError& e) {
    std::cerr << "uavsim run: " << e.what() << "\n";
    return kUnknownScenario;
  } catch (const OutputDirError& e) {
    std::cerr << "uavsim run: output directory not writable: " << e.what() << "\n";
    return kOutputDir;
  } catch (const InfeasibleCapacityError& e) {
    std::cerr << "uavsim run: infeasible configuration: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "uavsim run: configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "uavsim run: " << e.what() << "\n";
    return kFailure;
  }
}

int verify(const std::string& golden, const std::vector<std::string>& only) {
  uavnoma::verify::SuiteOptions opts{golden};
  std::vector<uavnoma::verify::PropertyResult> results;
  if (only.empty()) {
    results = uavnoma::verify::run_suite(opts);
  } else {
    for (const auto& n : only) results.push_back(uavnoma::verify::run_property(n, opts));
  }
  int failed = 0;
  for (const auto& r : results) {
    std::cout << uavnoma::verify::format(r) << "\n";
    failed += !r.pass;
  }
  std::cout << results.size() - failed << "/" << results.size() << " properties passed\n";
  return failed ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-NOMA simulator with shared-DQN trajectory and power control"};
  app.require_subcommand(1);

  uavnoma::ScenarioRequest req;
  std::vector<std::string> sets;
  std::string config_path;
  std::string scenario_pos, scenario_flag;
  int num_seeds = 3;
  double tr = -1.0;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run a figure scenario");
  run_cmd->add_option("name", scenario_pos, "Scenario: " + scenario_list());
  run_cmd->add_option("--scenario", scenario_flag, "Scenario (alternative to the positional name)");
  run_cmd->add_option("--episodes", req.episodes, "Training episodes per seed")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seeds", num_seeds, "Number of seeds; runs seeds 1..N")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", req.out_dir, "Output directory (default $UAVSIM_OUT_ROOT/<scenario> or results/<scenario>)");
  run_cmd->add_option("--set", sets, "Config override key=value (repeatable)")->take_all();
  run_cmd->add_option("--config", config_path, "Key/value config file applied before --set")->check(CLI::ExistingFile);
  run_cmd->add_option("--Tr", tr, "Re-clustering interval in seconds (0 disables)")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--eval-episodes", req.eval_episodes, "Greedy evaluation episodes")->check(CLI::PositiveNumber);
  run_cmd->add_flag("-q,--quiet", quiet, "Suppress the summary");

  std::string golden = default_golden();
  std::vector<std::string> only;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle and property suite");
  verify_cmd->add_option("--golden", golden, "Channel golden table")->capture_default_str();
  verify_cmd->add_option("--only", only, "Run only the named properties");
  bool list = false;
  verify_cmd->add_flag("--list", list, "List property names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*run_cmd) {
    if (!scenario_pos.empty() && !scenario_flag.empty() && scenario_pos != scenario_flag) {
      std::cerr << "uavsim run: conflicting scenario names '" << scenario_pos << "' and '" << scenario_flag << "'\n";
      return kUsage;
    }
    req.scenario = scenario_pos.empty() ? scenario_flag : scenario_pos;
    req.seeds.clear();
    for (int s = 1; s <= num_seeds; ++s) req.seeds.push_back(static_cast<std::uint64_t>(s));
    if (req.scenario.empty()) std::cerr << run_cmd->help();
    return run(req, sets, config_path, tr, quiet);
  }
  if (list) {
    for (const auto& p : uavnoma::verify::properties()) std::cout << p.first << "\n";
    return kOk;
  }
  return verify(golden, only);
}
