#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uavnoma/env.hpp"
#include "uavnoma/training.hpp"

namespace uavnoma {

/// Scenario names accepted by run_scenario, in documentation order.
const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

class UnknownScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutputDirError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Git blob-style SHA-1 of canonical_config(config).
std::string config_hash(const SimConfig& config);

struct ScenarioRequest {
  std::string scenario;
  std::vector<std::pair<std::string, std::string>> overrides;  // applied in order
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int episodes = 100;
  std::filesystem::path out_dir;
  HyperParams hyper;
  SimConfig base;
  /// Greedy test episodes per trained policy where a scenario evaluates one.
  int eval_episodes = 5;
  /// speed-power-sweep grid.
  std::vector<double> sweep_speeds{5.0, 10.0, 15.0, 20.0};
  std::vector<double> sweep_powers_dbm{23.0, 29.0};
};

struct VariantSummary {
  std::string variant;
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_throughput;  // per seed, bits
  std::vector<int> episodes_to_90;        // per seed
  double median_final = 0.0;
  double median_episodes_to_90 = 0.0;
};

struct ScenarioResult {
  std::string scenario;
  std::string config_hash;
  std::vector<std::filesystem::path> files;  // every file written, in order
  std::vector<VariantSummary> variants;
};

/// Runs one figure scenario and writes its CSVs, checkpoints, summary.json and
/// manifest.json under request.out_dir. Throws UnknownScenarioError,
/// OutputDirError, ConfigError or InfeasibleCapacityError before any training.
ScenarioResult run_scenario(const ScenarioRequest& request);

/// Effective config after applying the request's overrides, validated.
SimConfig effective_config(const ScenarioRequest& request);

double median(std::vector<double> v);

/// CSV writers; each writes a header line when `header` is true.
void write_training_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                        const std::vector<EpisodeLog>& log, bool header);
void write_rates_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                     const EpisodeTrace& trace, bool header);
void write_sum_rate_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                        const EpisodeTrace& trace, bool header);
void write_clusters_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                        const EpisodeTrace& trace, bool header);
void write_trajectory_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                          const EpisodeTrace& trace, bool header);
void write_users_csv(std::ostream& out, const std::string& variant, std::uint64_t seed,
                     const EpisodeTrace& trace, bool header);

/// Column lists of the frozen CSV contracts.
inline constexpr const char* kTrainingColumns = "variant,seed,episode,mean_loss,epsilon,throughput_bits,mean_rate_bps";
inline constexpr const char* kRatesColumns = "variant,seed,t,uav,user,G,sinr,rate_bps";
inline constexpr const char* kSumRateColumns = "variant,seed,t,sum_rate_bps,penalty,reclustered";
inline constexpr const char* kClustersColumns = "variant,seed,t,user,uav";
inline constexpr const char* kTrajectoryColumns = "variant,seed,t,uav,x,y,z";
inline constexpr const char* kUsersColumns = "variant,seed,t,user,x,y";
inline constexpr const char* kSweepColumns = "p_max_dbm,user_v_max,seed,throughput_bits";

}  // namespace uavnoma
