#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "uavnoma/world.hpp"

namespace uavnoma {

/// UAV position: ground-plane coordinates plus altitude, meters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

class ChannelDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class FadingMode { kUnit, kRayleigh };

struct ChannelConfig {
  double carrier_hz = 2.0e9;
  double noise_dbm_per_hz = -100.0;
  double bandwidth_hz = 15.0e3;
  FadingMode fading = FadingMode::kUnit;
  std::uint64_t fading_seed = 0;

  double carrier_ghz() const { return carrier_hz * 1e-9; }
  /// sigma^2 in watts over the whole bandwidth.
  double noise_power_w() const;
};

double dbm_to_watts(double dbm);

/// Air-to-ground LoS model parameters, both functions of UAV altitude.
struct LosParams {
  double d0 = 18.0;
  double p1 = 0.0;
};

LosParams los_params(double h_uav);

double distance_3d(Vec2 user, Vec3 uav);

/// LoS probability. d3d >= h_uav > 0 (equality means the UAV is directly overhead).
double p_los(double d3d, double h_uav);

struct PathLoss {
  double los_db = 0.0;
  double nlos_db = 0.0;
  double expected_db = 0.0;
  double p_los = 1.0;
};

/// LoS / NLoS / expected path loss in dB; fc in GHz.
PathLoss path_loss(double d3d, double h_uav, double fc_ghz);

/// Linear channel gain H / 10^(L/10).
double channel_gain(double loss_db, double fading);

/// Per-link small-scale fading source. Unit mode always yields 1; Rayleigh mode
/// yields an Exp(1) power coefficient from a per-link seeded stream.
class FadingStream {
 public:
  FadingStream() = default;
  FadingStream(FadingMode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {}

  double draw();

 private:
  FadingMode mode_ = FadingMode::kUnit;
  std::mt19937_64 rng_;
  std::exponential_distribution<double> exp_{1.0};
};

}  // namespace uavnoma
