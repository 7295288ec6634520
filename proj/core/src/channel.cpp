#include "uavnoma/channel.hpp"

#include <algorithm>
#include <cmath>

namespace uavnoma {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double ChannelConfig::noise_power_w() const {
  return dbm_to_watts(noise_dbm_per_hz) * bandwidth_hz;
}

LosParams los_params(double h_uav) {
  if (!(h_uav > 0.0)) throw ChannelDomainError("UAV height must be positive");
  const double lh = std::log10(h_uav);
  return {std::max(18.0, -432.94 + 294.05 * lh), -0.95 + 233.98 * lh};
}

double distance_3d(Vec2 user, Vec3 uav) {
  const double dx = user.x - uav.x;
  const double dy = user.y - uav.y;
  return std::sqrt(dx * dx + dy * dy + uav.z * uav.z);
}

double p_los(double d3d, double h_uav) {
  if (!(h_uav > 0.0)) throw ChannelDomainError("UAV height must be positive");
  // Rounding in the sqrt can leave d3d a hair below h for an overhead UAV.
  if (h_uav > d3d * (1.0 + 1e-12)) throw ChannelDomainError("UAV height exceeds 3D distance");
  const LosParams lp = los_params(h_uav);
  const double horizontal = std::sqrt(std::max(0.0, d3d * d3d - h_uav * h_uav));
  if (horizontal <= lp.d0) return 1.0;
  const double p = lp.d0 / horizontal + std::exp(-horizontal / lp.p1 + lp.d0 / lp.p1);
  return std::clamp(p, 0.0, 1.0);
}

PathLoss path_loss(double d3d, double h_uav, double fc_ghz) {
  if (!(d3d >= 1.0)) throw ChannelDomainError("3D distance must be >= 1 m");
  if (!(h_uav > 1.0)) throw ChannelDomainError("UAV height must exceed 1 m");
  if (!(fc_ghz > 0.0)) throw ChannelDomainError("carrier frequency must be positive");
  const double ld = std::log10(d3d);
  const double lh = std::log10(h_uav);
  const double lf = 20.0 * std::log10(fc_ghz);
  PathLoss out;
  out.los_db = 30.9 + ld * (22.5 - 0.5 * lh) + lf;
  out.nlos_db = std::max(out.los_db, 32.4 + (43.2 - 7.6 * lh) * ld + lf);
  out.p_los = p_los(d3d, h_uav);
  out.expected_db = (1.0 - out.p_los) * out.nlos_db + out.p_los * out.los_db;
  return out;
}

double channel_gain(double loss_db, double fading) {
  if (!(fading >= 0.0)) throw ChannelDomainError("fading coefficient must be non-negative");
  return fading / std::pow(10.0, 0.1 * loss_db);
}

double FadingStream::draw() {
  if (mode_ == FadingMode::kUnit) return 1.0;
  return exp_(rng_);
}

}  // namespace uavnoma
