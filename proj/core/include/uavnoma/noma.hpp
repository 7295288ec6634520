#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace uavnoma {

/// Dense U x K matrix of linear channel gains g_k^u.
class GainMatrix {
 public:
  GainMatrix() = default;
  GainMatrix(int num_uavs, int num_users, double fill = 0.0)
      : uavs_(num_uavs), users_(num_users),
        g_(static_cast<std::size_t>(num_uavs) * num_users, fill) {}

  int num_uavs() const { return uavs_; }
  int num_users() const { return users_; }
  double operator()(int uav, int user) const { return g_[at(uav, user)]; }
  double& operator()(int uav, int user) { return g_[at(uav, user)]; }

 private:
  std::size_t at(int uav, int user) const {
    if (uav < 0 || uav >= uavs_ || user < 0 || user >= users_) {
      throw std::out_of_range("gain matrix index");
    }
    return static_cast<std::size_t>(uav) * users_ + user;
  }

  int uavs_ = 0;
  int users_ = 0;
  std::vector<double> g_;
};

/// Serving indicator v_{u,k}: every user is served by exactly one UAV.
class Association {
 public:
  Association() = default;
  /// serving[k] is the UAV index serving user k. Cluster member lists are built
  /// in ascending user id order.
  Association(int num_uavs, std::vector<int> serving);
  Association(int num_uavs, int num_users, std::vector<std::vector<int>> clusters);

  int num_uavs() const { return static_cast<int>(clusters_.size()); }
  int num_users() const { return static_cast<int>(serving_.size()); }
  int serving(int user) const { return serving_.at(static_cast<std::size_t>(user)); }
  bool serves(int uav, int user) const { return serving(user) == uav; }
  const std::vector<int>& cluster(int uav) const { return clusters_.at(static_cast<std::size_t>(uav)); }
  const std::vector<int>& serving_vector() const { return serving_; }
  std::size_t max_cluster_size() const;

  friend bool operator==(const Association&, const Association&) = default;

 private:
  std::vector<int> serving_;
  std::vector<std::vector<int>> clusters_;
};

/// Per-UAV total power P_u and per-user fraction of its serving UAV's power.
struct PowerAllocation {
  std::vector<double> uav_power;      // watts, indexed by UAV
  std::vector<double> user_fraction;  // indexed by user; sums to 1 within a cluster

  double user_power(int user, const Association& assoc) const;
  /// P^s = sum_k v_{s,k} P_k^s.
  double transmitted_power(int uav, const Association& assoc) const;
};

/// Inter-cluster interference at user k served by UAV u:
/// sum over s != u of g_k^s * sqrt(P^s).
double inter_cluster_interference(int user, int uav, const GainMatrix& gains,
                                  const Association& assoc, const PowerAllocation& power);

/// Equivalent channel gain G = g_k^u / (I_inter + sigma^2).
double equivalent_gain(int user, int uav, const GainMatrix& gains, const Association& assoc,
                       const PowerAllocation& power, double noise_w);

struct MemberGain {
  int user = 0;
  double equivalent_gain = 0.0;
};

/// SIC decoding order: ascending equivalent gain, ties by user id. Element 0 is
/// the weakest user, decoded (and cancelled) first.
std::vector<int> decoding_order(std::span<const MemberGain> members);

struct DecodedCluster {
  int uav = 0;
  std::vector<int> order;               // user ids, weakest first
  std::vector<double> equivalent_gain;  // aligned with order
  std::vector<double> sinr;             // aligned with order
  std::vector<double> rate_bps;         // aligned with order
};

/// SINR of the user at `position` (0-based) in the decoding order of UAV `uav`:
/// g sqrt(P) / (sum over later-decoded i of g_i sqrt(P_i) + I_inter + sigma^2).
double sinr_decoded(std::size_t position, std::span<const int> order, int uav,
                    const GainMatrix& gains, const Association& assoc,
                    const PowerAllocation& power, double noise_w);

/// Shannon rate B log2(1 + sinr).
double user_rate(double sinr, double bandwidth_hz);

double slot_sum_rate(std::span<const DecodedCluster> clusters);
double slot_sum_rate(std::span<const double> user_rates);

/// Throughput aggregate over slots. Returns bits when dt_seconds is the slot length,
/// or the plain sum of per-slot rates when dt_seconds = 1.
double episode_throughput(std::span<const double> slot_rates, double dt_seconds);

/// Orthogonal (FDMA) baseline: each of the n cluster members gets B/n and P_u/n.
/// Returns per-user rates aligned with `members`.
std::vector<double> oma_rate(std::span<const int> members, int uav, const GainMatrix& gains,
                             const Association& assoc, const PowerAllocation& power,
                             double noise_w, double bandwidth_hz);

/// Orders every cluster by equivalent gain. Independent of intra-cluster
/// power fractions since G only involves other UAVs' total power.
std::vector<DecodedCluster> order_clusters(const GainMatrix& gains, const Association& assoc,
                                           const PowerAllocation& power, double noise_w);

/// Fills sinr/rate for already ordered clusters (NOMA with SIC).
void evaluate_noma(std::vector<DecodedCluster>& clusters, const GainMatrix& gains,
                   const Association& assoc, const PowerAllocation& power, double noise_w,
                   double bandwidth_hz);

/// Fills sinr/rate for already ordered clusters using the OMA baseline.
void evaluate_oma(std::vector<DecodedCluster>& clusters, const GainMatrix& gains,
                  const Association& assoc, const PowerAllocation& power, double noise_w,
                  double bandwidth_hz);

/// Writes gear fractions into `power.user_fraction` for one cluster: the
/// weakest decoded user gets gear[0].
void assign_gear(std::span<const int> order, std::span<const double> gear, PowerAllocation& power);

}  // namespace uavnoma
