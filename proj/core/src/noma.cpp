#include "uavnoma/noma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uavnoma {

Association::Association(int num_uavs, std::vector<int> serving) : serving_(std::move(serving)) {
  if (num_uavs < 1) throw std::invalid_argument("association needs at least one UAV");
  clusters_.resize(static_cast<std::size_t>(num_uavs));
  for (std::size_t k = 0; k < serving_.size(); ++k) {
    int u = serving_[k];
    if (u < 0 || u >= num_uavs) throw std::invalid_argument("user served by unknown UAV");
    clusters_[static_cast<std::size_t>(u)].push_back(static_cast<int>(k));
  }
}

Association::Association(int num_uavs, int num_users, std::vector<std::vector<int>> clusters) {
  if (static_cast<int>(clusters.size()) != num_uavs) {
    throw std::invalid_argument("cluster list size differs from UAV count");
  }
  serving_.assign(static_cast<std::size_t>(num_users), -1);
  for (int u = 0; u < num_uavs; ++u) {
    for (int k : clusters[static_cast<std::size_t>(u)]) {
      if (k < 0 || k >= num_users) throw std::invalid_argument("cluster member out of range");
      if (serving_[static_cast<std::size_t>(k)] != -1) {
        throw std::invalid_argument("user assigned to more than one cluster");
      }
      serving_[static_cast<std::size_t>(k)] = u;
    }
  }
  if (std::find(serving_.begin(), serving_.end(), -1) != serving_.end()) {
    throw std::invalid_argument("user without serving UAV");
  }
  clusters_ = std::move(clusters);
  for (auto& c : clusters_) std::sort(c.begin(), c.end());
}

std::size_t Association::max_cluster_size() const {
  std::size_t m = 0;
  for (const auto& c : clusters_) m = std::max(m, c.size());
  return m;
}

double PowerAllocation::user_power(int user, const Association& assoc) const {
  return user_fraction.at(static_cast<std::size_t>(user)) *
         uav_power.at(static_cast<std::size_t>(assoc.serving(user)));
}

double PowerAllocation::transmitted_power(int uav, const Association& assoc) const {
  double p = 0.0;
  for (int k : assoc.cluster(uav)) p += user_power(k, assoc);
  return p;
}

double inter_cluster_interference(int user, int uav, const GainMatrix& gains,
                                  const Association& assoc, const PowerAllocation& power) {
  double sum = 0.0;
  for (int s = 0; s < assoc.num_uavs(); ++s) {
    if (s == uav) continue;
    sum += gains(s, user) * std::sqrt(power.transmitted_power(s, assoc));
  }
  return sum;
}

double equivalent_gain(int user, int uav, const GainMatrix& gains, const Association& assoc,
                       const PowerAllocation& power, double noise_w) {
  return gains(uav, user) /
         (inter_cluster_interference(user, uav, gains, assoc, power) + noise_w);
}

std::vector<int> decoding_order(std::span<const MemberGain> members) {
  std::vector<MemberGain> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end(), [](const MemberGain& a, const MemberGain& b) {
    if (a.equivalent_gain != b.equivalent_gain) return a.equivalent_gain < b.equivalent_gain;
    return a.user < b.user;
  });
  std::vector<int> order;
  order.reserve(sorted.size());
  for (const auto& m : sorted) order.push_back(m.user);
  return order;
}

double sinr_decoded(std::size_t position, std::span<const int> order, int uav,
                    const GainMatrix& gains, const Association& assoc,
                    const PowerAllocation& power, double noise_w) {
  if (position >= order.size()) throw std::out_of_range("decoding position");
  const int k = order[position];
  double intra = 0.0;
  for (std::size_t i = position + 1; i < order.size(); ++i) {
    const int j = order[i];
    intra += gains(uav, j) * std::sqrt(power.user_power(j, assoc));
  }
  const double inter = inter_cluster_interference(k, uav, gains, assoc, power);
  return gains(uav, k) * std::sqrt(power.user_power(k, assoc)) / (intra + inter + noise_w);
}

double user_rate(double sinr, double bandwidth_hz) { return bandwidth_hz * std::log2(1.0 + sinr); }

double slot_sum_rate(std::span<const DecodedCluster> clusters) {
  double sum = 0.0;
  for (const auto& c : clusters) {
    for (double r : c.rate_bps) sum += r;
  }
  return sum;
}

double slot_sum_rate(std::span<const double> user_rates) {
  return std::accumulate(user_rates.begin(), user_rates.end(), 0.0);
}

double episode_throughput(std::span<const double> slot_rates, double dt_seconds) {
  return std::accumulate(slot_rates.begin(), slot_rates.end(), 0.0) * dt_seconds;
}

std::vector<double> oma_rate(std::span<const int> members, int uav, const GainMatrix& gains,
                             const Association& assoc, const PowerAllocation& power,
                             double noise_w, double bandwidth_hz) {
  if (members.empty()) throw std::invalid_argument("OMA cluster is empty");
  const double n = static_cast<double>(members.size());
  const double share = power.uav_power.at(static_cast<std::size_t>(uav)) / n;
  std::vector<double> rates;
  rates.reserve(members.size());
  for (int k : members) {
    // Interferer power inside one subband is P^s / n, entering in sqrt form like the NOMA term.
    const double inter = inter_cluster_interference(k, uav, gains, assoc, power) / std::sqrt(n);
    const double sinr = gains(uav, k) * std::sqrt(share) / (inter + noise_w / n);
    rates.push_back(user_rate(sinr, bandwidth_hz / n));
  }
  return rates;
}

std::vector<DecodedCluster> order_clusters(const GainMatrix& gains, const Association& assoc,
                                           const PowerAllocation& power, double noise_w) {
  std::vector<DecodedCluster> out(static_cast<std::size_t>(assoc.num_uavs()));
  for (int u = 0; u < assoc.num_uavs(); ++u) {
    auto& dc = out[static_cast<std::size_t>(u)];
    dc.uav = u;
    std::vector<MemberGain> members;
    for (int k : assoc.cluster(u)) {
      members.push_back({k, equivalent_gain(k, u, gains, assoc, power, noise_w)});
    }
    dc.order = decoding_order(members);
    for (int k : dc.order) {
      auto it = std::find_if(members.begin(), members.end(),
                             [k](const MemberGain& m) { return m.user == k; });
      dc.equivalent_gain.push_back(it->equivalent_gain);
    }
  }
  return out;
}

void evaluate_noma(std::vector<DecodedCluster>& clusters, const GainMatrix& gains,
                   const Association& assoc, const PowerAllocation& power, double noise_w,
                   double bandwidth_hz) {
  for (auto& dc : clusters) {
    dc.sinr.clear();
    dc.rate_bps.clear();
    for (std::size_t i = 0; i < dc.order.size(); ++i) {
      double g = sinr_decoded(i, dc.order, dc.uav, gains, assoc, power, noise_w);
      dc.sinr.push_back(g);
      dc.rate_bps.push_back(user_rate(g, bandwidth_hz));
    }
  }
}

void evaluate_oma(std::vector<DecodedCluster>& clusters, const GainMatrix& gains,
                  const Association& assoc, const PowerAllocation& power, double noise_w,
                  double bandwidth_hz) {
  for (auto& dc : clusters) {
    dc.sinr.clear();
    dc.rate_bps.clear();
    if (dc.order.empty()) continue;
    dc.rate_bps = oma_rate(dc.order, dc.uav, gains, assoc, power, noise_w, bandwidth_hz);
    const double n = static_cast<double>(dc.order.size());
    for (double r : dc.rate_bps) dc.sinr.push_back(std::exp2(r / (bandwidth_hz / n)) - 1.0);
  }
}

void assign_gear(std::span<const int> order, std::span<const double> gear, PowerAllocation& power) {
  if (order.size() != gear.size()) throw std::invalid_argument("gear arity differs from cluster size");
  for (std::size_t i = 0; i < order.size(); ++i) {
    power.user_fraction.at(static_cast<std::size_t>(order[i])) = gear[i];
  }
}

}  // namespace uavnoma
