#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrsync/noisegen.hpp"
#include "wrsync/timebase.hpp"

namespace wrsync {

// O-band fiber attenuation used when a scenario does not specify one.
inline constexpr double kDefaultLossDbPerKm = 0.35;
// Optical budget above the receiver lock threshold at zero fiber length.
inline constexpr double kDefaultLaunchMarginDb = 46.0;
// Switch discipline bandwidth. It sits above the ms-scale WR noise band so
// that noise injected at a relay propagates to its downstream followers.
inline constexpr double kDefaultServoBandwidthHz = 2000.0;

struct LinkSpec {
  std::string name;
  double length_km = 0.0;
  double loss_db_per_km = kDefaultLossDbPerKm;
  double extra_loss_db = 0.0;
  double launch_margin_db = kDefaultLaunchMarginDb;
  // Share of the one-way delay drift that the two-way exchange fails to
  // cancel. 0 means fully compensated.
  double uncompensated_fraction = 0.0;
  DriftTerm drift;
};

enum class NodeRole { grandmaster, switch_node };

struct ClockNode {
  std::string name;
  NodeRole role = NodeRole::switch_node;
  NoiseSpec local_noise;
  double servo_bandwidth_hz = kDefaultServoBandwidthHz;
};

// Linear chain grandmaster -> switch -> ... ; links[k] joins nodes[k] and
// nodes[k + 1].
struct Topology {
  std::vector<ClockNode> nodes;
  std::vector<LinkSpec> links;
  double duration_s = 10.0;
  double tau0_s = 1e-7;
  std::uint64_t seed = 1;

  std::size_t sample_count() const;
  const ClockNode* find_node(const std::string& name) const;
  LinkSpec* find_link(const std::string& name);
};

// Structural checks (names, roles, ranges). Margins are checked separately
// by check_margins since a negative margin is a distinct failure.
void validate(const Topology& topology, const std::string& context, std::vector<std::string>& issues);

// launch_margin - (length * loss_per_km + extra_loss). May be negative.
double link_margin(const LinkSpec& link);

// Throws LinkError naming the first link with a negative margin.
void check_margins(const Topology& topology);

// Clock error of every node against the grandmaster, in chain order.
struct ChainResult {
  std::vector<std::string> names;
  std::vector<PhaseSeries> series;

  const PhaseSeries& at(const std::string& name) const;
};

// Grandmaster: its own local noise. Each downstream node: its upstream passed
// through a first-order low-pass at the node's servo bandwidth, plus an
// independent realization of its local noise with bump amplitudes scaled by
// attenuation_bump_scale(link margin), plus uncompensated link drift.
ChainResult simulate_chain(const Topology& topology);

// Elementwise a - b. Throws InvalidArgument on mismatched tau0 or length.
PhaseSeries pairwise_error(const PhaseSeries& a, const PhaseSeries& b);

// First-order discipline filter y[i] = y[i-1] + k (u[i] - y[i-1]) with
// k = 1 - exp(-2 pi f tau0), started locked (y[0] = u[0]).
std::vector<double> first_order_lowpass(std::span<const double> input, double bandwidth_hz, double tau0_s);

}  // namespace wrsync
