#include "wrsync/network.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "wrsync/errors.hpp"
#include "wrsync/rng.hpp"

namespace wrsync {

namespace {
constexpr std::uint64_t kLinkSeedStream = 0x4C494E4BULL;  // "LINK"
}

std::size_t Topology::sample_count() const {
  if (!(tau0_s > 0.0) || !(duration_s > 0.0)) return 0;
  return static_cast<std::size_t>(std::llround(duration_s / tau0_s));
}

const ClockNode* Topology::find_node(const std::string& name) const {
  for (const auto& node : nodes) {
    if (node.name == name) return &node;
  }
  return nullptr;
}

LinkSpec* Topology::find_link(const std::string& name) {
  for (auto& link : links) {
    if (link.name == name) return &link;
  }
  return nullptr;
}

void validate(const Topology& topology, const std::string& context, std::vector<std::string>& issues) {
  if (topology.nodes.size() < 2) {
    issues.push_back(context + ": chain needs at least 2 nodes");
  }
  if (!topology.nodes.empty() && topology.links.size() + 1 != topology.nodes.size()) {
    issues.push_back(context + ": expected " + std::to_string(topology.nodes.size() - 1) +
                     " links, found " + std::to_string(topology.links.size()));
  }
  if (!(topology.tau0_s > 0.0)) issues.push_back(context + ": tau0_s must be > 0");
  if (!(topology.duration_s > 0.0)) issues.push_back(context + ": duration_s must be > 0");
  if (topology.tau0_s > 0.0 && topology.duration_s > 0.0 && topology.sample_count() < 2) {
    issues.push_back(context + ": duration_s / tau0_s must give at least 2 samples");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
    const auto& node = topology.nodes[i];
    const std::string where = context + ".nodes[" + std::to_string(i) + "] '" + node.name + "'";
    if (node.name.empty()) issues.push_back(where + ": name must not be empty");
    if (!names.insert(node.name).second) issues.push_back(where + ": duplicate node name");
    if (i == 0 && node.role != NodeRole::grandmaster) {
      issues.push_back(where + ": first node must be the grandmaster");
    }
    if (i > 0 && node.role == NodeRole::grandmaster) {
      issues.push_back(where + ": grandmaster has no upstream and must head the chain");
    }
    if (i > 0 && !(node.servo_bandwidth_hz > 0.0)) {
      issues.push_back(where + ": servo_bandwidth_hz must be > 0");
    }
    validate(node.local_noise, where + ".local_noise", issues);
  }
  std::set<std::string> link_names;
  for (std::size_t i = 0; i < topology.links.size(); ++i) {
    const auto& link = topology.links[i];
    const std::string where = context + ".links[" + std::to_string(i) + "] '" + link.name + "'";
    if (!link_names.insert(link.name).second) issues.push_back(where + ": duplicate link name");
    if (!(link.length_km >= 0.0)) issues.push_back(where + ": length_km must be >= 0");
    if (!(link.loss_db_per_km >= 0.0) || !(link.extra_loss_db >= 0.0)) {
      issues.push_back(where + ": losses must be >= 0");
    }
    if (!(link.uncompensated_fraction >= 0.0 && link.uncompensated_fraction <= 1.0)) {
      issues.push_back(where + ": uncompensated_fraction must be in [0, 1]");
    }
    validate(link.drift, where + ".drift", issues);
  }
}

double link_margin(const LinkSpec& link) {
  return link.launch_margin_db - (link.length_km * link.loss_db_per_km + link.extra_loss_db);
}

void check_margins(const Topology& topology) {
  for (const auto& link : topology.links) {
    const double margin = link_margin(link);
    if (margin < 0.0) throw LinkError(link.name, margin);
  }
}

std::vector<double> first_order_lowpass(std::span<const double> input, double bandwidth_hz, double tau0_s) {
  std::vector<double> out(input.size());
  if (input.empty()) return out;
  const double k = -std::expm1(-2.0 * std::numbers::pi * bandwidth_hz * tau0_s);
  double y = input[0];
  out[0] = y;
  for (std::size_t i = 1; i < input.size(); ++i) {
    y += k * (input[i] - y);
    out[i] = y;
  }
  return out;
}

const PhaseSeries& ChainResult::at(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return series[i];
  }
  throw InvalidArgument("unknown node '" + name + "'");
}

ChainResult simulate_chain(const Topology& topology) {
  std::vector<std::string> issues;
  validate(topology, "topology", issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  check_margins(topology);

  const std::size_t n = topology.sample_count();
  const double tau0 = topology.tau0_s;
  ChainResult result;
  result.names.reserve(topology.nodes.size());
  result.series.reserve(topology.nodes.size());

  const auto& gm = topology.nodes.front();
  result.names.push_back(gm.name);
  result.series.push_back(generate(gm.local_noise, n, tau0, mix_seed(topology.seed, 0)).with_label(gm.name));

  for (std::size_t k = 1; k < topology.nodes.size(); ++k) {
    const auto& node = topology.nodes[k];
    const auto& link = topology.links[k - 1];
    std::vector<double> x = first_order_lowpass(result.series.back().samples(), node.servo_bandwidth_hz, tau0);
    const double scale = attenuation_bump_scale(link_margin(link));
    const auto local = generate(node.local_noise, n, tau0, mix_seed(topology.seed, k), scale);
    for (std::size_t i = 0; i < n; ++i) x[i] += local[i];
    if (link.uncompensated_fraction > 0.0 && !link.drift.is_zero()) {
      const auto drift = gen_drift(link.drift, n, tau0, mix_seed(mix_seed(topology.seed, kLinkSeedStream), k));
      for (std::size_t i = 0; i < n; ++i) x[i] += link.uncompensated_fraction * drift[i];
    }
    result.names.push_back(node.name);
    result.series.emplace_back(tau0, std::move(x), node.name);
  }
  return result;
}

PhaseSeries pairwise_error(const PhaseSeries& a, const PhaseSeries& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("mismatched series: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (a.tau0() != b.tau0()) {
    throw InvalidArgument("mismatched series: tau0 differs");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return PhaseSeries(a.tau0(), std::move(d), a.label() + "-" + b.label());
}

}  // namespace wrsync
