#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wrsync/detection.hpp"
#include "wrsync/laser.hpp"
#include "wrsync/network.hpp"
#include "wrsync/stability.hpp"

namespace wrsync {

enum class SyncMode { wr, direct };

// Hard cap on duration_s / tau0_s.
inline constexpr std::size_t kMaxScenarioSamples = 200'000'000;

struct LaserSpec {
  MLLNode node;
  // Clock node whose output drives this laser's signal generator.
  std::string upstream;
};

// One tagger input. source names a clock node or a laser.
struct ChannelSpec {
  std::string name;
  std::string source;
  bool rf_chain = false;  // inverter / DC block / attenuator in the path
  bool split = false;     // clock output also split off to a laser
  bool divided = false;   // pulse counter in the path
};

struct DetectionSpec {
  TaggerConfig tagger{1.7, 80.0, 1.55};
  // Pair-referred, like the tagger fields.
  double split_extra_jitter_ps = 1.212;
  DividerConfig divider{8, 2.37};
  std::vector<ChannelSpec> channels;
};

// Coax delivery of one reference to every laser.
struct DirectSyncSpec {
  double coax_white_pm_ps = 0.2;
  // Applied to every laser after the first.
  double sine_amplitude_ps = 0.5;
  double sine_frequency_hz = 0.5;
};

struct PairSpec {
  std::string a;
  std::string b;
};

struct AnalysisSpec {
  std::vector<PairSpec> pairs;
  // Empty: powers of two up to N/3.
  std::vector<std::int64_t> factors;
};

struct OutputSpec {
  bool phase = false;
  bool tags = false;
};

// Re-runs the scenario once per value with the link's extra loss replaced.
struct SweepSpec {
  std::string link;
  std::vector<double> extra_loss_db;
};

struct ScenarioConfig {
  int schema = 1;
  std::string name;
  SyncMode sync_mode = SyncMode::wr;
  // Carries duration_s, tau0_s and seed.
  Topology topology;
  std::vector<LaserSpec> lasers;
  DetectionSpec detection;
  DirectSyncSpec direct;
  AnalysisSpec analysis;
  OutputSpec outputs;
  std::optional<SweepSpec> sweep;

  std::size_t sample_count() const { return topology.sample_count(); }
};

// Every violated rule, including those of the referenced modules. Link
// margins are left to the run (LinkError).
std::vector<std::string> validate(const ScenarioConfig& config);

// Throws ParseError for malformed JSON and ValidationError listing every
// problem otherwise.
ScenarioConfig parse_scenario(const std::string& json_text);
// Normalized document with every field present.
std::string serialize_scenario(const ScenarioConfig& config);
std::string config_hash(const ScenarioConfig& config);

std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
// Throws InvalidArgument for unknown names.
const std::string& builtin_document(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

// tau0 multiplied by k, duration kept.
ScenarioConfig decimated(ScenarioConfig config, std::int64_t k);

// The sweep variants of a config (just the config itself without a sweep).
struct Variant {
  std::string label;
  ScenarioConfig config;
};
std::vector<Variant> expand_sweep(const ScenarioConfig& config);

// Source series of one scenario run and the measured channel timing derived
// from them on demand.
class Simulation {
 public:
  // Validates (ValidationError) and checks link margins (LinkError).
  explicit Simulation(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  const ChainResult& chain() const { return chain_; }
  const std::vector<PhaseSeries>& lasers() const { return lasers_; }
  const PhaseSeries& source(const std::string& name) const;
  // One tag per comparison interval; 1 / tau0.
  const Frequency& comparison_rate() const { return rate_; }

  std::size_t channel_index(const std::string& name) const;
  // Pulse timing seen by the tagger: source plus channel jitter, in whole fs.
  std::vector<Femtoseconds> channel_timing_fs(std::size_t channel) const;
  // Tags of the channel after dead time.
  TimeTagSeries channel_tags(std::size_t channel) const;
  // Channel b minus channel a, sampled at the comparison rate.
  PhaseSeries pair(const std::string& a, const std::string& b) const;

 private:
  ScenarioConfig config_;
  ChainResult chain_;
  std::vector<PhaseSeries> lasers_;
  Frequency rate_{1};
};

// TDEV with 1-sigma bounds at the scenario's factors (or the defaults).
StabilityResult analyze_series(const PhaseSeries& series, std::span<const std::int64_t> factors);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::int64_t decimate = 1;
  // 0: hardware concurrency.
  unsigned threads = 0;
};

struct PairOutcome {
  std::string variant;
  std::string a;
  std::string b;
  std::filesystem::path csv;
  StabilityResult result;
};

struct RunSummary {
  std::filesystem::path manifest;
  std::vector<PairOutcome> pairs;
};

// Writes pair_<a>_<b>.csv per requested pair (one subdirectory per sweep
// variant), optional phase and tag files, and manifest.json.
RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options);

// Pairs two channels of a tag capture and computes TDEV with bounds.
StabilityResult analyze_tags(std::span<const TimeTagSeries> channels, std::uint32_t a, std::uint32_t b,
                             const Frequency& rate_a, const Frequency& rate_b,
                             std::span<const std::int64_t> factors);

}  // namespace wrsync
