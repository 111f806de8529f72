#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "wrsync/errors.hpp"
#include "wrsync/io.hpp"
#include "wrsync/rng.hpp"
#include "wrsync/scenario.hpp"
#include "wrsync/version.hpp"

namespace wrsync {

namespace {

constexpr std::uint64_t kLaserSeedStream = 0x4D4C4CULL;     // "MLL"
constexpr std::uint64_t kChannelSeedStream = 0x4348414EULL;  // "CHAN"
constexpr std::uint64_t kCoaxSeedStream = 0x434F4158ULL;     // "COAX"

// Above this many samples per series, pairs run one at a time.
constexpr std::size_t kParallelSampleLimit = 20'000'000;

double channel_sigma_ps(const DetectionSpec& det, const ChannelSpec& ch) {
  const double irf = det.tagger.irf_rms_ps;
  double var = irf * irf / 2.0;
  if (ch.rf_chain) var += det.tagger.per_channel_extra_jitter_ps * det.tagger.per_channel_extra_jitter_ps / 2.0;
  if (ch.split) var += det.split_extra_jitter_ps * det.split_extra_jitter_ps / 2.0;
  if (ch.divided) var += det.divider.added_jitter_ps * det.divider.added_jitter_ps;
  return std::sqrt(var);
}

// Runs job(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers finish.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

nlohmann::ordered_json pair_summary(const PairOutcome& p, const std::filesystem::path& root) {
  nlohmann::ordered_json j;
  j["a"] = p.a;
  j["b"] = p.b;
  j["file"] = std::filesystem::relative(p.csv, root).generic_string();
  const auto& pts = p.result.points;
  if (!pts.empty()) {
    const auto peak = std::max_element(pts.begin(), pts.end(),
                                       [](const StabilityPoint& x, const StabilityPoint& y) { return x.value < y.value; });
    j["leftmost_tdev_ps"] = pts.front().value;
    j["peak_tdev_ps"] = peak->value;
    j["peak_tau_s"] = peak->tau_s;
  }
  return j;
}

}  // namespace

Simulation::Simulation(ScenarioConfig config) : config_(std::move(config)) {
  auto issues = validate(config_);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  const auto& topo = config_.topology;
  rate_ = Frequency(std::llround(1.0 / topo.tau0_s));
  chain_ = simulate_chain(topo);

  const std::size_t n = topo.sample_count();
  const double tau0 = topo.tau0_s;
  const std::uint64_t seed = topo.seed;
  lasers_.reserve(config_.lasers.size());
  for (std::size_t i = 0; i < config_.lasers.size(); ++i) {
    const auto& laser = config_.lasers[i];
    const PhaseSeries& upstream = chain_.at(laser.upstream);
    const std::uint64_t laser_seed = mix_seed(mix_seed(seed, kLaserSeedStream), i);
    if (config_.sync_mode == SyncMode::wr) {
      lasers_.push_back(discipline(upstream, laser.node, laser_seed).with_label(laser.node.name));
      continue;
    }
    // Direct sync: the shared reference reaches each laser over its own coax.
    std::vector<double> ref(upstream.samples().begin(), upstream.samples().end());
    const std::uint64_t coax_seed = mix_seed(mix_seed(seed, kCoaxSeedStream), i);
    const auto& direct = config_.direct;
    if (direct.coax_white_pm_ps > 0.0) {
      const auto white = gen_power_law({0, direct.coax_white_pm_ps}, n, tau0, mix_seed(coax_seed, 0));
      for (std::size_t k = 0; k < n; ++k) ref[k] += white[k];
    }
    if (i > 0 && direct.sine_amplitude_ps > 0.0) {
      const DriftTerm sine{2.0 * direct.sine_amplitude_ps, 1.0 / direct.sine_frequency_hz, 0.0};
      const auto osc = gen_drift(sine, n, tau0, mix_seed(coax_seed, 1));
      for (std::size_t k = 0; k < n; ++k) ref[k] += osc[k];
    }
    lasers_.push_back(discipline(PhaseSeries(tau0, std::move(ref)), laser.node, laser_seed).with_label(laser.node.name));
  }
}

const PhaseSeries& Simulation::source(const std::string& name) const {
  for (const auto& laser : lasers_) {
    if (laser.label() == name) return laser;
  }
  return chain_.at(name);
}

std::size_t Simulation::channel_index(const std::string& name) const {
  const auto& channels = config_.detection.channels;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].name == name) return i;
  }
  throw InvalidArgument("unknown channel '" + name + "'");
}

std::vector<Femtoseconds> Simulation::channel_timing_fs(std::size_t channel) const {
  const auto& ch = config_.detection.channels.at(channel);
  const auto x = source(ch.source).samples();
  const double sigma = channel_sigma_ps(config_.detection, ch);
  GaussianSource gauss(mix_seed(mix_seed(config_.topology.seed, kChannelSeedStream), channel));
  std::vector<Femtoseconds> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double jitter = sigma > 0.0 ? sigma * gauss.next() : 0.0;
    out[i] = static_cast<Femtoseconds>(std::llround((x[i] + jitter) * kFemtosecondsPerPicosecond));
  }
  return out;
}

TimeTagSeries Simulation::channel_tags(std::size_t channel) const {
  TimeTagSeries tags;
  tags.channel = static_cast<std::uint32_t>(channel);
  tags.timestamps = channel_timing_fs(channel);
  for (std::size_t i = 0; i < tags.timestamps.size(); ++i) {
    tags.timestamps[i] += rate_.index_time_fs(static_cast<std::int64_t>(i));
  }
  if (!tags.is_sorted()) std::sort(tags.timestamps.begin(), tags.timestamps.end());
  const auto deadtime_fs = static_cast<Femtoseconds>(std::llround(config_.detection.tagger.deadtime_ns * 1e6));
  if (deadtime_fs > 0) tags.timestamps = apply_deadtime(tags.timestamps, deadtime_fs);
  return tags;
}

PhaseSeries Simulation::pair(const std::string& a, const std::string& b) const {
  const auto qa = channel_timing_fs(channel_index(a));
  auto qb = channel_timing_fs(channel_index(b));
  std::vector<double> x(qa.size());
  for (std::size_t i = 0; i < qa.size(); ++i) x[i] = static_cast<double>(qb[i] - qa[i]) / kFemtosecondsPerPicosecond;
  return PhaseSeries(config_.topology.tau0_s, std::move(x), a + ":" + b);
}

StabilityResult analyze_series(const PhaseSeries& series, std::span<const std::int64_t> factors) {
  if (series.size() < 3) throw InvalidArgument("too-short series: need at least 3 samples");
  std::vector<std::int64_t> ms(factors.begin(), factors.end());
  if (ms.empty()) ms = default_factors(series.size());
  return confidence(tdev(series, ms), series);
}

RunSummary run_scenario(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig config = decimated(input, options.decimate);
  if (options.seed) config.topology.seed = *options.seed;
  auto issues = validate(config);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  std::filesystem::create_directories(options.out_dir);
  RunSummary summary;
  nlohmann::ordered_json manifest;
  manifest["tool"] = "wrsync";
  manifest["version"] = kVersion;
  manifest["schema"] = kScenarioSchema;
  manifest["scenario"] = config.name;
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = config.topology.seed;
  manifest["decimate"] = options.decimate;
  manifest["tau0_s"] = config.topology.tau0_s;
  manifest["duration_s"] = config.topology.duration_s;
  manifest["samples"] = config.sample_count();
  manifest["sync_mode"] = config.sync_mode == SyncMode::wr ? "wr" : "direct";
  manifest["channels"] = nlohmann::ordered_json::array();
  const Frequency rate(std::llround(1.0 / config.topology.tau0_s));
  for (std::size_t i = 0; i < config.detection.channels.size(); ++i) {
    const auto& ch = config.detection.channels[i];
    manifest["channels"].push_back(
        {{"id", i}, {"name", ch.name}, {"source", ch.source}, {"rate_hz", rate.to_string()}});
  }
  manifest["variants"] = nlohmann::ordered_json::array();

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  if (config.sample_count() > kParallelSampleLimit) threads = 1;

  for (auto& variant : expand_sweep(config)) {
    const std::filesystem::path dir = variant.label.empty() ? options.out_dir : options.out_dir / variant.label;
    std::filesystem::create_directories(dir);
    std::optional<Simulation> sim;
    try {
      sim.emplace(variant.config);
    } catch (const LinkError& e) {
      const std::string where = variant.label.empty() ? config.name : config.name + "/" + variant.label;
      throw LinkError(where + ": " + e.link_name(), e.margin_db());
    }

    const auto& pairs = variant.config.analysis.pairs;
    std::vector<PairOutcome> outcomes(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
      const auto& p = pairs[i];
      PairOutcome out;
      out.variant = variant.label;
      out.a = p.a;
      out.b = p.b;
      out.result = analyze_series(sim->pair(p.a, p.b), variant.config.analysis.factors);
      out.csv = dir / ("pair_" + p.a + "_" + p.b + ".csv");
      write_stability_csv(out.csv, out.result);
      outcomes[i] = std::move(out);
    });

    nlohmann::ordered_json v;
    v["label"] = variant.label;
    v["link_margins_db"] = nlohmann::ordered_json::object();
    for (const auto& link : variant.config.topology.links) v["link_margins_db"][link.name] = link_margin(link);
    v["pairs"] = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) v["pairs"].push_back(pair_summary(o, options.out_dir));

    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    if (variant.config.outputs.phase) {
      for (std::size_t k = 0; k < sim->chain().names.size(); ++k) {
        const auto path = dir / ("phase_" + sim->chain().names[k] + ".csv");
        write_phase_csv(path, sim->chain().series[k]);
        files.push_back(std::filesystem::relative(path, options.out_dir).generic_string());
      }
      for (const auto& laser : sim->lasers()) {
        const auto path = dir / ("phase_" + laser.label() + ".csv");
        write_phase_csv(path, laser);
        files.push_back(std::filesystem::relative(path, options.out_dir).generic_string());
      }
    }
    if (variant.config.outputs.tags) {
      std::vector<TimeTagSeries> tags;
      for (std::size_t c = 0; c < variant.config.detection.channels.size(); ++c) tags.push_back(sim->channel_tags(c));
      const auto path = dir / "tags.csv";
      write_tags(path, tags);
      files.push_back(std::filesystem::relative(path, options.out_dir).generic_string());
    }
    v["files"] = files;
    manifest["variants"].push_back(v);
    for (auto& o : outcomes) summary.pairs.push_back(std::move(o));
  }

  summary.manifest = options.out_dir / "manifest.json";
  write_text(summary.manifest, manifest.dump(2) + "\n");
  return summary;
}

StabilityResult analyze_tags(std::span<const TimeTagSeries> channels, std::uint32_t a, std::uint32_t b,
                             const Frequency& rate_a, const Frequency& rate_b,
                             std::span<const std::int64_t> factors) {
  auto find = [&](std::uint32_t id) -> const TimeTagSeries& {
    for (const auto& c : channels) {
      if (c.channel == id) return c;
    }
    throw InvalidArgument("channel " + std::to_string(id) + " not present in tag file");
  };
  if (a == b) throw InvalidArgument("a channel cannot be paired with itself");
  const auto& ta = find(a);
  const auto& tb = find(b);
  PhaseSeries paired = pair_tags(ta, tb, rate_a, rate_b);
  // Origin at the first sample, as for a single tag stream.
  std::vector<double> x = std::move(paired).release();
  const double origin = x.front();
  for (double& v : x) v -= origin;
  const double tau0 = (rate_a.hertz() <= rate_b.hertz() ? rate_a : rate_b).period_s();
  return analyze_series(PhaseSeries(tau0, std::move(x)), factors);
}

}  // namespace wrsync
