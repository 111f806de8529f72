#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"

#include "wrsync/errors.hpp"
#include "wrsync/scenario.hpp"
#include "wrsync/version.hpp"

namespace wrsync {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Typed field access over one JSON object. Every problem is appended to the
// shared issue list; unknown keys are reported by finish().
class Fields {
 public:
  Fields(const json& j, std::string path, std::vector<std::string>& issues)
      : j_(j), path_(std::move(path)), issues_(issues) {
    ok_ = j_.is_object();
    if (!ok_) issues_.push_back((path_.empty() ? std::string("document") : path_) + ": expected an object");
  }

  bool ok() const { return ok_; }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key, bool required = false) {
    if (!ok_) return nullptr;
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) {
      if (required) issues_.push_back(at(key) + ": required field missing");
      return nullptr;
    }
    return &*it;
  }

  void get(const std::string& key, double& out, bool required = false) {
    if (const json* v = find(key, required)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        issues_.push_back(at(key) + ": expected a number");
      }
    }
  }
  void get(const std::string& key, std::int64_t& out, bool required = false) {
    if (const json* v = find(key, required)) {
      if (v->is_number_integer()) {
        out = v->get<std::int64_t>();
      } else {
        issues_.push_back(at(key) + ": expected an integer");
      }
    }
  }
  void get(const std::string& key, int& out, bool required = false) {
    std::int64_t wide = out;
    get(key, wide, required);
    out = static_cast<int>(wide);
  }
  void get(const std::string& key, std::uint64_t& out, bool required = false) {
    if (const json* v = find(key, required)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        issues_.push_back(at(key) + ": expected a non-negative integer");
      }
    }
  }
  void get(const std::string& key, bool& out, bool required = false) {
    if (const json* v = find(key, required)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        issues_.push_back(at(key) + ": expected true or false");
      }
    }
  }
  void get(const std::string& key, std::string& out, bool required = false) {
    if (const json* v = find(key, required)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        issues_.push_back(at(key) + ": expected a string");
      }
    }
  }
  void get(const std::string& key, Frequency& out, bool required = false) {
    if (const json* v = find(key, required)) {
      try {
        if (v->is_number_integer()) {
          out = Frequency(v->get<std::int64_t>());
        } else if (v->is_string()) {
          out = Frequency::parse(v->get<std::string>());
        } else {
          issues_.push_back(at(key) + ": expected a positive integer or a \"num/den\" string");
        }
      } catch (const Error& e) {
        issues_.push_back(at(key) + ": " + e.what());
      }
    }
  }

  template <typename F>
  void array(const std::string& key, F&& each, bool required = false) {
    if (const json* v = find(key, required)) {
      if (!v->is_array()) {
        issues_.push_back(at(key) + ": expected an array");
        return;
      }
      for (std::size_t i = 0; i < v->size(); ++i) {
        Fields sub((*v)[i], at(key) + "[" + std::to_string(i) + "]", issues_);
        if (sub.ok()) {
          each(sub);
          sub.finish();
        }
      }
    }
  }

  template <typename F>
  void object(const std::string& key, F&& each, bool required = false) {
    if (const json* v = find(key, required)) {
      Fields sub(*v, at(key), issues_);
      if (sub.ok()) {
        each(sub);
        sub.finish();
      }
    }
  }

  template <typename T>
  void number_array(const std::string& key, std::vector<T>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) {
        issues_.push_back(at(key) + ": expected an array");
        return;
      }
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto& e = (*v)[i];
        const bool fits = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
        if (!fits) {
          issues_.push_back(at(key) + "[" + std::to_string(i) + "]: expected " +
                            (std::is_integral_v<T> ? "an integer" : "a number"));
          continue;
        }
        out.push_back(e.get<T>());
      }
    }
  }

  void finish() {
    if (!ok_) return;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) issues_.push_back(at(item.key()) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
  bool ok_ = false;
};

void read_drift(Fields& t, DriftTerm& term) {
  t.get("peak_to_peak_ps", term.peak_to_peak_ps);
  t.get("period_s", term.period_s);
  t.get("random_walk_rms_per_sqrt_s", term.random_walk_rms_per_sqrt_s);
}

void read_noise(Fields& f, NoiseSpec& spec) {
  f.array("power_law", [&](Fields& t) {
    PowerLawTerm term;
    t.get("alpha", term.alpha, true);
    t.get("rms_at_tau0_ps", term.rms_at_tau0_ps, true);
    spec.power_law_terms.push_back(term);
  });
  f.array("bump", [&](Fields& t) {
    BumpTerm term;
    t.get("center_frequency_hz", term.center_frequency_hz);
    t.get("relative_bandwidth", term.relative_bandwidth);
    t.get("rms_ps", term.rms_ps, true);
    spec.bump_terms.push_back(term);
  });
  f.array("drift", [&](Fields& t) {
    DriftTerm term;
    read_drift(t, term);
    spec.drift_terms.push_back(term);
  });
}

ordered_json write_drift(const DriftTerm& d) {
  return {{"peak_to_peak_ps", d.peak_to_peak_ps},
          {"period_s", d.period_s},
          {"random_walk_rms_per_sqrt_s", d.random_walk_rms_per_sqrt_s}};
}

ordered_json write_noise(const NoiseSpec& spec) {
  ordered_json out;
  out["power_law"] = ordered_json::array();
  for (const auto& t : spec.power_law_terms) {
    out["power_law"].push_back({{"alpha", t.alpha}, {"rms_at_tau0_ps", t.rms_at_tau0_ps}});
  }
  out["bump"] = ordered_json::array();
  for (const auto& t : spec.bump_terms) {
    out["bump"].push_back({{"center_frequency_hz", t.center_frequency_hz},
                           {"relative_bandwidth", t.relative_bandwidth},
                           {"rms_ps", t.rms_ps}});
  }
  out["drift"] = ordered_json::array();
  for (const auto& t : spec.drift_terms) out["drift"].push_back(write_drift(t));
  return out;
}

ordered_json write_frequency(const Frequency& f) {
  if (f.denominator() == 1) return f.numerator();
  return f.to_string();
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

void check_bumps(const NoiseSpec& spec, double nyquist, const std::string& where, std::vector<std::string>& issues) {
  for (std::size_t i = 0; i < spec.bump_terms.size(); ++i) {
    if (spec.bump_terms[i].center_frequency_hz >= nyquist) {
      issues.push_back(where + ".bump[" + std::to_string(i) + "]: center_frequency_hz must be below the Nyquist " +
                       "frequency 1/(2 tau0_s)");
    }
  }
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& config) {
  std::vector<std::string> issues;
  if (config.schema != kScenarioSchema) {
    issues.push_back("schema: unsupported version " + std::to_string(config.schema) + " (expected " +
                     std::to_string(kScenarioSchema) + ")");
  }
  if (config.name.empty()) issues.push_back("name: must not be empty");
  const Topology& topo = config.topology;
  validate(topo, "topology", issues);

  const double tau0 = topo.tau0_s;
  const double ratio = topo.duration_s / topo.tau0_s;
  if (tau0 > 0.0 && topo.duration_s > 0.0 && ratio > static_cast<double>(kMaxScenarioSamples)) {
    issues.push_back("duration_s / tau0_s: " + std::to_string(static_cast<long long>(ratio)) +
                     " samples exceeds the limit of " + std::to_string(kMaxScenarioSamples) +
                     " (use a coarser tau0_s or decimate)");
  }
  if (tau0 > 0.0) {
    const double rate = 1.0 / tau0;
    if (std::abs(rate - std::round(rate)) > 1e-6 * rate || std::round(rate) < 1.0) {
      issues.push_back("tau0_s: 1 / tau0_s must be a whole number of hertz");
    }
    const double nyquist = 0.5 / tau0;
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
      check_bumps(topo.nodes[i].local_noise, nyquist, "topology.nodes[" + std::to_string(i) + "].local_noise", issues);
    }
    for (std::size_t i = 0; i < config.lasers.size(); ++i) {
      check_bumps(config.lasers[i].node.cavity_noise, nyquist, "lasers[" + std::to_string(i) + "].cavity_noise",
                  issues);
    }
  }

  std::set<std::string> sources;
  for (const auto& node : topo.nodes) sources.insert(node.name);
  if (config.sync_mode == SyncMode::direct) {
    if (config.lasers.empty()) issues.push_back("lasers: direct sync needs at least one laser");
    for (const auto& laser : config.lasers) {
      if (laser.upstream != config.lasers.front().upstream) {
        issues.push_back("lasers: direct sync locks every laser to one node; '" + laser.node.name +
                         "' names a different upstream");
      }
    }
  }
  for (std::size_t i = 0; i < config.lasers.size(); ++i) {
    const auto& laser = config.lasers[i];
    const std::string where = "lasers[" + std::to_string(i) + "] '" + laser.node.name + "'";
    validate(laser.node, where, issues);
    if (!sources.insert(laser.node.name).second) issues.push_back(where + ": name clashes with another node or laser");
    if (!topo.find_node(laser.upstream)) issues.push_back(where + ": unknown upstream node '" + laser.upstream + "'");
    if (tau0 > 0.0) {
      const double cycles = tau0 * laser.node.pll.reference_rate.hertz();
      if (cycles < 1.0 - 1e-9 || std::abs(cycles - std::round(cycles)) > 1e-6 * cycles) {
        issues.push_back(where + ": tau0_s must be a whole number of reference periods");
      }
    }
  }

  const auto& det = config.detection;
  validate(det.tagger, "detection.tagger", issues);
  validate(det.divider, "detection.divider", issues);
  if (!(det.split_extra_jitter_ps >= 0.0)) issues.push_back("detection.split_extra_jitter_ps: must be >= 0");
  std::set<std::string> channels;
  for (std::size_t i = 0; i < det.channels.size(); ++i) {
    const auto& ch = det.channels[i];
    const std::string where = "detection.channels[" + std::to_string(i) + "] '" + ch.name + "'";
    if (ch.name.empty()) issues.push_back(where + ": name must not be empty");
    if (!channels.insert(ch.name).second) issues.push_back(where + ": duplicate channel name");
    if (!sources.count(ch.source)) issues.push_back(where + ": unknown source '" + ch.source + "'");
  }

  const auto& direct = config.direct;
  if (!(direct.coax_white_pm_ps >= 0.0)) issues.push_back("direct.coax_white_pm_ps: must be >= 0");
  if (!(direct.sine_amplitude_ps >= 0.0)) issues.push_back("direct.sine_amplitude_ps: must be >= 0");
  if (!(direct.sine_frequency_hz > 0.0)) issues.push_back("direct.sine_frequency_hz: must be > 0");

  const std::size_t n = topo.sample_count();
  for (std::size_t i = 0; i < config.analysis.pairs.size(); ++i) {
    const auto& p = config.analysis.pairs[i];
    const std::string where = "analysis.pairs[" + std::to_string(i) + "]";
    if (!channels.count(p.a)) issues.push_back(where + ": unknown channel '" + p.a + "'");
    if (!channels.count(p.b)) issues.push_back(where + ": unknown channel '" + p.b + "'");
    if (p.a == p.b) issues.push_back(where + ": a channel cannot be paired with itself");
  }
  for (std::size_t i = 0; i < config.analysis.factors.size(); ++i) {
    const auto m = config.analysis.factors[i];
    if (m < 1 || (n >= 3 && static_cast<std::size_t>(m) > n / 3)) {
      issues.push_back("analysis.factors[" + std::to_string(i) + "]: m=" + std::to_string(m) +
                       " outside [1, N/3] for N=" + std::to_string(n));
    }
  }

  if (config.sweep) {
    const auto& sweep = *config.sweep;
    bool found = false;
    for (const auto& link : topo.links) found = found || link.name == sweep.link;
    if (!found) issues.push_back("sweep.link: unknown link '" + sweep.link + "'");
    if (sweep.extra_loss_db.empty()) issues.push_back("sweep.extra_loss_db: must not be empty");
    for (std::size_t i = 0; i < sweep.extra_loss_db.size(); ++i) {
      if (!(sweep.extra_loss_db[i] >= 0.0)) {
        issues.push_back("sweep.extra_loss_db[" + std::to_string(i) + "]: must be >= 0");
      }
    }
  }
  return issues;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string what = e.what();
    const auto colon = what.find("syntax error");
    throw ParseError(colon == std::string::npos ? what : what.substr(colon), line_of(text, e.byte > 0 ? e.byte - 1 : 0));
  }

  std::vector<std::string> issues;
  ScenarioConfig c;
  Fields root(doc, "", issues);
  if (root.ok()) {
    root.get("schema", c.schema, true);
    root.get("name", c.name, true);
    root.get("duration_s", c.topology.duration_s);
    root.get("tau0_s", c.topology.tau0_s);
    root.get("seed", c.topology.seed);
    std::string mode = "wr";
    root.get("sync_mode", mode);
    if (mode == "wr") {
      c.sync_mode = SyncMode::wr;
    } else if (mode == "direct") {
      c.sync_mode = SyncMode::direct;
    } else {
      issues.push_back("sync_mode: expected \"wr\" or \"direct\", got \"" + mode + "\"");
    }

    root.object(
        "topology",
        [&](Fields& t) {
          t.array(
              "nodes",
              [&](Fields& f) {
                ClockNode node;
                f.get("name", node.name, true);
                std::string role = "switch";
                f.get("role", role);
                if (role == "grandmaster") {
                  node.role = NodeRole::grandmaster;
                } else if (role == "switch") {
                  node.role = NodeRole::switch_node;
                } else {
                  issues.push_back(f.at("role") + ": expected \"grandmaster\" or \"switch\"");
                }
                f.get("servo_bandwidth_hz", node.servo_bandwidth_hz);
                f.object("local_noise", [&](Fields& nf) { read_noise(nf, node.local_noise); });
                c.topology.nodes.push_back(std::move(node));
              },
              true);
          t.array("links", [&](Fields& f) {
            LinkSpec link;
            f.get("name", link.name, true);
            f.get("length_km", link.length_km);
            f.get("loss_db_per_km", link.loss_db_per_km);
            f.get("extra_loss_db", link.extra_loss_db);
            f.get("launch_margin_db", link.launch_margin_db);
            f.get("uncompensated_fraction", link.uncompensated_fraction);
            f.object("drift", [&](Fields& d) { read_drift(d, link.drift); });
            c.topology.links.push_back(std::move(link));
          });
        },
        true);

    root.array("lasers", [&](Fields& f) {
      LaserSpec laser;
      f.get("name", laser.node.name, true);
      f.get("upstream", laser.upstream, true);
      f.object("pll", [&](Fields& p) {
        p.get("loop_bandwidth_hz", laser.node.pll.loop_bandwidth_hz);
        p.get("damping", laser.node.pll.damping);
        p.get("reference_rate", laser.node.pll.reference_rate);
        p.get("output_rate", laser.node.pll.output_rate);
      });
      f.object("cavity_noise", [&](Fields& nf) { read_noise(nf, laser.node.cavity_noise); });
      f.get("sg_jitter_ps", laser.node.sg_jitter_ps);
      c.lasers.push_back(std::move(laser));
    });

    root.object("detection", [&](Fields& d) {
      d.object("tagger", [&](Fields& t) {
        t.get("irf_rms_ps", c.detection.tagger.irf_rms_ps);
        t.get("deadtime_ns", c.detection.tagger.deadtime_ns);
        t.get("per_channel_extra_jitter_ps", c.detection.tagger.per_channel_extra_jitter_ps);
      });
      d.get("split_extra_jitter_ps", c.detection.split_extra_jitter_ps);
      d.object("divider", [&](Fields& v) {
        v.get("ratio", c.detection.divider.ratio);
        v.get("added_jitter_ps", c.detection.divider.added_jitter_ps);
      });
      d.array("channels", [&](Fields& f) {
        ChannelSpec ch;
        f.get("name", ch.name, true);
        f.get("source", ch.source, true);
        f.get("rf_chain", ch.rf_chain);
        f.get("split", ch.split);
        f.get("divided", ch.divided);
        c.detection.channels.push_back(std::move(ch));
      });
    });

    root.object("direct", [&](Fields& d) {
      d.get("coax_white_pm_ps", c.direct.coax_white_pm_ps);
      d.get("sine_amplitude_ps", c.direct.sine_amplitude_ps);
      d.get("sine_frequency_hz", c.direct.sine_frequency_hz);
    });

    root.object("analysis", [&](Fields& a) {
      a.array("pairs", [&](Fields& p) {
        PairSpec pair;
        p.get("a", pair.a, true);
        p.get("b", pair.b, true);
        c.analysis.pairs.push_back(std::move(pair));
      });
      a.number_array("factors", c.analysis.factors);
    });

    root.object("outputs", [&](Fields& o) {
      o.get("phase", c.outputs.phase);
      o.get("tags", c.outputs.tags);
    });

    root.object("sweep", [&](Fields& s) {
      SweepSpec sweep;
      s.get("link", sweep.link, true);
      s.number_array("extra_loss_db", sweep.extra_loss_db);
      c.sweep = std::move(sweep);
    });
    root.finish();
  }

  // Semantic checks run even after field errors so one pass reports everything.
  for (auto& issue : validate(c)) {
    if (std::find(issues.begin(), issues.end(), issue) == issues.end()) issues.push_back(std::move(issue));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return c;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  ordered_json j;
  j["schema"] = c.schema;
  j["name"] = c.name;
  j["sync_mode"] = c.sync_mode == SyncMode::wr ? "wr" : "direct";
  j["duration_s"] = c.topology.duration_s;
  j["tau0_s"] = c.topology.tau0_s;
  j["seed"] = c.topology.seed;

  ordered_json topo;
  topo["nodes"] = ordered_json::array();
  for (const auto& node : c.topology.nodes) {
    topo["nodes"].push_back({{"name", node.name},
                             {"role", node.role == NodeRole::grandmaster ? "grandmaster" : "switch"},
                             {"servo_bandwidth_hz", node.servo_bandwidth_hz},
                             {"local_noise", write_noise(node.local_noise)}});
  }
  topo["links"] = ordered_json::array();
  for (const auto& link : c.topology.links) {
    topo["links"].push_back({{"name", link.name},
                             {"length_km", link.length_km},
                             {"loss_db_per_km", link.loss_db_per_km},
                             {"extra_loss_db", link.extra_loss_db},
                             {"launch_margin_db", link.launch_margin_db},
                             {"uncompensated_fraction", link.uncompensated_fraction},
                             {"drift", write_drift(link.drift)}});
  }
  j["topology"] = topo;

  j["lasers"] = ordered_json::array();
  for (const auto& laser : c.lasers) {
    const auto& pll = laser.node.pll;
    j["lasers"].push_back({{"name", laser.node.name},
                           {"upstream", laser.upstream},
                           {"pll",
                            {{"loop_bandwidth_hz", pll.loop_bandwidth_hz},
                             {"damping", pll.damping},
                             {"reference_rate", write_frequency(pll.reference_rate)},
                             {"output_rate", write_frequency(pll.output_rate)}}},
                           {"cavity_noise", write_noise(laser.node.cavity_noise)},
                           {"sg_jitter_ps", laser.node.sg_jitter_ps}});
  }

  const auto& det = c.detection;
  ordered_json detection;
  detection["tagger"] = {{"irf_rms_ps", det.tagger.irf_rms_ps},
                         {"deadtime_ns", det.tagger.deadtime_ns},
                         {"per_channel_extra_jitter_ps", det.tagger.per_channel_extra_jitter_ps}};
  detection["split_extra_jitter_ps"] = det.split_extra_jitter_ps;
  detection["divider"] = {{"ratio", det.divider.ratio}, {"added_jitter_ps", det.divider.added_jitter_ps}};
  detection["channels"] = ordered_json::array();
  for (const auto& ch : det.channels) {
    detection["channels"].push_back({{"name", ch.name},
                                     {"source", ch.source},
                                     {"rf_chain", ch.rf_chain},
                                     {"split", ch.split},
                                     {"divided", ch.divided}});
  }
  j["detection"] = detection;

  j["direct"] = {{"coax_white_pm_ps", c.direct.coax_white_pm_ps},
                 {"sine_amplitude_ps", c.direct.sine_amplitude_ps},
                 {"sine_frequency_hz", c.direct.sine_frequency_hz}};

  ordered_json analysis;
  analysis["pairs"] = ordered_json::array();
  for (const auto& p : c.analysis.pairs) analysis["pairs"].push_back({{"a", p.a}, {"b", p.b}});
  analysis["factors"] = c.analysis.factors;
  j["analysis"] = analysis;
  j["outputs"] = {{"phase", c.outputs.phase}, {"tags", c.outputs.tags}};
  if (c.sweep) j["sweep"] = {{"link", c.sweep->link}, {"extra_loss_db", c.sweep->extra_loss_db}};
  return j.dump(2) + "\n";
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = serialize_scenario(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

ScenarioConfig decimated(ScenarioConfig config, std::int64_t k) {
  if (k < 1) throw InvalidArgument("decimation factor must be >= 1");
  const double rate = std::round(1.0 / config.topology.tau0_s);
  // k / rate rather than k * tau0 keeps tau0 the nearest double to the exact value.
  config.topology.tau0_s = rate >= 1.0 ? static_cast<double>(k) / rate : config.topology.tau0_s * static_cast<double>(k);
  return config;
}

std::vector<Variant> expand_sweep(const ScenarioConfig& config) {
  std::vector<Variant> out;
  if (!config.sweep) {
    out.push_back({"", config});
    return out;
  }
  for (double loss : config.sweep->extra_loss_db) {
    ScenarioConfig v = config;
    v.sweep.reset();
    if (LinkSpec* link = v.topology.find_link(config.sweep->link)) link->extra_loss_db = loss;
    char label[64];
    std::snprintf(label, sizeof label, "extra_loss_%gdB", loss);
    out.push_back({label, std::move(v)});
  }
  return out;
}

}  // namespace wrsync
