#include <map>

#include "wrsync/errors.hpp"
#include "wrsync/scenario.hpp"

namespace wrsync {

namespace {

// Two switches over a 75 km spool. MLL2 runs with the noisier cavity.
const std::string kSpool75 = R"({
  "schema": 1,
  "name": "spool75",
  "sync_mode": "wr",
  "duration_s": 10,
  "tau0_s": 1e-7,
  "seed": 75,
  "topology": {
    "nodes": [
      {"name": "WR_L", "role": "grandmaster"},
      {"name": "WR_F", "role": "switch", "servo_bandwidth_hz": 2000,
       "local_noise": {"bump": [{"center_frequency_hz": 300, "relative_bandwidth": 1.0, "rms_ps": @WR_BUMP@}]}}
    ],
    "links": [
      {"name": "spool", "length_km": 75, "loss_db_per_km": 0.35, "extra_loss_db": 2, "launch_margin_db": 46}
    ]
  },
  "lasers": [
    {"name": "MLL1", "upstream": "WR_L",
     "cavity_noise": {"bump": [{"center_frequency_hz": @CAV_F@, "relative_bandwidth": 1.0, "rms_ps": @MLL1_SPOOL@}]}},
    {"name": "MLL2", "upstream": "WR_F",
     "cavity_noise": {"bump": [{"center_frequency_hz": @CAV_F@, "relative_bandwidth": 1.0, "rms_ps": @MLL2_SPOOL@}]}}
  ],
  "detection": {
    "channels": [
      {"name": "WR_L", "source": "WR_L", "rf_chain": true},
      {"name": "WR_F", "source": "WR_F", "rf_chain": true},
      {"name": "WR_L_split", "source": "WR_L", "rf_chain": true, "split": true},
      {"name": "WR_F_split", "source": "WR_F", "rf_chain": true, "split": true},
      {"name": "PD1", "source": "MLL1", "divided": true},
      {"name": "PD2", "source": "MLL2"}
    ]
  },
  "analysis": {
    "pairs": [
      {"a": "WR_L", "b": "WR_F"},
      {"a": "WR_L_split", "b": "PD1"},
      {"a": "WR_F_split", "b": "PD2"},
      {"a": "PD1", "b": "PD2"}
    ]
  }
})";

// Leader, relay and follower over two 60 km deployed hops. The aerial fiber
// drift is fully compensated by the two-way exchange. Cavity amplitudes
// differ from the spool run (realigned lasers).
const std::string kDeployed120Relay = R"({
  "schema": 1,
  "name": "deployed120relay",
  "sync_mode": "wr",
  "duration_s": 10,
  "tau0_s": 1e-7,
  "seed": 120,
  "topology": {
    "nodes": [
      {"name": "WR_L", "role": "grandmaster"},
      {"name": "WR_R", "role": "switch", "servo_bandwidth_hz": 2000,
       "local_noise": {"bump": [{"center_frequency_hz": 300, "relative_bandwidth": 1.0, "rms_ps": @WR_BUMP@}]}},
      {"name": "WR_F", "role": "switch", "servo_bandwidth_hz": 2000,
       "local_noise": {"bump": [{"center_frequency_hz": 300, "relative_bandwidth": 1.0, "rms_ps": @WR_BUMP@}]}}
    ],
    "links": [
      {"name": "hop1", "length_km": 60, "loss_db_per_km": 0.35, "extra_loss_db": 9.25, "launch_margin_db": 46,
       "uncompensated_fraction": 0, "drift": {"peak_to_peak_ps": 200, "period_s": 86400}},
      {"name": "hop2", "length_km": 60, "loss_db_per_km": 0.35, "extra_loss_db": 9.25, "launch_margin_db": 46,
       "uncompensated_fraction": 0, "drift": {"peak_to_peak_ps": 200, "period_s": 86400}}
    ]
  },
  "lasers": [
    {"name": "MLL1", "upstream": "WR_L",
     "cavity_noise": {"bump": [{"center_frequency_hz": @CAV_F@, "relative_bandwidth": 1.0, "rms_ps": @MLL1_DEPLOYED@}]}},
    {"name": "MLL2", "upstream": "WR_F",
     "cavity_noise": {"bump": [{"center_frequency_hz": @CAV_F@, "relative_bandwidth": 1.0, "rms_ps": @MLL2_DEPLOYED@}]}}
  ],
  "detection": {
    "channels": [
      {"name": "WR_L", "source": "WR_L", "rf_chain": true},
      {"name": "WR_F", "source": "WR_F", "rf_chain": true},
      {"name": "WR_L_split", "source": "WR_L", "rf_chain": true, "split": true},
      {"name": "WR_F_split", "source": "WR_F", "rf_chain": true, "split": true},
      {"name": "PD1", "source": "MLL1", "divided": true},
      {"name": "PD2", "source": "MLL2"}
    ]
  },
  "analysis": {
    "pairs": [
      {"a": "WR_L", "b": "WR_F"},
      {"a": "WR_L_split", "b": "PD1"},
      {"a": "WR_F_split", "b": "PD2"},
      {"a": "PD1", "b": "PD2"}
    ]
  }
})";

// Both lasers locked to the leader's reference over coax.
const std::string kDirectSync = R"({
  "schema": 1,
  "name": "directsync",
  "sync_mode": "direct",
  "duration_s": 10,
  "tau0_s": 1e-7,
  "seed": 5,
  "topology": {
    "nodes": [
      {"name": "WR_L", "role": "grandmaster"},
      {"name": "WR_F", "role": "switch", "servo_bandwidth_hz": 2000,
       "local_noise": {"bump": [{"center_frequency_hz": 300, "relative_bandwidth": 1.0, "rms_ps": @WR_BUMP@}]}}
    ],
    "links": [
      {"name": "spool", "length_km": 75, "loss_db_per_km": 0.35, "extra_loss_db": 2, "launch_margin_db": 46}
    ]
  },
  "lasers": [
    {"name": "MLL1", "upstream": "WR_L",
     "cavity_noise": {"bump": [{"center_frequency_hz": @CAV_F@, "relative_bandwidth": 1.0, "rms_ps": @MLL1_SPOOL@}]}},
    {"name": "MLL2", "upstream": "WR_L",
     "cavity_noise": {"bump": [{"center_frequency_hz": @CAV_F@, "relative_bandwidth": 1.0, "rms_ps": @MLL2_SPOOL@}]}}
  ],
  "detection": {
    "channels": [
      {"name": "PD1", "source": "MLL1", "divided": true},
      {"name": "PD2", "source": "MLL2"}
    ]
  },
  "direct": {"coax_white_pm_ps": 0.2, "sine_amplitude_ps": 0.5, "sine_frequency_hz": 0.5},
  "analysis": {"pairs": [{"a": "PD1", "b": "PD2"}]}
})";

// Patch-cable link with sensitive transceivers, attenuated step by step
// down to the lock threshold.
const std::string kAttenuationSweep = R"({
  "schema": 1,
  "name": "attenuation_sweep",
  "sync_mode": "wr",
  "duration_s": 1,
  "tau0_s": 1e-7,
  "seed": 46,
  "topology": {
    "nodes": [
      {"name": "WR_L", "role": "grandmaster"},
      {"name": "WR_F", "role": "switch", "servo_bandwidth_hz": 2000,
       "local_noise": {"bump": [{"center_frequency_hz": 300, "relative_bandwidth": 1.0, "rms_ps": @SWEEP_BUMP@}]}}
    ],
    "links": [
      {"name": "patch", "length_km": 0, "loss_db_per_km": 0.35, "extra_loss_db": 0, "launch_margin_db": 46}
    ]
  },
  "detection": {
    "channels": [
      {"name": "WR_L", "source": "WR_L", "rf_chain": true},
      {"name": "WR_F", "source": "WR_F", "rf_chain": true}
    ]
  },
  "analysis": {"pairs": [{"a": "WR_L", "b": "WR_F"}]},
  "sweep": {"link": "patch", "extra_loss_db": [0, 10, 20, 26, 30, 36, 40, 43, 46]}
})";

std::string fill(std::string text) {
  static const std::map<std::string, std::string> values = {
      {"@WR_BUMP@", "1.525"},  {"@SWEEP_BUMP@", "0.32"}, {"@CAV_F@", "300"},
      {"@MLL1_SPOOL@", "225"}, {"@MLL2_SPOOL@", "880"},  {"@MLL1_DEPLOYED@", "250"},
      {"@MLL2_DEPLOYED@", "200"},
  };
  for (const auto& [key, value] : values) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos)) {
      text.replace(pos, key.size(), value);
    }
  }
  return text;
}

const std::map<std::string, std::string>& documents() {
  static const std::map<std::string, std::string> docs = {
      {"spool75", fill(kSpool75)},
      {"deployed120relay", fill(kDeployed120Relay)},
      {"directsync", fill(kDirectSync)},
      {"attenuation_sweep", fill(kAttenuationSweep)},
  };
  return docs;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"spool75", "deployed120relay", "directsync", "attenuation_sweep"}; }

bool is_builtin(const std::string& name) { return documents().count(name) > 0; }

const std::string& builtin_document(const std::string& name) {
  const auto it = documents().find(name);
  if (it == documents().end()) throw InvalidArgument("unknown built-in scenario '" + name + "'");
  return it->second;
}

ScenarioConfig builtin_scenario(const std::string& name) { return parse_scenario(builtin_document(name)); }

}  // namespace wrsync
