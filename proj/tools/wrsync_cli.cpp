// Command-line front end over the C interface.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wrsync/wrsync.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

int exit_code(wrs_status status) {
  switch (status) {
    case WRS_OK: return kExitOk;
    case WRS_ERR_INVALID_ARGUMENT:
    case WRS_ERR_VALIDATION:
    case WRS_ERR_LINK:
    case WRS_ERR_PARSE: return kExitValidation;
    default: return kExitRuntime;
  }
}

int report(wrs_status status) {
  if (status != WRS_OK) std::fprintf(stderr, "error (%s): %s\n", wrs_status_name(status), wrs_last_error());
  return exit_code(status);
}

struct Scenario {
  wrs_scenario* handle = nullptr;
  ~Scenario() { wrs_scenario_free(handle); }
};
struct Tags {
  wrs_tags* handle = nullptr;
  ~Tags() { wrs_tags_free(handle); }
};
struct Stability {
  wrs_stability* handle = nullptr;
  ~Stability() { wrs_stability_free(handle); }
};
struct CString {
  char* s = nullptr;
  ~CString() { wrs_string_free(s); }
};

void print_stability(const wrs_stability* result) {
  std::printf("%-14s %8s %12s %12s %12s %10s\n", "tau_s", "m", "tdev_ps", "ci_low_ps", "ci_high_ps", "n_used");
  for (size_t i = 0; i < wrs_stability_size(result); ++i) {
    wrs_stability_point p{};
    wrs_stability_point_at(result, i, &p);
    std::printf("%-14.6g %8lld %12.6g %12.6g %12.6g %10lld\n", p.tau_s, static_cast<long long>(p.m), p.value, p.ci_low,
                p.ci_high, static_cast<long long>(p.n_used));
  }
}

int cmd_simulate(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& out,
                 std::int64_t decimate, unsigned threads) {
  Scenario s;
  if (auto st = wrs_scenario_load(scenario.c_str(), &s.handle); st != WRS_OK) return report(st);
  wrs_run_options o{};
  o.out_dir = out.c_str();
  o.has_seed = seed.has_value();
  o.seed = seed.value_or(0);
  o.decimate = decimate;
  o.threads = threads;
  CString manifest;
  if (auto st = wrs_scenario_run(s.handle, &o, &manifest.s); st != WRS_OK) return report(st);
  std::printf("wrote %s\n", manifest.s);
  return kExitOk;
}

int cmd_analyze(const std::string& tags_path, const std::string& pair, const std::string& rate_a,
                const std::string& rate_b, const std::string& out, const std::vector<std::int64_t>& factors) {
  const auto colon = pair.find(':');
  if (colon == std::string::npos) {
    std::fprintf(stderr, "error: --pair expects A:B with tagger channel numbers\n");
    return kExitValidation;
  }
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  try {
    std::size_t used_a = 0, used_b = 0;
    const std::string sa = pair.substr(0, colon), sb = pair.substr(colon + 1);
    a = static_cast<std::uint32_t>(std::stoul(sa, &used_a));
    b = static_cast<std::uint32_t>(std::stoul(sb, &used_b));
    if (used_a != sa.size() || used_b != sb.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    std::fprintf(stderr, "error: --pair expects A:B with tagger channel numbers, got '%s'\n", pair.c_str());
    return kExitValidation;
  }
  Tags tags;
  if (auto st = wrs_tags_read(tags_path.c_str(), &tags.handle); st != WRS_OK) return report(st);
  Stability result;
  if (auto st = wrs_analyze_tags(tags.handle, a, b, rate_a.c_str(), rate_b.c_str(), factors.data(), factors.size(),
                                 &result.handle);
      st != WRS_OK) {
    return report(st);
  }
  print_stability(result.handle);
  if (!out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    const auto path = std::filesystem::path(out) / ("pair_" + std::to_string(a) + "_" + std::to_string(b) + ".csv");
    if (auto st = wrs_stability_write_csv(result.handle, path.c_str()); st != WRS_OK) return report(st);
    std::printf("wrote %s\n", path.c_str());
  }
  return kExitOk;
}

int cmd_hom(double dt, std::optional<double> sigma_in, std::optional<double> fwhm_in, const std::string& curves) {
  if (sigma_in.has_value() == fwhm_in.has_value()) {
    std::fprintf(stderr, "error: give exactly one of --sigma or --fwhm\n");
    return kExitValidation;
  }
  double sigma = 0.0, fwhm = 0.0;
  if (sigma_in) {
    sigma = *sigma_in;
    if (auto st = wrs_fwhm_from_sigma(sigma, &fwhm); st != WRS_OK) return report(st);
  } else {
    fwhm = *fwhm_in;
    if (auto st = wrs_sigma_from_fwhm(fwhm, &sigma); st != WRS_OK) return report(st);
  }
  double i = 0.0;
  if (auto st = wrs_indistinguishability(dt, sigma, &i); st != WRS_OK) return report(st);
  const double sigma_half = fwhm / 2.0;
  double i_half = 0.0;
  if (auto st = wrs_indistinguishability(dt, sigma_half, &i_half); st != WRS_OK) return report(st);

  std::printf("dt_ps=%g\n", dt);
  std::printf("sigma_ps=%.6g fwhm_ps=%.6g\n", sigma, fwhm);
  std::printf("I=%.6f\n", i);
  std::printf("convention sigma=FWHM/2.3548: sigma_ps=%.6g I=%.6f\n", sigma, i);
  std::printf("convention sigma=FWHM/2:      sigma_ps=%.6g I=%.6f\n", sigma_half, i_half);
  // Rounded published figures, shown next to the computed value.
  std::printf("annotation: published 98 %% at dt=4 ps; this formula gives I=%.4f (sigma=FWHM/2.3548) or %.4f "
              "(sigma=FWHM/2) at 4 ps\n",
              1.0 / std::sqrt(1.0 + 16.0 / (sigma * sigma)), 1.0 / std::sqrt(1.0 + 16.0 / (sigma_half * sigma_half)));
  std::printf("annotation: published ~90 %% at dt=10 ps; this formula gives I=%.4f (sigma=FWHM/2.3548) or %.4f "
              "(sigma=FWHM/2) at 10 ps\n",
              1.0 / std::sqrt(1.0 + 100.0 / (sigma * sigma)),
              1.0 / std::sqrt(1.0 + 100.0 / (sigma_half * sigma_half)));
  if (!curves.empty()) {
    if (auto st = wrs_write_hom_curves(dt, sigma, curves.c_str()); st != WRS_OK) return report(st);
    std::printf("wrote %s/overlap.csv and %s/visibility.csv\n", curves.c_str(), curves.c_str());
  }
  return kExitOk;
}

int cmd_show(const std::string& name) {
  Scenario s;
  if (auto st = wrs_scenario_builtin(name.c_str(), &s.handle); st != WRS_OK) return report(st);
  CString text;
  if (auto st = wrs_scenario_to_json(s.handle, &text.s); st != WRS_OK) return report(st);
  std::fputs(text.s, stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clock and laser synchronization simulator and TDEV analyzer"};
  app.set_version_flag("--version", wrs_version());
  app.require_subcommand(1);
  int rc = kExitOk;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario (built-in name or JSON file)");
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::int64_t decimate = 1;
  unsigned threads = 0;
  simulate->add_option("scenario", scenario, "Built-in name or scenario.json")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--decimate", decimate, "Multiply tau0 by K")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--threads", threads, "Worker threads (0: all cores)");
  simulate->callback([&] { rc = cmd_simulate(scenario, seed, out_dir, decimate, threads); });

  auto* analyze = app.add_subcommand("analyze", "TDEV of a channel pair in a tag file");
  std::string tags_path, pair, rate_a, rate_b, analyze_out;
  std::vector<std::int64_t> factors;
  analyze->add_option("--tags", tags_path, "Tag file (CSV or binary)")->required();
  analyze->add_option("--pair", pair, "Channels A:B; the series is B - A")->required();
  analyze->add_option("--rate-a", rate_a, "Nominal rate of A in Hz")->required();
  analyze->add_option("--rate-b", rate_b, "Nominal rate of B in Hz")->required();
  analyze->add_option("--out", analyze_out, "Write pair_A_B.csv here");
  analyze->add_option("--factors", factors, "Averaging factors m")->delimiter(',');
  analyze->callback([&] { rc = cmd_analyze(tags_path, pair, rate_a, rate_b, analyze_out, factors); });

  auto* hom = app.add_subcommand("hom", "Indistinguishability for a timing jitter");
  double dt = 0.0;
  std::optional<double> sigma, fwhm;
  std::string curves;
  hom->add_option("--dt", dt, "Relative RMS timing jitter in ps")->required();
  hom->add_option("--sigma", sigma, "Wavepacket RMS width in ps");
  hom->add_option("--fwhm", fwhm, "Wavepacket coherence time (FWHM) in ps");
  hom->add_option("--curves", curves, "Write overlap.csv and visibility.csv here");
  hom->callback([&] { rc = cmd_hom(dt, sigma, fwhm, curves); });

  auto* scen = app.add_subcommand("scenario", "Built-in scenarios");
  scen->require_subcommand(1);
  auto* show = scen->add_subcommand("show", "Print a built-in scenario");
  std::string show_name;
  show->add_option("name", show_name)->required();
  show->callback([&] { rc = cmd_show(show_name); });
  auto* list = scen->add_subcommand("list", "List built-in scenarios");
  list->callback([&] {
    for (size_t i = 0; i < wrs_builtin_count(); ++i) std::printf("%s\n", wrs_builtin_name(i));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return rc;
}
