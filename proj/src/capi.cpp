#include <cstring>
#include <exception>
#include <filesystem>
#include <string>

#include "wrsync/errors.hpp"
#include "wrsync/indistinguishability.hpp"
#include "wrsync/io.hpp"
#include "wrsync/scenario.hpp"
#include "wrsync/stability.hpp"
#include "wrsync/version.hpp"
#include "wrsync/wrsync.h"

struct wrs_series {
  wrsync::PhaseSeries value;
};
struct wrs_tags {
  std::vector<wrsync::TimeTagSeries> channels;
};
struct wrs_stability {
  wrsync::StabilityResult value;
};
struct wrs_scenario {
  wrsync::ScenarioConfig value;
};

namespace {

thread_local std::string last_error;

wrs_status fail(wrs_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps the active exception onto a status code.
wrs_status translate() {
  try {
    throw;
  } catch (const wrsync::ValidationError& e) {
    return fail(WRS_ERR_VALIDATION, e.what());
  } catch (const wrsync::LinkError& e) {
    return fail(WRS_ERR_LINK, e.what());
  } catch (const wrsync::ParseError& e) {
    return fail(WRS_ERR_PARSE, e.what());
  } catch (const wrsync::PairingError& e) {
    return fail(WRS_ERR_PAIRING, e.what());
  } catch (const wrsync::InvalidArgument& e) {
    return fail(WRS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const wrsync::Error& e) {
    return fail(WRS_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(WRS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WRS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WRS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WRS_ERR_INTERNAL, "unknown error");
  }
}

template <typename F>
wrs_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return WRS_OK;
  } catch (...) {
    return translate();
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::span<const std::int64_t> factor_span(const int64_t* factors, size_t n) {
  if (n == 0) return {};
  if (!factors) throw wrsync::InvalidArgument("factors is NULL");
  return {factors, n};
}

#define WRS_REQUIRE(ptr)                                                         \
  do {                                                                           \
    if (!(ptr)) return fail(WRS_ERR_INVALID_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* wrs_version(void) { return wrsync::kVersion; }
const char* wrs_last_error(void) { return last_error.c_str(); }

const char* wrs_status_name(wrs_status status) {
  switch (status) {
    case WRS_OK: return "ok";
    case WRS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WRS_ERR_VALIDATION: return "validation error";
    case WRS_ERR_LINK: return "link error";
    case WRS_ERR_PARSE: return "parse error";
    case WRS_ERR_PAIRING: return "pairing error";
    case WRS_ERR_IO: return "i/o error";
    case WRS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void wrs_string_free(char* s) { std::free(s); }

wrs_status wrs_series_create(double tau0_s, const double* samples_ps, size_t n, wrs_series** out) {
  WRS_REQUIRE(out);
  if (n > 0) WRS_REQUIRE(samples_ps);
  return guarded([&] {
    std::vector<double> x(samples_ps, samples_ps + n);
    *out = new wrs_series{wrsync::PhaseSeries(tau0_s, std::move(x))};
  });
}

wrs_status wrs_series_read_csv(const char* path, wrs_series** out) {
  WRS_REQUIRE(path);
  WRS_REQUIRE(out);
  return guarded([&] { *out = new wrs_series{wrsync::read_phase_csv(path)}; });
}

wrs_status wrs_series_write_csv(const wrs_series* series, const char* path) {
  WRS_REQUIRE(series);
  WRS_REQUIRE(path);
  return guarded([&] { wrsync::write_phase_csv(path, series->value); });
}

void wrs_series_free(wrs_series* series) { delete series; }
size_t wrs_series_size(const wrs_series* series) { return series ? series->value.size() : 0; }
double wrs_series_tau0(const wrs_series* series) { return series ? series->value.tau0() : 0.0; }
const double* wrs_series_data(const wrs_series* series) { return series ? series->value.samples().data() : nullptr; }

wrs_status wrs_stability_compute(const wrs_series* series, wrs_estimator estimator, const int64_t* factors,
                                 size_t n_factors, int with_confidence, wrs_stability** out) {
  WRS_REQUIRE(series);
  WRS_REQUIRE(out);
  return guarded([&] {
    const auto& x = series->value;
    std::vector<std::int64_t> ms(factors ? factors : nullptr, factors ? factors + n_factors : nullptr);
    if (ms.empty()) ms = wrsync::default_factors(x.size());
    wrsync::StabilityResult r;
    switch (estimator) {
      case WRS_TDEV: r = wrsync::tdev(x, ms); break;
      case WRS_ADEV: r = wrsync::adev(x, ms); break;
      case WRS_MDEV: r = wrsync::mdev(x, ms); break;
      default: throw wrsync::InvalidArgument("unknown estimator");
    }
    if (with_confidence) r = wrsync::confidence(std::move(r), x);
    *out = new wrs_stability{std::move(r)};
  });
}

size_t wrs_stability_size(const wrs_stability* result) { return result ? result->value.points.size() : 0; }

wrs_status wrs_stability_point_at(const wrs_stability* result, size_t index, wrs_stability_point* out) {
  WRS_REQUIRE(result);
  WRS_REQUIRE(out);
  if (index >= result->value.points.size()) return fail(WRS_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& p = result->value.points[index];
  *out = {p.tau_s, p.m, p.value, p.ci_low, p.ci_high, p.n_used, p.noise_alpha, p.edf, p.reliable ? 1 : 0};
  last_error.clear();
  return WRS_OK;
}

wrs_status wrs_stability_write_csv(const wrs_stability* result, const char* path) {
  WRS_REQUIRE(result);
  WRS_REQUIRE(path);
  return guarded([&] { wrsync::write_stability_csv(path, result->value); });
}

void wrs_stability_free(wrs_stability* result) { delete result; }

wrs_status wrs_adjacent_jitter(const wrs_series* series, double* first_difference_ps, double* tdev_tau0_ps) {
  WRS_REQUIRE(series);
  return guarded([&] {
    const auto j = wrsync::adjacent_jitter(series->value);
    if (first_difference_ps) *first_difference_ps = j.first_difference_ps;
    if (tdev_tau0_ps) *tdev_tau0_ps = j.tdev_tau0_ps;
  });
}

wrs_status wrs_tags_read(const char* path, wrs_tags** out) {
  WRS_REQUIRE(path);
  WRS_REQUIRE(out);
  return guarded([&] { *out = new wrs_tags{wrsync::read_tags(path)}; });
}

void wrs_tags_free(wrs_tags* tags) { delete tags; }
size_t wrs_tags_channel_count(const wrs_tags* tags) { return tags ? tags->channels.size() : 0; }

uint32_t wrs_tags_channel_id(const wrs_tags* tags, size_t index) {
  return tags && index < tags->channels.size() ? tags->channels[index].channel : 0;
}

size_t wrs_tags_event_count(const wrs_tags* tags, size_t index) {
  return tags && index < tags->channels.size() ? tags->channels[index].timestamps.size() : 0;
}

wrs_status wrs_analyze_tags(const wrs_tags* tags, uint32_t channel_a, uint32_t channel_b, const char* rate_a,
                            const char* rate_b, const int64_t* factors, size_t n_factors, wrs_stability** out) {
  WRS_REQUIRE(tags);
  WRS_REQUIRE(rate_a);
  WRS_REQUIRE(rate_b);
  WRS_REQUIRE(out);
  return guarded([&] {
    const auto fa = wrsync::Frequency::parse(rate_a);
    const auto fb = wrsync::Frequency::parse(rate_b);
    auto r = wrsync::analyze_tags(tags->channels, channel_a, channel_b, fa, fb, factor_span(factors, n_factors));
    *out = new wrs_stability{std::move(r)};
  });
}

size_t wrs_builtin_count(void) { return wrsync::builtin_names().size(); }

const char* wrs_builtin_name(size_t index) {
  static const std::vector<std::string> names = wrsync::builtin_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

wrs_status wrs_scenario_builtin(const char* name, wrs_scenario** out) {
  WRS_REQUIRE(name);
  WRS_REQUIRE(out);
  return guarded([&] { *out = new wrs_scenario{wrsync::builtin_scenario(name)}; });
}

wrs_status wrs_scenario_parse(const char* json_text, wrs_scenario** out) {
  WRS_REQUIRE(json_text);
  WRS_REQUIRE(out);
  return guarded([&] { *out = new wrs_scenario{wrsync::parse_scenario(json_text)}; });
}

wrs_status wrs_scenario_load(const char* name_or_path, wrs_scenario** out) {
  WRS_REQUIRE(name_or_path);
  WRS_REQUIRE(out);
  return guarded([&] {
    const std::string what = name_or_path;
    if (wrsync::is_builtin(what)) {
      *out = new wrs_scenario{wrsync::builtin_scenario(what)};
      return;
    }
    if (!std::filesystem::exists(what)) {
      throw wrsync::InvalidArgument("'" + what + "' is neither a built-in scenario nor a readable file");
    }
    *out = new wrs_scenario{wrsync::parse_scenario(wrsync::read_text(what))};
  });
}

wrs_status wrs_scenario_to_json(const wrs_scenario* scenario, char** out) {
  WRS_REQUIRE(scenario);
  WRS_REQUIRE(out);
  return guarded([&] { *out = duplicate(wrsync::serialize_scenario(scenario->value)); });
}

wrs_status wrs_scenario_run(const wrs_scenario* scenario, const wrs_run_options* options, char** manifest_path) {
  WRS_REQUIRE(scenario);
  WRS_REQUIRE(options);
  return guarded([&] {
    wrsync::RunOptions o;
    if (options->out_dir) o.out_dir = options->out_dir;
    if (options->has_seed) o.seed = options->seed;
    o.decimate = options->decimate > 0 ? options->decimate : 1;
    o.threads = options->threads;
    const auto summary = wrsync::run_scenario(scenario->value, o);
    if (manifest_path) *manifest_path = duplicate(summary.manifest.string());
  });
}

void wrs_scenario_free(wrs_scenario* scenario) { delete scenario; }

wrs_status wrs_indistinguishability(double delta_t_ps, double sigma_ps, double* out) {
  WRS_REQUIRE(out);
  return guarded([&] { *out = wrsync::indistinguishability(delta_t_ps, sigma_ps); });
}

wrs_status wrs_sigma_from_fwhm(double fwhm_ps, double* out) {
  WRS_REQUIRE(out);
  return guarded([&] { *out = wrsync::sigma_from_fwhm(fwhm_ps); });
}

wrs_status wrs_fwhm_from_sigma(double sigma_ps, double* out) {
  WRS_REQUIRE(out);
  return guarded([&] { *out = wrsync::fwhm_from_sigma(sigma_ps); });
}

wrs_status wrs_required_jitter(double target_i, double sigma_ps, double* out) {
  WRS_REQUIRE(out);
  return guarded([&] { *out = wrsync::required_jitter(target_i, wrsync::WavepacketSpec::from_sigma(sigma_ps)); });
}

wrs_status wrs_write_hom_curves(double delta_t_ps, double sigma_ps, const char* dir) {
  WRS_REQUIRE(dir);
  return guarded([&] {
    const auto w = wrsync::WavepacketSpec::from_sigma(sigma_ps);
    const double sigma = w.sigma();
    if (!(delta_t_ps >= 0.0)) throw wrsync::InvalidArgument("delta_t must be >= 0");
    const std::filesystem::path out(dir);
    std::filesystem::create_directories(out);
    constexpr std::size_t kPoints = 1001;
    const double lo = -5.0 * std::max(sigma, delta_t_ps);
    const double hi = delta_t_ps + 5.0 * std::max(sigma, delta_t_ps);
    std::vector<double> grid(kPoints);
    for (std::size_t i = 0; i < kPoints; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / (kPoints - 1);
    wrsync::write_overlap_csv(out / "overlap.csv", wrsync::overlap_curve({delta_t_ps}, w, grid));
    wrsync::write_visibility_csv(out / "visibility.csv", wrsync::visibility_curve());
  });
}

}  // extern "C"
