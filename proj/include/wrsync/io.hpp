#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wrsync/indistinguishability.hpp"
#include "wrsync/stability.hpp"
#include "wrsync/timebase.hpp"

namespace wrsync {

enum class TagFormat { csv, binary };

// Reads a tag file. CSV files start with the header `channel,timestamp_fs`
// (lines starting with '#' are ignored); anything else is read as the binary
// layout of little-endian (u32 channel, i64 femtoseconds) records. Channels
// come back in ascending channel order, each in file order. Throws ParseError
// with the offending line (CSV) or record (binary) number.
std::vector<TimeTagSeries> read_tags(const std::filesystem::path& path);

// Writes all channels merged in time order (ties by channel).
void write_tags(const std::filesystem::path& path, std::span<const TimeTagSeries> channels,
                TagFormat format = TagFormat::csv);

PhaseSeries read_phase_csv(const std::filesystem::path& path);
void write_phase_csv(const std::filesystem::path& path, const PhaseSeries& series);

// `tau_s,tdev_ps,ci_low_ps,ci_high_ps,n_used` for TDEV; the value columns are
// named after the estimator otherwise.
std::string format_stability_csv(const StabilityResult& result);
void write_stability_csv(const std::filesystem::path& path, const StabilityResult& result);

void write_overlap_csv(const std::filesystem::path& path, const OverlapCurve& curve);
void write_visibility_csv(const std::filesystem::path& path, const VisibilityCurve& curve);

// Whole-file write; throws Error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace wrsync
