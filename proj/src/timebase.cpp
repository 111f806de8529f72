#include "wrsync/timebase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "int128.hpp"
#include "wrsync/errors.hpp"

namespace wrsync {

namespace {

using detail::i128;

i128 pow10(int exponent) {
  i128 value = 1;
  for (int i = 0; i < exponent; ++i) {
    value *= 10;
  }
  return value;
}

// Parses an unsigned decimal with optional fraction and exponent into an exact
// rational {num, den}.
std::pair<i128, i128> parse_decimal(const std::string& text) {
  if (text.empty()) {
    throw InvalidArgument("empty frequency");
  }
  std::size_t pos = 0;
  i128 mantissa = 0;
  int fraction_digits = 0;
  bool any_digit = false;
  const i128 limit = i128(1) << 100;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    mantissa = mantissa * 10 + (text[pos] - '0');
    any_digit = true;
    ++pos;
    if (mantissa > limit) throw InvalidArgument("frequency out of range: " + text);
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      mantissa = mantissa * 10 + (text[pos] - '0');
      ++fraction_digits;
      any_digit = true;
      ++pos;
      if (mantissa > limit) throw InvalidArgument("frequency out of range: " + text);
    }
  }
  if (!any_digit) {
    throw InvalidArgument("malformed frequency: " + text);
  }
  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    int sign = 1;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    }
    if (pos == text.size()) throw InvalidArgument("malformed frequency: " + text);
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      exponent = exponent * 10 + (text[pos] - '0');
      ++pos;
      if (exponent > 30) throw InvalidArgument("frequency out of range: " + text);
    }
    exponent *= sign;
  }
  if (pos != text.size()) {
    throw InvalidArgument("malformed frequency: " + text);
  }
  const int shift = exponent - fraction_digits;
  if (shift >= 0) {
    if (shift > 30) throw InvalidArgument("frequency out of range: " + text);
    return {mantissa * pow10(shift), 1};
  }
  if (-shift > 30) throw InvalidArgument("frequency out of range: " + text);
  return {mantissa, pow10(-shift)};
}

std::int64_t narrow(i128 value, const std::string& context) {
  if (value > std::numeric_limits<std::int64_t>::max() || value < std::numeric_limits<std::int64_t>::min()) {
    throw InvalidArgument("value out of 64-bit range: " + context);
  }
  return static_cast<std::int64_t>(value);
}

}  // namespace

Frequency::Frequency(std::int64_t numerator, std::int64_t denominator) {
  if (numerator <= 0 || denominator <= 0) {
    throw InvalidArgument("frequency must be positive");
  }
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = numerator / g;
  den_ = denominator / g;
}

Frequency Frequency::parse(const std::string& text) {
  std::string trimmed;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
  }
  const auto slash = trimmed.find('/');
  auto [num, den] = parse_decimal(trimmed.substr(0, slash));
  if (slash != std::string::npos) {
    auto [dnum, dden] = parse_decimal(trimmed.substr(slash + 1));
    num *= dden;
    den *= dnum;
  }
  if (num <= 0 || den <= 0) {
    throw InvalidArgument("frequency must be positive: " + text);
  }
  const i128 g = detail::gcd(num, den);
  return Frequency(narrow(num / g, text), narrow(den / g, text));
}

Femtoseconds Frequency::index_time_fs(std::int64_t index) const {
  const i128 numerator = i128(index) * kFemtosecondsPerSecond * den_;
  return narrow(detail::div_round(numerator, i128(num_)), "index time");
}

bool Frequency::has_integral_period_fs() const {
  return (i128(kFemtosecondsPerSecond) * den_) % num_ == 0;
}

std::pair<std::int64_t, std::int64_t> Frequency::ratio_to(const Frequency& other) const {
  const i128 n = i128(num_) * other.den_;
  const i128 d = i128(den_) * other.num_;
  const i128 g = detail::gcd(n, d);
  return {narrow(n / g, "frequency ratio"), narrow(d / g, "frequency ratio")};
}

std::string Frequency::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool TimeTagSeries::is_sorted() const { return std::is_sorted(timestamps.begin(), timestamps.end()); }

PhaseSeries::PhaseSeries(double tau0_s, std::vector<double> samples_ps, std::string label)
    : tau0_(tau0_s), samples_(std::move(samples_ps)), label_(std::move(label)) {
  if (!(tau0_ > 0.0) || !std::isfinite(tau0_)) {
    throw InvalidArgument("tau0 must be positive");
  }
  if (samples_.empty()) {
    throw InvalidArgument("empty series");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InvalidArgument("non-finite sample at index " + std::to_string(i));
    }
  }
}

PhaseSeries PhaseSeries::zeros(double tau0_s, std::size_t n, std::string label) {
  return PhaseSeries(tau0_s, std::vector<double>(n, 0.0), std::move(label));
}

PhaseSeries PhaseSeries::with_label(std::string label) const {
  PhaseSeries copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

PhaseSeries series_from_tags(const TimeTagSeries& tags, const Frequency& nominal) {
  const auto& t = tags.timestamps;
  if (t.empty()) {
    throw InvalidArgument("empty series");
  }
  if (!tags.is_sorted()) {
    throw InvalidArgument("unsorted input");
  }
  // x[i] * num = (t[i] - t[0]) * num - i * 1e15 * den, exact in 128 bits.
  const i128 num = nominal.numerator();
  const i128 step = i128(kFemtosecondsPerSecond) * nominal.denominator();
  std::vector<double> x(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const i128 scaled = i128(t[i] - t[0]) * num - i128(i) * step;
    const i128 whole_fs = scaled / num;
    const i128 remainder = scaled % num;
    x[i] = static_cast<double>(whole_fs) / kFemtosecondsPerPicosecond;
    if (remainder != 0) {
      x[i] += static_cast<double>(remainder) / static_cast<double>(num) / kFemtosecondsPerPicosecond;
    }
  }
  return PhaseSeries(nominal.period_s(), std::move(x), "tags:" + std::to_string(tags.channel));
}

}  // namespace wrsync
