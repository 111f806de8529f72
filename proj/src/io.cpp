#include "wrsync/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <queue>

#include "wrsync/errors.hpp"

namespace wrsync {

namespace {

static_assert(std::endian::native == std::endian::little, "binary tag files assume a little-endian host");

constexpr std::string_view kTagHeader = "channel,timestamp_fs";
constexpr std::string_view kPhaseHeader = "index,x_ps";
constexpr std::size_t kBinaryRecord = 12;

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw Error("cannot open '" + path.string() + "': " + std::strerror(errno));
  return f;
}

// Buffered writer around stdio with to_chars formatting.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), file_(open(path, "wb")) {}
  ~Writer() = default;

  void put(std::string_view s) {
    if (buf_.size() + s.size() > kFlush) flush();
    buf_.append(s);
  }
  void put(char c) { buf_.push_back(c); }
  void put_int(std::int64_t v) {
    std::array<char, 24> tmp{};
    const auto r = std::to_chars(tmp.data(), tmp.data() + tmp.size(), v);
    put(std::string_view(tmp.data(), static_cast<std::size_t>(r.ptr - tmp.data())));
  }
  void put_double(double v, int precision) {
    std::array<char, 40> tmp{};
    const auto r = std::to_chars(tmp.data(), tmp.data() + tmp.size(), v, std::chars_format::general, precision);
    put(std::string_view(tmp.data(), static_cast<std::size_t>(r.ptr - tmp.data())));
  }
  void put_bytes(const void* data, std::size_t n) { put(std::string_view(static_cast<const char*>(data), n)); }
  void close() {
    flush();
    if (std::fflush(file_.get()) != 0 || std::ferror(file_.get())) {
      throw Error("write failed: '" + path_.string() + "'");
    }
    file_.reset();
  }

 private:
  static constexpr std::size_t kFlush = 1 << 20;
  void flush() {
    if (!buf_.empty() && std::fwrite(buf_.data(), 1, buf_.size(), file_.get()) != buf_.size()) {
      throw Error("write failed: '" + path_.string() + "'");
    }
    buf_.clear();
  }
  std::filesystem::path path_;
  File file_;
  std::string buf_;
};

// Line reader over a chunked stdio buffer; tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : file_(open(path, "rb")) {}

  bool next(std::string_view& line) {
    for (;;) {
      const auto nl = std::find(buf_.begin() + static_cast<std::ptrdiff_t>(pos_), buf_.end(), '\n');
      if (nl != buf_.end()) {
        const auto end = static_cast<std::size_t>(nl - buf_.begin());
        line = std::string_view(buf_.data() + pos_, end - pos_);
        pos_ = end + 1;
        ++line_;
        strip_cr(line);
        return true;
      }
      if (eof_) {
        if (pos_ >= buf_.size()) return false;
        line = std::string_view(buf_.data() + pos_, buf_.size() - pos_);
        pos_ = buf_.size();
        ++line_;
        strip_cr(line);
        return true;
      }
      refill();
    }
  }
  std::size_t line_number() const { return line_; }

 private:
  static void strip_cr(std::string_view& line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  void refill() {
    buf_.erase(0, pos_);
    pos_ = 0;
    const std::size_t old = buf_.size();
    buf_.resize(old + kChunk);
    const std::size_t got = std::fread(buf_.data() + old, 1, kChunk, file_.get());
    buf_.resize(old + got);
    if (got < kChunk) eof_ = true;
  }
  static constexpr std::size_t kChunk = 1 << 20;
  File file_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  bool eof_ = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.remove_prefix(1);
  }
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool is_blank_or_comment(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

bool looks_like_csv(const std::filesystem::path& path) {
  auto f = open(path, "rb");
  std::array<char, 64> head{};
  const std::size_t got = std::fread(head.data(), 1, head.size(), f.get());
  std::string_view s(head.data(), got);
  // Skip leading comment lines.
  while (!s.empty() && s.front() == '#') {
    const auto nl = s.find('\n');
    if (nl == std::string_view::npos) return true;
    s.remove_prefix(nl + 1);
  }
  return s.starts_with("channel");
}

std::vector<TimeTagSeries> collect(std::map<std::uint32_t, std::vector<Femtoseconds>>& by_channel) {
  std::vector<TimeTagSeries> out;
  out.reserve(by_channel.size());
  for (auto& [channel, ts] : by_channel) out.push_back(TimeTagSeries{channel, std::move(ts)});
  return out;
}

std::vector<TimeTagSeries> read_tags_csv(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string_view line;
  bool header = false;
  std::map<std::uint32_t, std::vector<Femtoseconds>> by_channel;
  while (reader.next(line)) {
    if (is_blank_or_comment(line)) continue;
    if (!header) {
      if (trim(line) != kTagHeader) {
        throw ParseError("expected header '" + std::string(kTagHeader) + "'", reader.line_number());
      }
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected 2 fields", reader.line_number());
    std::uint32_t channel = 0;
    Femtoseconds t = 0;
    if (!parse_number(line.substr(0, comma), channel)) {
      throw ParseError("bad channel '" + std::string(trim(line.substr(0, comma))) + "'", reader.line_number());
    }
    if (!parse_number(line.substr(comma + 1), t)) {
      throw ParseError("bad timestamp '" + std::string(trim(line.substr(comma + 1))) + "'", reader.line_number());
    }
    by_channel[channel].push_back(t);
  }
  if (!header) throw ParseError("missing header '" + std::string(kTagHeader) + "'", reader.line_number());
  return collect(by_channel);
}

std::vector<TimeTagSeries> read_tags_binary(const std::filesystem::path& path) {
  auto f = open(path, "rb");
  std::map<std::uint32_t, std::vector<Femtoseconds>> by_channel;
  std::vector<char> buf(kBinaryRecord * 65536);
  std::size_t record = 0;
  std::size_t carry = 0;
  for (;;) {
    const std::size_t got = std::fread(buf.data() + carry, 1, buf.size() - carry, f.get());
    const std::size_t have = carry + got;
    const std::size_t whole = have / kBinaryRecord;
    for (std::size_t i = 0; i < whole; ++i) {
      std::uint32_t channel = 0;
      Femtoseconds t = 0;
      std::memcpy(&channel, buf.data() + i * kBinaryRecord, 4);
      std::memcpy(&t, buf.data() + i * kBinaryRecord + 4, 8);
      by_channel[channel].push_back(t);
      ++record;
    }
    carry = have - whole * kBinaryRecord;
    if (carry) std::memmove(buf.data(), buf.data() + whole * kBinaryRecord, carry);
    if (got == 0) break;
  }
  if (carry != 0) throw ParseError("truncated binary record after record " + std::to_string(record), record + 1);
  return collect(by_channel);
}

}  // namespace

std::vector<TimeTagSeries> read_tags(const std::filesystem::path& path) {
  return looks_like_csv(path) ? read_tags_csv(path) : read_tags_binary(path);
}

void write_tags(const std::filesystem::path& path, std::span<const TimeTagSeries> channels, TagFormat format) {
  Writer w(path);
  if (format == TagFormat::csv) {
    w.put(kTagHeader);
    w.put('\n');
  }
  // k-way merge by (time, channel).
  using Head = std::pair<std::pair<Femtoseconds, std::uint32_t>, std::size_t>;
  std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
  std::vector<std::size_t> cursor(channels.size(), 0);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (!channels[c].timestamps.empty()) heap.push({{channels[c].timestamps[0], channels[c].channel}, c});
  }
  while (!heap.empty()) {
    const auto [key, c] = heap.top();
    heap.pop();
    const auto [t, channel] = key;
    if (format == TagFormat::csv) {
      w.put_int(channel);
      w.put(',');
      w.put_int(t);
      w.put('\n');
    } else {
      w.put_bytes(&channel, 4);
      w.put_bytes(&t, 8);
    }
    if (++cursor[c] < channels[c].timestamps.size()) {
      heap.push({{channels[c].timestamps[cursor[c]], channels[c].channel}, c});
    }
  }
  w.close();
}

PhaseSeries read_phase_csv(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string_view line;
  std::optional<double> tau0;
  bool header = false;
  std::vector<double> x;
  while (reader.next(line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto body = trim(t.substr(1));
      if (body.starts_with("tau0_s=")) {
        double v = 0.0;
        if (!parse_number(body.substr(7), v) || !(v > 0.0)) throw ParseError("bad tau0_s", reader.line_number());
        tau0 = v;
      }
      continue;
    }
    if (!header) {
      if (t != kPhaseHeader) throw ParseError("expected header '" + std::string(kPhaseHeader) + "'", reader.line_number());
      header = true;
      continue;
    }
    const auto comma = t.find(',');
    std::int64_t index = 0;
    double value = 0.0;
    if (comma == std::string_view::npos || !parse_number(t.substr(0, comma), index) ||
        !parse_number(t.substr(comma + 1), value) || !std::isfinite(value)) {
      throw ParseError("malformed row", reader.line_number());
    }
    if (index != static_cast<std::int64_t>(x.size())) {
      throw ParseError("index " + std::to_string(index) + " out of sequence", reader.line_number());
    }
    x.push_back(value);
  }
  if (!tau0) throw ParseError("missing '# tau0_s=' comment", 0);
  if (!header) throw ParseError("missing header '" + std::string(kPhaseHeader) + "'", 0);
  if (x.empty()) throw ParseError("no samples", 0);
  return PhaseSeries(*tau0, std::move(x), path.stem().string());
}

void write_phase_csv(const std::filesystem::path& path, const PhaseSeries& series) {
  Writer w(path);
  w.put("# tau0_s=");
  w.put_double(series.tau0(), 17);
  w.put('\n');
  w.put(kPhaseHeader);
  w.put('\n');
  const auto s = series.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    w.put_int(static_cast<std::int64_t>(i));
    w.put(',');
    w.put_double(s[i], 17);
    w.put('\n');
  }
  w.close();
}

std::string format_stability_csv(const StabilityResult& result) {
  const std::string name = estimator_name(result.estimator);
  const std::string unit = result.estimator == Estimator::tdev ? "_ps" : "";
  std::string out = "tau_s," + name + unit + ",ci_low" + unit + ",ci_high" + unit + ",n_used\n";
  char line[160];
  for (const auto& p : result.points) {
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%lld\n", p.tau_s, p.value, p.ci_low, p.ci_high,
                  static_cast<long long>(p.n_used));
    out += line;
  }
  return out;
}

void write_stability_csv(const std::filesystem::path& path, const StabilityResult& result) {
  write_text(path, format_stability_csv(result));
}

void write_overlap_csv(const std::filesystem::path& path, const OverlapCurve& curve) {
  Writer w(path);
  w.put("t_ps,envelope0,envelope_dt,delay_pdf\n");
  for (std::size_t i = 0; i < curve.t_ps.size(); ++i) {
    w.put_double(curve.t_ps[i], 12);
    w.put(',');
    w.put_double(curve.envelope0[i], 12);
    w.put(',');
    w.put_double(curve.envelope_dt[i], 12);
    w.put(',');
    w.put_double(curve.delay_pdf[i], 12);
    w.put('\n');
  }
  w.close();
}

void write_visibility_csv(const std::filesystem::path& path, const VisibilityCurve& curve) {
  Writer w(path);
  w.put("dt_over_sigma,I\n");
  for (std::size_t i = 0; i < curve.i.size(); ++i) {
    w.put_double(curve.dt_over_sigma[i], 12);
    w.put(',');
    w.put_double(curve.i[i], 12);
    w.put('\n');
  }
  w.close();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  Writer w(path);
  w.put(text);
  w.close();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace wrsync
