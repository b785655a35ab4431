#include "dendrram/encoding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dendrram/errors.h"

namespace dendrram {

std::string_view LabelName(Label label) {
  return label == Label::kAnomalous ? "anomalous" : "normal";
}

Label ParseLabel(std::string_view text) {
  if (text == "normal") return Label::kNormal;
  if (text == "anomalous") return Label::kAnomalous;
  throw ParseError("unknown label '" + std::string(text) + "'");
}

void AnalogTrace::Validate() const {
  if (!(sample_period_s > 0.0)) {
    throw DomainError("trace sample period must be positive");
  }
  for (const auto& ch : channels) {
    if (ch.size() != channels.front().size()) {
      throw DomainError("trace channels have unequal lengths");
    }
  }
}

SpikeRaster::SpikeRaster(double dt_s, int channels, std::int64_t duration_steps)
    : dt_s_(dt_s), channels_(channels), duration_steps_(duration_steps) {
  if (!(dt_s > 0.0)) throw DomainError("raster dt must be positive");
  if (channels < 0 || duration_steps < 0) {
    throw DomainError("raster shape must be non-negative");
  }
  bits_.assign(static_cast<std::size_t>(channels) * duration_steps, 0);
}

std::int64_t SpikeRaster::SpikeCount(int channel) const {
  const auto first = bits_.begin() + Index(channel, 0);
  return std::count(first, first + duration_steps_, std::uint8_t{1});
}

std::int64_t SpikeRaster::TotalSpikes() const {
  return std::count(bits_.begin(), bits_.end(), std::uint8_t{1});
}

std::vector<std::int64_t> SpikeRaster::SpikeSteps(int channel) const {
  std::vector<std::int64_t> steps;
  for (std::int64_t t = 0; t < duration_steps_; ++t) {
    if (at(channel, t)) steps.push_back(t);
  }
  return steps;
}

SpikeRaster SpikeRaster::Slice(std::int64_t start, std::int64_t length) const {
  if (start < 0 || length < 0 || start + length > duration_steps_) {
    throw DomainError("raster slice out of range");
  }
  SpikeRaster out(dt_s_, channels_, length);
  for (int c = 0; c < channels_; ++c) {
    std::copy_n(bits_.begin() + Index(c, start), length,
                out.bits_.begin() + out.Index(c, 0));
  }
  return out;
}

SpikeRaster SpikeRaster::Shifted(std::int64_t shift) const {
  SpikeRaster out(dt_s_, channels_, duration_steps_);
  for (int c = 0; c < channels_; ++c) {
    for (std::int64_t t = 0; t < duration_steps_; ++t) {
      const std::int64_t u = t + shift;
      if (at(c, t) && u >= 0 && u < duration_steps_) out.set(c, u);
    }
  }
  return out;
}

SpikeRaster DeltaModulate(const AnalogTrace& trace, double threshold_mv,
                          double dt_s) {
  if (!(threshold_mv > 0.0)) {
    throw DomainError("delta-modulation threshold must be positive");
  }
  trace.Validate();
  const double ts = trace.sample_period_s;
  if (!(dt_s > 0.0) || dt_s < ts * (1.0 - 1e-9)) {
    throw DomainError("raster dt must be >= the trace sample period");
  }
  const std::size_t n = trace.sample_count();
  const auto bin_of = [&](std::size_t i) {
    return static_cast<std::int64_t>(std::floor(i * ts / dt_s + 1e-9));
  };
  const std::int64_t steps = n == 0 ? 0 : bin_of(n - 1) + 1;
  SpikeRaster raster(dt_s, static_cast<int>(2 * trace.channel_count()), steps);
  // Comparisons tolerate rounding so that a signal landing exactly on a
  // multiple of the threshold still crosses it.
  const double slack = 1e-9 * threshold_mv;

  for (std::size_t c = 0; c < trace.channel_count(); ++c) {
    const auto& x = trace.channels[c];
    if (x.empty()) continue;
    const int up = static_cast<int>(2 * c);
    const int down = up + 1;
    const double base = x.front();
    // The level is base + q * threshold with integer q, so it never drifts.
    std::int64_t q = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const std::int64_t bin = bin_of(i);
      while (x[i] - (base + q * threshold_mv) >= threshold_mv - slack) {
        ++q;
        raster.set(up, bin);
      }
      while ((base + q * threshold_mv) - x[i] >= threshold_mv - slack) {
        --q;
        raster.set(down, bin);
      }
    }
  }
  return raster;
}

std::vector<LabeledWindow> SegmentBeats(const SpikeRaster& raster,
                                        const std::vector<Annotation>& annotations,
                                        double window_s) {
  if (!(window_s > 0.0)) throw DomainError("window length must be positive");
  const double dt = raster.dt_s();
  const auto length = static_cast<std::int64_t>(std::llround(window_s / dt));
  const double duration_s = raster.duration_steps() * dt;
  std::vector<LabeledWindow> windows;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const Annotation& a = annotations[i];
    if (a.time_s < 0.0 || a.time_s > duration_s) {
      throw DomainError("annotation at " + std::to_string(a.time_s) +
                        " s lies outside the recording");
    }
    const std::int64_t centre = std::llround(a.time_s / dt);
    const std::int64_t start = centre - length / 2;
    if (start < 0 || start + length > raster.duration_steps()) continue;
    windows.push_back({raster.Slice(start, length), a.label,
                       static_cast<std::int64_t>(i)});
  }
  return windows;
}

namespace {

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    std::string_view field = line.substr(pos, comma - pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                              field.back() == '\r')) {
      field.remove_suffix(1);
    }
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

double ParseNumber(std::string_view field, const std::string& where) {
  // std::from_chars for double is unavailable on older libstdc++; strtod is
  // locale-dependent but the repo never changes the C locale.
  std::string text(field);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ParseError(where + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::string Where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

Recording LoadRecording(const std::filesystem::path& recording_csv,
                        const std::filesystem::path& annotation_csv) {
  Recording rec;
  {
    std::ifstream in = OpenForRead(recording_csv);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
      throw ParseError(Where(recording_csv, 1) + ": missing header row");
    }
    ++line_no;
    const auto header = SplitCsv(line);
    if (header.size() < 2 || header[0] != "time_s") {
      throw ParseError(Where(recording_csv, 1) +
                       ": header must be time_s,ch0_mv[,ch1_mv...]");
    }
    const std::size_t n_channels = header.size() - 1;
    rec.trace.channels.assign(n_channels, {});
    std::vector<double> times;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto fields = SplitCsv(line);
      const std::string where = Where(recording_csv, line_no);
      if (fields.size() != header.size()) {
        throw ParseError(where + ": expected " + std::to_string(header.size()) +
                         " columns, got " + std::to_string(fields.size()));
      }
      const double t = ParseNumber(fields[0], where);
      if (times.size() >= 2) {
        const double period = times[1] - times[0];
        const double step = t - times.back();
        if (std::abs(step - period) > 1e-3 * period) {
          throw ParseError(where + ": non-uniform sampling");
        }
      } else if (times.size() == 1 && !(t > times[0])) {
        throw ParseError(where + ": timestamps must increase");
      }
      times.push_back(t);
      for (std::size_t c = 0; c < n_channels; ++c) {
        rec.trace.channels[c].push_back(ParseNumber(fields[c + 1], where));
      }
    }
    if (times.size() < 2) {
      throw ParseError(Where(recording_csv, line_no) +
                       ": need at least two samples to infer the period");
    }
    rec.trace.sample_period_s = times[1] - times[0];
  }

  if (!annotation_csv.empty()) {
    std::ifstream in = OpenForRead(annotation_csv);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
      throw ParseError(Where(annotation_csv, 1) + ": missing header row");
    }
    const auto header = SplitCsv(line);
    if (header.size() != 2 || header[0] != "time_s" || header[1] != "label") {
      throw ParseError(Where(annotation_csv, 1) + ": header must be time_s,label");
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto fields = SplitCsv(line);
      const std::string where = Where(annotation_csv, line_no);
      if (fields.size() != 2) throw ParseError(where + ": expected 2 columns");
      Annotation a;
      a.time_s = ParseNumber(fields[0], where);
      try {
        a.label = ParseLabel(fields[1]);
      } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
      }
      rec.annotations.push_back(a);
    }
  }
  return rec;
}

void WriteRecording(const Recording& recording,
                    const std::filesystem::path& recording_csv,
                    const std::filesystem::path& annotation_csv) {
  recording.trace.Validate();
  {
    std::ofstream out(recording_csv);
    if (!out) throw IoError("cannot write " + recording_csv.string());
    out << std::setprecision(17);
    out << "time_s";
    for (std::size_t c = 0; c < recording.trace.channel_count(); ++c) {
      out << ",ch" << c << "_mv";
    }
    out << '\n';
    for (std::size_t i = 0; i < recording.trace.sample_count(); ++i) {
      out << static_cast<double>(i) * recording.trace.sample_period_s;
      for (const auto& ch : recording.trace.channels) out << ',' << ch[i];
      out << '\n';
    }
  }
  std::ofstream out(annotation_csv);
  if (!out) throw IoError("cannot write " + annotation_csv.string());
  out << std::setprecision(17) << "time_s,label\n";
  for (const Annotation& a : recording.annotations) {
    out << a.time_s << ',' << LabelName(a.label) << '\n';
  }
}

Recording SynthEcg(const SynthEcgParams& p, SeededRng& rng) {
  if (!(p.class_mix >= 0.0 && p.class_mix <= 1.0)) {
    throw DomainError("class_mix must lie in [0, 1]");
  }
  if (p.n_beats < 0) throw DomainError("n_beats must be >= 0");
  if (!(p.sample_period_s > 0.0) || !(p.period_s > 0.0)) {
    throw DomainError("synthetic periods must be positive");
  }
  Recording rec;
  rec.trace.sample_period_s = p.sample_period_s;
  if (p.n_beats == 0) return rec;

  const auto n_samples = static_cast<std::size_t>(
      std::llround(p.n_beats * p.period_s / p.sample_period_s));
  std::vector<double> x(n_samples, 0.0);
  const auto add_bump = [&](double centre_s, double amplitude, double width_s) {
    const double lo = (centre_s - 6.0 * width_s) / p.sample_period_s;
    const double hi = (centre_s + 6.0 * width_s) / p.sample_period_s;
    const auto first = static_cast<std::int64_t>(std::max(0.0, std::ceil(lo)));
    const auto last = std::min(static_cast<std::int64_t>(n_samples) - 1,
                               static_cast<std::int64_t>(std::floor(hi)));
    for (std::int64_t i = first; i <= last; ++i) {
      const double z = (i * p.sample_period_s - centre_s) / width_s;
      x[i] += amplitude * std::exp(-0.5 * z * z);
    }
  };

  for (std::int64_t k = 0; k < p.n_beats; ++k) {
    const double centre = (k + 0.5) * p.period_s;
    const Label label =
        rng.Uniform() < p.class_mix ? Label::kAnomalous : Label::kNormal;
    const double spike_gain = 1.0 + p.amplitude_jitter * rng.Uniform(-1.0, 1.0);
    const double wave_gain = 1.0 + p.amplitude_jitter * rng.Uniform(-1.0, 1.0);
    const double jitter = p.timing_jitter_s * rng.Uniform(-1.0, 1.0);
    const double spike_t = centre + p.spike_offset_s;
    double wave_t = spike_t + p.wave_interval_s + jitter;
    if (label == Label::kAnomalous) wave_t += p.displacement_s;
    add_bump(spike_t, p.spike_amplitude_mv * spike_gain, p.spike_width_s);
    add_bump(wave_t, p.wave_amplitude_mv * wave_gain, p.wave_width_s);
    rec.annotations.push_back({centre, label});
  }
  if (p.noise_mv > 0.0) {
    for (double& v : x) v += rng.Normal(0.0, p.noise_mv);
  }
  rec.trace.channels.push_back(std::move(x));
  return rec;
}

}  // namespace dendrram
