#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dendrram/rng.h"

namespace dendrram {

enum class Label : std::uint8_t { kNormal = 0, kAnomalous = 1 };

std::string_view LabelName(Label label);
// Accepts "normal" / "anomalous"; throws ParseError otherwise.
Label ParseLabel(std::string_view text);

// Multichannel analog recording, uniformly sampled.
struct AnalogTrace {
  double sample_period_s = 1e-3;
  std::vector<std::vector<double>> channels;  // [channel][sample], mV

  std::size_t channel_count() const { return channels.size(); }
  std::size_t sample_count() const {
    return channels.empty() ? 0 : channels.front().size();
  }
  // Throws DomainError on a non-positive period or ragged channels.
  void Validate() const;

  friend bool operator==(const AnalogTrace&, const AnalogTrace&) = default;
};

struct Annotation {
  double time_s = 0.0;
  Label label = Label::kNormal;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Recording {
  AnalogTrace trace;
  std::vector<Annotation> annotations;
};

// Binary spike matrix stored channel-major.
class SpikeRaster {
 public:
  SpikeRaster() = default;
  SpikeRaster(double dt_s, int channels, std::int64_t duration_steps);

  double dt_s() const { return dt_s_; }
  int channels() const { return channels_; }
  std::int64_t duration_steps() const { return duration_steps_; }

  bool at(int channel, std::int64_t step) const {
    return bits_[Index(channel, step)] != 0;
  }
  void set(int channel, std::int64_t step, bool value = true) {
    bits_[Index(channel, step)] = value ? 1 : 0;
  }
  std::int64_t SpikeCount(int channel) const;
  std::int64_t TotalSpikes() const;
  // Steps at which the channel spikes, ascending.
  std::vector<std::int64_t> SpikeSteps(int channel) const;
  // Copy of steps [start, start + length); the result has the same channels.
  SpikeRaster Slice(std::int64_t start, std::int64_t length) const;
  // Copy shifted later by `shift` steps, keeping the duration (spikes shifted
  // past the end are lost).
  SpikeRaster Shifted(std::int64_t shift) const;

  friend bool operator==(const SpikeRaster&, const SpikeRaster&) = default;

 private:
  std::size_t Index(int channel, std::int64_t step) const {
    return static_cast<std::size_t>(channel) * duration_steps_ + step;
  }

  double dt_s_ = 1e-3;
  int channels_ = 0;
  std::int64_t duration_steps_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct LabeledWindow {
  SpikeRaster raster;
  Label label = Label::kNormal;
  // Index of the source annotation, used to name the window in errors.
  std::int64_t id = 0;

  friend bool operator==(const LabeledWindow&, const LabeledWindow&) = default;
};

inline constexpr double kDefaultDeltaThresholdMv = 0.1;
inline constexpr double kDefaultDtS = 1e-3;
inline constexpr double kDefaultWindowS = 0.7;

// Level-crossing encoder. Input channel c maps to output channels 2c (UP)
// and 2c + 1 (DOWN). The reconstruction level starts at the first sample and
// moves by one threshold per event; at most one spike per output channel is
// kept per dt bin, extra events in the bin are dropped.
SpikeRaster DeltaModulate(const AnalogTrace& trace, double threshold_mv,
                          double dt_s);

// One window of `window_s` centred on each annotation; windows that would run
// past either end of the raster are dropped.
std::vector<LabeledWindow> SegmentBeats(const SpikeRaster& raster,
                                        const std::vector<Annotation>& annotations,
                                        double window_s = kDefaultWindowS);

// CSV recording: header "time_s,ch0_mv[,ch1_mv...]". Annotation CSV: header
// "time_s,label". An empty annotation path yields no annotations.
Recording LoadRecording(const std::filesystem::path& recording_csv,
                        const std::filesystem::path& annotation_csv = {});
void WriteRecording(const Recording& recording,
                    const std::filesystem::path& recording_csv,
                    const std::filesystem::path& annotation_csv);

// Synthetic two-class beat generator. Each beat is a sharp spike with a
// smaller wave at `wave_interval_s` from it (negative: the wave comes first);
// anomalous beats displace the wave by `displacement_s`. Both classes share
// the same amplitude statistics, so the classes differ only in timing.
struct SynthEcgParams {
  std::int64_t n_beats = 500;
  double class_mix = 0.5;  // probability that a beat is anomalous
  double period_s = 0.7;
  double sample_period_s = 1e-3;
  double spike_amplitude_mv = 1.0;
  double spike_width_s = 0.008;
  double wave_amplitude_mv = 0.6;
  double wave_width_s = 0.008;
  // Spike position relative to the beat centre, and signed spike-to-wave
  // interval of a normal beat.
  double spike_offset_s = 0.28;
  double wave_interval_s = -0.16;
  double displacement_s = 0.08;
  double amplitude_jitter = 0.1;  // relative, uniform +/- per wave
  double timing_jitter_s = 0.005;  // uniform +/- on the wave position
  double noise_mv = 0.0;

  friend bool operator==(const SynthEcgParams&, const SynthEcgParams&) = default;
};

Recording SynthEcg(const SynthEcgParams& params, SeededRng& rng);

}  // namespace dendrram
