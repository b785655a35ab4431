#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dendrram/rng.h"

namespace dendrram {

inline constexpr double kDefaultLrsMinOhm = 7e3;
inline constexpr double kDefaultLrsMaxOhm = 50e3;
inline constexpr int kDefaultLrsLevels = 8;
inline constexpr double kDefaultLrsRelativeSigma = 0.03;
inline constexpr double kDefaultHrsMedianOhm = 400e9;
inline constexpr double kDefaultHrsSigmaLog = 0.5;
inline constexpr double kDefaultCapacitanceF = 100e-15;

// Log-normal law of the high-resistive state: ln R ~ N(ln median, sigma^2).
class HrsDistribution {
 public:
  HrsDistribution(double median_ohm, double sigma_log, std::string label = {});

  double median_ohm() const { return median_ohm_; }
  double sigma_log() const { return sigma_log_; }
  const std::string& label() const { return label_; }
  // E[R] = median * exp(sigma^2 / 2).
  double mean_ohm() const;

  friend bool operator==(const HrsDistribution&, const HrsDistribution&) = default;

 private:
  double median_ohm_;
  double sigma_log_;
  std::string label_;
};

struct LrsLevel {
  double mu_ohm = 0.0;
  double sigma_ohm = 0.0;

  friend bool operator==(const LrsLevel&, const LrsLevel&) = default;
};

// Programmable low-resistive-state levels, strictly increasing in mu_ohm.
// Index 0 is the lowest resistance, i.e. the largest conductance.
class LrsLevelTable {
 public:
  LrsLevelTable(std::vector<LrsLevel> levels, double min_ohm = kDefaultLrsMinOhm,
                double max_ohm = kDefaultLrsMaxOhm);

  // Levels whose conductances 1/mu are equally spaced between 1/max_ohm and
  // 1/min_ohm, each with sigma = relative_sigma * mu.
  static LrsLevelTable EqualConductance(
      int n_levels = kDefaultLrsLevels, double min_ohm = kDefaultLrsMinOhm,
      double max_ohm = kDefaultLrsMaxOhm,
      double relative_sigma = kDefaultLrsRelativeSigma);

  std::size_t size() const { return levels_.size(); }
  const LrsLevel& operator[](std::size_t i) const { return levels_[i]; }
  const std::vector<LrsLevel>& levels() const { return levels_; }
  double min_ohm() const { return min_ohm_; }
  double max_ohm() const { return max_ohm_; }
  std::vector<double> mus() const;
  // Conductance of the lowest-resistance level, 1 / mu_0.
  double max_conductance() const { return 1.0 / levels_.front().mu_ohm; }

  friend bool operator==(const LrsLevelTable&, const LrsLevelTable&) = default;

 private:
  std::vector<LrsLevel> levels_;
  double min_ohm_;
  double max_ohm_;
};

// RRAM in series with a capacitor; the delay is fixed once sampled.
struct DelayElement {
  double resistance_ohm;
  double capacitance_f;
  double delay_s;
};

struct DeviceConfig {
  HrsDistribution hrs{kDefaultHrsMedianOhm, kDefaultHrsSigmaLog, "default"};
  LrsLevelTable lrs = LrsLevelTable::EqualConductance();
  double capacitance_f = kDefaultCapacitanceF;

  friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;
};

double SampleHrs(const HrsDistribution& dist, SeededRng& rng);

// R * C. Throws DomainError unless both are strictly positive.
double DelayFromRc(double resistance_ohm, double capacitance_f);

DelayElement MakeDelayElement(const HrsDistribution& dist, double capacitance_f,
                              SeededRng& rng);

// Gaussian programming draw around the level mean, clamped to the LRS window.
double ProgramLrs(const LrsLevelTable& table, int level_index, SeededRng& rng);

// argmin_k |grid[k] - x|; exact ties go to the lower index. grid must be
// non-empty (not necessarily sorted).
int NearestIndex(std::span<const double> grid, double x);

// Level whose mean resistance is closest to the given resistance.
int NearestLevel(const LrsLevelTable& table, double resistance_ohm);

// Bits needed to store one level index per synapse.
std::int64_t FootprintBits(std::int64_t n_synapses, std::int64_t n_levels);

}  // namespace dendrram
