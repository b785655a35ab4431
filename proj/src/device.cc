#include "dendrram/device.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dendrram/errors.h"

namespace dendrram {

HrsDistribution::HrsDistribution(double median_ohm, double sigma_log,
                                 std::string label)
    : median_ohm_(median_ohm), sigma_log_(sigma_log), label_(std::move(label)) {
  if (!(median_ohm > 0.0) || !std::isfinite(median_ohm)) {
    throw DomainError("HRS median must be a positive finite resistance");
  }
  if (!(sigma_log >= 0.0) || !std::isfinite(sigma_log)) {
    throw DomainError("HRS sigma_log must be finite and >= 0");
  }
}

double HrsDistribution::mean_ohm() const {
  return median_ohm_ * std::exp(0.5 * sigma_log_ * sigma_log_);
}

LrsLevelTable::LrsLevelTable(std::vector<LrsLevel> levels, double min_ohm,
                             double max_ohm)
    : levels_(std::move(levels)), min_ohm_(min_ohm), max_ohm_(max_ohm) {
  if (!(min_ohm > 0.0) || !(max_ohm > min_ohm)) {
    throw DomainError("LRS window must satisfy 0 < min_ohm < max_ohm");
  }
  if (levels_.empty()) throw DomainError("LRS level table is empty");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const LrsLevel& level = levels_[i];
    if (level.mu_ohm < min_ohm || level.mu_ohm > max_ohm) {
      std::ostringstream msg;
      msg << "LRS level " << i << " mean " << level.mu_ohm
          << " ohm lies outside [" << min_ohm << ", " << max_ohm << "]";
      throw DomainError(msg.str());
    }
    if (!(level.sigma_ohm >= 0.0)) {
      throw DomainError("LRS level sigma must be >= 0");
    }
    if (i > 0 && !(level.mu_ohm > levels_[i - 1].mu_ohm)) {
      throw DomainError("LRS level means must be strictly increasing");
    }
  }
}

LrsLevelTable LrsLevelTable::EqualConductance(int n_levels, double min_ohm,
                                              double max_ohm,
                                              double relative_sigma) {
  if (n_levels < 2) throw DomainError("need at least two LRS levels");
  const double g_hi = 1.0 / min_ohm;
  const double g_lo = 1.0 / max_ohm;
  std::vector<LrsLevel> levels(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    // k = 0 is the highest conductance (lowest resistance).
    const double g = g_hi - (g_hi - g_lo) * k / (n_levels - 1);
    double mu = 1.0 / g;
    // Pin the endpoints exactly so they sit on the window edges.
    if (k == 0) mu = min_ohm;
    if (k == n_levels - 1) mu = max_ohm;
    levels[k] = {mu, relative_sigma * mu};
  }
  return LrsLevelTable(std::move(levels), min_ohm, max_ohm);
}

std::vector<double> LrsLevelTable::mus() const {
  std::vector<double> out(levels_.size());
  std::transform(levels_.begin(), levels_.end(), out.begin(),
                 [](const LrsLevel& l) { return l.mu_ohm; });
  return out;
}

double SampleHrs(const HrsDistribution& dist, SeededRng& rng) {
  if (dist.sigma_log() == 0.0) return dist.median_ohm();
  return std::exp(std::log(dist.median_ohm()) + dist.sigma_log() * rng.Normal());
}

double DelayFromRc(double resistance_ohm, double capacitance_f) {
  if (!(resistance_ohm > 0.0) || !(capacitance_f > 0.0)) {
    throw DomainError("RC delay needs strictly positive resistance and capacitance");
  }
  return resistance_ohm * capacitance_f;
}

DelayElement MakeDelayElement(const HrsDistribution& dist, double capacitance_f,
                              SeededRng& rng) {
  const double r = SampleHrs(dist, rng);
  return {r, capacitance_f, DelayFromRc(r, capacitance_f)};
}

double ProgramLrs(const LrsLevelTable& table, int level_index, SeededRng& rng) {
  if (level_index < 0 || static_cast<std::size_t>(level_index) >= table.size()) {
    throw IndexError("LRS level index " + std::to_string(level_index) +
                     " out of range [0, " + std::to_string(table.size()) + ")");
  }
  const LrsLevel& level = table[level_index];
  if (level.sigma_ohm == 0.0) return level.mu_ohm;
  const double r = rng.Normal(level.mu_ohm, level.sigma_ohm);
  return std::clamp(r, table.min_ohm(), table.max_ohm());
}

int NearestIndex(std::span<const double> grid, double x) {
  if (grid.empty()) throw DomainError("nearest-level search over an empty grid");
  int best = 0;
  double best_dist = std::abs(grid[0] - x);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double d = std::abs(grid[k] - x);
    if (d < best_dist) {
      best = static_cast<int>(k);
      best_dist = d;
    }
  }
  return best;
}

int NearestLevel(const LrsLevelTable& table, double resistance_ohm) {
  const std::vector<double> mus = table.mus();
  return NearestIndex(mus, resistance_ohm);
}

std::int64_t FootprintBits(std::int64_t n_synapses, std::int64_t n_levels) {
  if (n_synapses < 1 || n_levels < 2) {
    throw DomainError("footprint needs n_synapses >= 1 and n_levels >= 2");
  }
  std::int64_t bits = 0;
  while ((std::int64_t{1} << bits) < n_levels) ++bits;
  return n_synapses * bits;
}

}  // namespace dendrram
