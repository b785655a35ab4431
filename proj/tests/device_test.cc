#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dendrram/device.h"
#include "dendrram/errors.h"
#include "dendrram/rng.h"

namespace dendrram {
namespace {

double SampleMedian(std::vector<double> xs) {
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  const double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lo + hi);
}

struct Moments {
  double mean = 0.0;
  double skewness = 0.0;
};

Moments LogMoments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += std::log(x);
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = std::log(x) - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  return {mean, m3 / std::pow(m2, 1.5)};
}

TEST(HrsDistribution, RejectsInvalidParameters) {
  EXPECT_THROW(HrsDistribution(0.0, 0.5), DomainError);
  EXPECT_THROW(HrsDistribution(-1.0, 0.5), DomainError);
  EXPECT_THROW(HrsDistribution(1e9, -0.1), DomainError);
  EXPECT_THROW(HrsDistribution(std::nan(""), 0.5), DomainError);
  EXPECT_NO_THROW(HrsDistribution(1e9, 0.0));
}

TEST(HrsDistribution, MeanOfLogNormal) {
  const HrsDistribution d(400e9, 0.5);
  EXPECT_DOUBLE_EQ(d.mean_ohm(), 400e9 * std::exp(0.125));
}

TEST(SampleHrs, ZeroSpreadIsExact) {
  const HrsDistribution d(400e9, 0.0);
  SeededRng rng(1, 2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(SampleHrs(d, rng), 400e9);
}

TEST(SampleHrs, AlwaysPositive) {
  const HrsDistribution d(1.0, 6.0);
  SeededRng rng(3, 0);
  for (int i = 0; i < 100000; ++i) ASSERT_GT(SampleHrs(d, rng), 0.0);
}

// The acceptance band for the median of 10^4 draws, checked against a
// brute-force simulation with an unrelated generator.
TEST(SampleHrs, MedianBandMatchesMonteCarloOracle) {
  constexpr int kDraws = 10000;
  constexpr int kRepeats = 1000;
  std::mt19937_64 engine(20240611);
  std::lognormal_distribution<double> law(std::log(400e9), 0.5);
  std::vector<double> medians;
  std::vector<double> xs(kDraws);
  for (int r = 0; r < kRepeats; ++r) {
    for (double& x : xs) x = law(engine);
    medians.push_back(SampleMedian(xs));
  }
  std::sort(medians.begin(), medians.end());
  const double q_lo = medians[static_cast<std::size_t>(0.005 * kRepeats)];
  const double q_hi = medians[static_cast<std::size_t>(0.995 * kRepeats) - 1];
  EXPECT_GE(q_lo, 360e9);
  EXPECT_LE(q_hi, 444e9);

  const HrsDistribution d(400e9, 0.5);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SeededRng rng(seed, 7);
    for (double& x : xs) x = SampleHrs(d, rng);
    const double m = SampleMedian(xs);
    EXPECT_GE(m, 360e9) << "seed " << seed;
    EXPECT_LE(m, 444e9) << "seed " << seed;
  }
}

TEST(SampleHrs, LogSamplesLookNormal) {
  const std::vector<HrsDistribution> laws = {
      {400e9, 0.5}, {10e9, 0.1}, {1e12, 1.0}, {5e3, 2.0}};
  std::uint64_t seed = 11;
  for (const HrsDistribution& d : laws) {
    SeededRng rng(seed++, 0);
    std::vector<double> xs(10000);
    for (double& x : xs) x = SampleHrs(d, rng);
    const Moments m = LogMoments(xs);
    EXPECT_NEAR(m.mean, std::log(d.median_ohm()), 3.0 * d.sigma_log() / 100.0);
    EXPECT_LT(std::abs(m.skewness), 0.15);
  }
}

TEST(DelayFromRc, Arithmetic) {
  EXPECT_NEAR(DelayFromRc(500e9, 100e-15), 0.05, 1e-15);
  EXPECT_NEAR(DelayFromRc(400e9, 100e-15), 0.04, 1e-15);
  EXPECT_THROW(DelayFromRc(0.0, 100e-15), DomainError);
  EXPECT_THROW(DelayFromRc(400e9, 0.0), DomainError);
  EXPECT_THROW(DelayFromRc(-1.0, 100e-15), DomainError);
}

TEST(DelayFromRc, LinearInEachArgument) {
  SeededRng rng(5, 5);
  for (int i = 0; i < 1000; ++i) {
    const double r = std::exp(rng.Uniform(std::log(1e3), std::log(1e13)));
    const double c = std::exp(rng.Uniform(std::log(1e-15), std::log(1e-9)));
    const double a = rng.Uniform(0.01, 100.0);
    const double base = DelayFromRc(r, c);
    EXPECT_NEAR(DelayFromRc(a * r, c), a * base, 4e-16 * a * base);
    EXPECT_NEAR(DelayFromRc(r, a * c), a * base, 4e-16 * a * base);
  }
}

TEST(DelayElement, DelayIsExactProduct) {
  SeededRng rng(9, 1);
  const HrsDistribution d(400e9, 0.5);
  for (int i = 0; i < 100; ++i) {
    const DelayElement e = MakeDelayElement(d, 100e-15, rng);
    EXPECT_EQ(e.delay_s, e.resistance_ohm * e.capacitance_f);
    EXPECT_EQ(e.capacitance_f, 100e-15);
  }
}

TEST(LrsLevelTable, DefaultTableHasEqualConductanceSteps) {
  const LrsLevelTable t = LrsLevelTable::EqualConductance();
  ASSERT_EQ(t.size(), 8u);
  const double g_lo = 1.0 / 50e3, g_hi = 1.0 / 7e3;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double g = g_hi - (g_hi - g_lo) * static_cast<double>(k) / 7.0;
    EXPECT_NEAR(t[k].mu_ohm, 1.0 / g, 1e-9 * t[k].mu_ohm) << k;
    EXPECT_NEAR(t[k].sigma_ohm, 0.03 * t[k].mu_ohm, 1e-12 * t[k].mu_ohm);
    EXPECT_GE(t[k].mu_ohm, 7e3);
    EXPECT_LE(t[k].mu_ohm, 50e3);
    if (k > 0) {
      EXPECT_GT(t[k].mu_ohm, t[k - 1].mu_ohm);
    }
  }
  EXPECT_EQ(t[0].mu_ohm, 7e3);
  EXPECT_EQ(t[7].mu_ohm, 50e3);
  EXPECT_DOUBLE_EQ(t.max_conductance(), g_hi);
}

TEST(LrsLevelTable, RejectsBadTables) {
  EXPECT_THROW(LrsLevelTable({}), DomainError);
  EXPECT_THROW(LrsLevelTable({{20e3, 1.0}, {20e3, 1.0}}), DomainError);
  EXPECT_THROW(LrsLevelTable({{30e3, 1.0}, {20e3, 1.0}}), DomainError);
  EXPECT_THROW(LrsLevelTable({{6e3, 1.0}}), DomainError);
  EXPECT_THROW(LrsLevelTable({{51e3, 1.0}}), DomainError);
  EXPECT_THROW(LrsLevelTable({{20e3, -1.0}}), DomainError);
  EXPECT_THROW(LrsLevelTable({{20e3, 1.0}}, 50e3, 7e3), DomainError);
  EXPECT_THROW(LrsLevelTable::EqualConductance(1), DomainError);
}

TEST(ProgramLrs, ZeroSpreadIsExact) {
  const LrsLevelTable t({{10e3, 0.0}, {20e3, 0.0}});
  SeededRng rng(1, 1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(ProgramLrs(t, 1, rng), 20e3);
}

TEST(ProgramLrs, ClampsAtLowerBound) {
  const LrsLevelTable t({{7e3, 500.0}});
  SeededRng rng(2, 1);
  int clamped = 0;
  for (int i = 0; i < 10000; ++i) {
    const double r = ProgramLrs(t, 0, rng);
    ASSERT_GE(r, 7e3);
    clamped += r == 7e3;
  }
  EXPECT_GT(clamped, 4000);
  EXPECT_LT(clamped, 6000);
}

TEST(ProgramLrs, MeanWithinThreeStandardErrors) {
  const LrsLevelTable t({{20e3, 600.0}});
  SeededRng rng(3, 1);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += ProgramLrs(t, 0, rng);
  EXPECT_NEAR(sum / 10000.0, 20e3, 3.0 * 600.0 / 100.0);
}

TEST(ProgramLrs, StaysInsideWindow) {
  const LrsLevelTable t = LrsLevelTable::EqualConductance(8, 7e3, 50e3, 0.2);
  SeededRng rng(4, 1);
  for (int k = 0; k < 8; ++k) {
    for (int i = 0; i < 5000; ++i) {
      const double r = ProgramLrs(t, k, rng);
      ASSERT_GE(r, 7e3);
      ASSERT_LE(r, 50e3);
    }
  }
}

TEST(ProgramLrs, RejectsBadIndex) {
  const LrsLevelTable t = LrsLevelTable::EqualConductance();
  SeededRng rng(1, 1);
  EXPECT_THROW(ProgramLrs(t, -1, rng), IndexError);
  EXPECT_THROW(ProgramLrs(t, 8, rng), IndexError);
}

int BruteForceArgmin(const std::vector<double>& grid, double x) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(grid.size()); ++k) {
    if (std::abs(grid[k] - x) < std::abs(grid[best] - x)) best = k;
  }
  return best;
}

TEST(NearestLevel, ExactAndTie) {
  const LrsLevelTable t({{10e3, 0}, {20e3, 0}, {30e3, 0}, {40e3, 0}});
  EXPECT_EQ(NearestLevel(t, 40e3), 3);
  EXPECT_EQ(NearestLevel(t, 25e3), 1);
  EXPECT_EQ(NearestLevel(t, 35e3), 2);
  EXPECT_EQ(NearestLevel(t, 0.0), 0);
  EXPECT_EQ(NearestLevel(t, 1e9), 3);
}

TEST(NearestLevel, MatchesExhaustiveSearch) {
  const LrsLevelTable t = LrsLevelTable::EqualConductance();
  const std::vector<double> mus = t.mus();
  SeededRng rng(8, 8);
  for (int i = 0; i < 10000; ++i) {
    const double w = rng.Uniform(0.0, 60e3);
    ASSERT_EQ(NearestLevel(t, w), BruteForceArgmin(mus, w)) << w;
  }
}

TEST(NearestIndex, RandomGridsWithTies) {
  SeededRng rng(12, 0);
  for (int i = 0; i < 2000; ++i) {
    const int n = 2 + static_cast<int>(rng.UniformIndex(9));
    std::vector<double> grid(n);
    // Integer grid points make midpoints exact, so ties are real ties.
    for (double& g : grid) g = static_cast<double>(rng.UniformIndex(40));
    const double x = 0.5 * static_cast<double>(rng.UniformIndex(82));
    ASSERT_EQ(NearestIndex(grid, x), BruteForceArgmin(grid, x));
  }
  EXPECT_THROW(NearestIndex(std::vector<double>{}, 1.0), DomainError);
}

TEST(FootprintBits, Formula) {
  EXPECT_EQ(FootprintBits(128, 8), 384);
  EXPECT_EQ(FootprintBits(128, 4), 256);
  EXPECT_EQ(FootprintBits(1, 2), 1);
  EXPECT_EQ(FootprintBits(128, 9), 512);
  EXPECT_EQ(FootprintBits(10, 1024), 100);
  EXPECT_EQ(FootprintBits(10, 1025), 110);
  EXPECT_THROW(FootprintBits(0, 8), DomainError);
  EXPECT_THROW(FootprintBits(1, 1), DomainError);
}

TEST(SeededRng, SameSeedAndStreamRepeat) {
  SeededRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  int diff_stream = 0, diff_seed = 0;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    diff_stream += x != c.NextU64();
    diff_seed += x != d.NextU64();
  }
  EXPECT_EQ(diff_stream, 100);
  EXPECT_EQ(diff_seed, 100);
  EXPECT_NE(SeededRng::StreamId("device"), SeededRng::StreamId("init"));
  EXPECT_NE(SeededRng::StreamId("shuffle", 1), SeededRng::StreamId("shuffle", 2));
}

TEST(SeededRng, UniformAndNormalMoments) {
  SeededRng rng(77, 0);
  constexpr int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.Normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sn / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sn2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(SeededRng, UniformIndexCoversRange) {
  SeededRng rng(5, 0);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.UniformIndex(7);
    ASSERT_LT(k, 7u);
    ++hits[k];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
  EXPECT_THROW(rng.UniformIndex(0), DomainError);
}

}  // namespace
}  // namespace dendrram
