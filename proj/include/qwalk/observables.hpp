#pragma once

// Occupation distribution, survival probability, participation ratio,
// effective growth exponent, wavefront diagnostics and the stationary
// (trapped) limit of a walk.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qwalk/walk.hpp"

namespace qwalk {

/// P_x over a contiguous window of sites [min_x, min_x + size).
class SpatialDistribution {
 public:
  SpatialDistribution() = default;
  SpatialDistribution(long time, int min_x, std::vector<double> probabilities);

  long time() const { return time_; }
  int min_x() const { return min_x_; }
  int max_x() const { return min_x_ + static_cast<int>(probabilities_.size()) - 1; }
  std::span<const double> probabilities() const { return probabilities_; }

  /// Zero outside the stored window.
  double at(int x) const;
  double total() const;

  friend bool operator==(const SpatialDistribution&, const SpatialDistribution&) = default;

 private:
  long time_ = 0;
  int min_x_ = 0;
  std::vector<double> probabilities_;
};

struct Record {
  long t = 0;
  double sp = 0.0;
  double pr = 0.0;
  std::optional<long> x_m;
  std::optional<double> delta;
  std::optional<double> p_front;

  friend bool operator==(const Record&, const Record&) = default;
};

struct SeriesMetadata {
  double rho = 0.0;
  double theta = 0.0;
  long steps = 0;
  std::string cadence;
  bool degenerate = false;
  // Source of the series: "simulation" or "oracle".
  std::string origin = "simulation";

  friend bool operator==(const SeriesMetadata&, const SeriesMetadata&) = default;
};

/// Per-step records of one (rho, theta) run; t strictly increasing.
struct TimeSeries {
  SeriesMetadata metadata;
  std::vector<Record> records;

  /// Throws PreconditionError when an invariant is broken.
  void validate() const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

struct WavefrontSample {
  long t = 0;
  int x_m = 0;
  double delta = 0.0;
  double p_front = 0.0;
};

struct ExponentSample {
  double t = 0.0;  // geometric midpoint of the pair
  double lambda = 0.0;
};

SpatialDistribution distribution(const WalkState& state);

double survival_probability(const SpatialDistribution& dist);

double participation_ratio(const SpatialDistribution& dist);

/// lambda = d ln PR / d ln t from record pairs (i, i + pair_spacing).
std::vector<ExponentSample> effective_exponent(const TimeSeries& series, int pair_spacing = 1);

/// Right-front maximum of P_x over x in [1, t]; ties go to the outermost site.
WavefrontSample wavefront(const SpatialDistribution& dist, double rho, long t);

/// Long-time limit of the trapped part of the walk.
///
/// The amplitude is averaged over the windows (T/4, T/2] and (T/2, T]. The
/// spreading part of the state dephases under the average while the
/// stationary (trapped) part survives, so each window gives an estimate of
/// SP and PR at t -> infinity. Agreement between the two windows is the
/// saturation test: the relative change over a factor-2 window of time.
struct StationaryEstimate {
  long final_time = 0;
  double sp = 0.0;        // from (T/2, T]
  double pr = 0.0;
  double sp_early = 0.0;  // from (T/4, T/2]
  double pr_early = 0.0;

  double sp_change() const;
  double pr_change() const;

  /// SP limit agrees between windows to `tolerance` and exceeds 1/T, the
  /// level of the spreading background at the origin.
  bool sp_saturated(double tolerance = kDefaultTolerance) const;
  bool pr_saturated(double tolerance = kDefaultTolerance) const;

  static constexpr double kDefaultTolerance = 1e-3;
};

class StationaryEstimator {
 public:
  /// Requires final_time >= 4 so both windows are non-empty. With
  /// `origin_only` only x = 0 is averaged: SP is exact and PR is NaN.
  StationaryEstimator(long final_time, int capacity, bool origin_only = false);

  /// Feed the state after every step; times outside the windows are ignored.
  void observe(const WalkState& state);

  StationaryEstimate estimate() const;

 private:
  long final_time_;
  int capacity_;
  bool origin_only_;
  long early_count_ = 0;
  long late_count_ = 0;
  std::vector<Spinor> early_sum_;
  std::vector<Spinor> late_sum_;
};

}  // namespace qwalk
