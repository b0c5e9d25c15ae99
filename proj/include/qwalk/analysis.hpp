#pragma once

// Growth-law fits and single-parameter scaling collapses near the detrapping
// angle.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qwalk/observables.hpp"

namespace qwalk {

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;

  bool contains(double t) const { return t >= t_min && t <= t_max; }

  friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

/// PR = a t / (b + ln t), fitted as the straight line t/PR = (b + ln t) / a.
struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  FitWindow window;
  double residual_rms = 0.0;  // of t/PR
  double mean_y = 0.0;        // mean of t/PR over the window
  std::size_t points = 0;
  // False when the ln t trend is not resolved above the scatter, e.g. for
  // PR = c t where the slope vanishes and b is meaningless.
  bool log_term_resolved = false;

  double relative_residual() const { return residual_rms / mean_y; }

  friend bool operator==(const ScalingFit&, const ScalingFit&) = default;
};

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual_rms = 0.0;  // of ln(value)
  std::size_t points = 0;
};

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

ScalingFit fit_log_correction(const TimeSeries& series, FitWindow window);

/// Least squares of ln(value) against ln(t) over the samples inside `window`.
PowerLawFit fit_power_law(std::span<const Sample> samples, FitWindow window);

/// Convenience extractors for the TimeSeries columns.
std::vector<Sample> sp_samples(const TimeSeries& series);
std::vector<Sample> pr_samples(const TimeSeries& series);
std::vector<Sample> delta_samples(const TimeSeries& series);
std::vector<Sample> front_probability_samples(const TimeSeries& series);

/// theta -> (t -> observable).
using Surface = std::map<double, std::map<std::int64_t, double>>;

struct CollapseResult {
  std::vector<double> scaling_variable_grid;
  std::vector<std::vector<double>> rescaled_curves;  // one per time, on the grid
  std::vector<std::int64_t> times_used;
  double quality = 0.0;

  /// Mean of the rescaled curves at each grid point.
  std::vector<double> master_curve() const;

  friend bool operator==(const CollapseResult&, const CollapseResult&) = default;
};

struct CollapseOptions {
  std::size_t grid_points = 201;
};

struct Curve {
  std::vector<double> x;  // strictly increasing
  std::vector<double> y;
};

/// Interpolates every curve linearly onto a uniform grid over the common
/// x-range and scores the spread: mean over the grid of the cross-curve
/// variance, divided by the mean over the grid of the squared mean curve.
CollapseResult collapse_curves(std::span<const Curve> curves, std::span<const std::int64_t> times,
                               const CollapseOptions& options = {});

/// SP(theta, t) = t^-1 f[(theta - theta_c) t^eta_exponent], eta_exponent = 1/2.
CollapseResult collapse_sp(const Surface& sp_surface, double rho, std::span<const std::int64_t> times,
                           double eta_exponent = 0.5, const CollapseOptions& options = {});

/// PR(theta, t) = T g[(theta - theta_c) T^(1/4)] with T = t/(b + ln t), or
/// T = t when `log_correction` is false.
CollapseResult collapse_pr(const Surface& pr_surface, double rho, std::span<const std::int64_t> times, double b,
                           bool log_correction = true, const CollapseOptions& options = {});

/// Log-log slope of |master curve| against |eta| over the outer part of the
/// grid, |eta| >= tail_start * max|eta|, both sides pooled.
PowerLawFit master_curve_tail(const CollapseResult& result, double tail_start = 0.5);

struct SaturatedPoint {
  double sp = 0.0;
  double pr = 0.0;
  bool sp_saturated = false;
  bool pr_saturated = false;
};

struct VicinityWindow {
  double min_offset = 0.02;
  double max_offset = 0.3;
};

struct VicinityExponents {
  PowerLawFit sp;
  PowerLawFit pr;
};

/// Fits SP_inf ~ |theta - theta_c|^sp_exp and PR_inf ~ |theta - theta_c|^pr_exp
/// over the offsets inside `window`. All points used must lie on one side of
/// theta_c and be saturated.
VicinityExponents vicinity_exponents(const std::map<double, SaturatedPoint>& saturated, double rho,
                                     VicinityWindow window = {});

}  // namespace qwalk
