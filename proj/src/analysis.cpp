#include "qwalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qwalk/errors.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double mean_y = 0.0;
};

// Ordinary least squares on centered data.
LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw FitError("degenerate fit window: all abscissae are equal");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.mean_y = my;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

double interpolate(const Curve& c, double x) {
  auto it = std::lower_bound(c.x.begin(), c.x.end(), x);
  if (it == c.x.begin()) return c.y.front();
  if (it == c.x.end()) return c.y.back();
  const auto hi = static_cast<std::size_t>(it - c.x.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - c.x[lo]) / (c.x[hi] - c.x[lo]);
  return c.y[lo] + w * (c.y[hi] - c.y[lo]);
}

template <typename Rescale>
CollapseResult collapse_surface(const Surface& surface, double rho, std::span<const std::int64_t> times,
                                const CollapseOptions& options, Rescale rescale) {
  if (times.empty()) {
    throw PreconditionError("collapse needs at least one time slice");
  }
  if (surface.size() < 2) {
    throw PreconditionError("collapse needs at least two theta values");
  }
  const double tc = theta_c(CoinParameter(rho)).value();
  if (!(surface.begin()->first < tc && surface.rbegin()->first > tc)) {
    throw PreconditionError("theta grid must bracket theta_c");
  }
  std::vector<Curve> curves;
  for (std::int64_t t : times) {
    Curve c;
    for (const auto& [theta, by_time] : surface) {
      auto it = by_time.find(t);
      if (it == by_time.end()) {
        throw PreconditionError("time " + std::to_string(t) + " missing for theta " + std::to_string(theta));
      }
      const auto [x, y] = rescale(theta - tc, static_cast<double>(t), it->second);
      c.x.push_back(x);
      c.y.push_back(y);
    }
    curves.push_back(std::move(c));
  }
  return collapse_curves(curves, times, options);
}

}  // namespace

ScalingFit fit_log_correction(const TimeSeries& series, FitWindow window) {
  std::vector<double> x, y;
  for (const Record& r : series.records) {
    if (r.t <= 0 || !window.contains(static_cast<double>(r.t))) continue;
    if (!(r.pr > 0.0)) {
      throw FitError("participation ratio must be positive inside the fit window (t=" + std::to_string(r.t) + ")");
    }
    const auto t = static_cast<double>(r.t);
    x.push_back(std::log(t));
    y.push_back(t / r.pr);
  }
  if (x.size() < 10) {
    throw InsufficientDataError("log-correction fit needs at least 10 records in the window, found " +
                                std::to_string(x.size()));
  }
  const LineFit line = fit_line(x, y);
  ScalingFit fit;
  fit.a = 1.0 / line.slope;
  fit.b = line.intercept / line.slope;
  fit.window = window;
  fit.residual_rms = line.residual_rms;
  fit.mean_y = line.mean_y;
  fit.points = x.size();
  const double span = *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
  fit.log_term_resolved = line.slope > 0.0 && line.slope * span > 10.0 * line.residual_rms;
  return fit;
}

PowerLawFit fit_power_law(std::span<const Sample> samples, FitWindow window) {
  std::vector<double> x, y;
  for (const Sample& s : samples) {
    if (!window.contains(s.t)) continue;
    if (!(s.t > 0.0) || !(s.value > 0.0)) {
      throw FitError("power-law fit needs positive t and values inside the window (t=" + std::to_string(s.t) +
                     ", value=" + std::to_string(s.value) + ")");
    }
    x.push_back(std::log(s.t));
    y.push_back(std::log(s.value));
  }
  if (x.size() < 5) {
    throw InsufficientDataError("power-law fit needs at least 5 samples in the window, found " +
                                std::to_string(x.size()));
  }
  const LineFit line = fit_line(x, y);
  return {line.slope, std::exp(line.intercept), line.residual_rms, x.size()};
}

std::vector<Sample> sp_samples(const TimeSeries& series) {
  std::vector<Sample> out;
  for (const Record& r : series.records) out.push_back({static_cast<double>(r.t), r.sp});
  return out;
}

std::vector<Sample> pr_samples(const TimeSeries& series) {
  std::vector<Sample> out;
  for (const Record& r : series.records) out.push_back({static_cast<double>(r.t), r.pr});
  return out;
}

std::vector<Sample> delta_samples(const TimeSeries& series) {
  std::vector<Sample> out;
  for (const Record& r : series.records) {
    if (r.delta) out.push_back({static_cast<double>(r.t), *r.delta});
  }
  return out;
}

std::vector<Sample> front_probability_samples(const TimeSeries& series) {
  std::vector<Sample> out;
  for (const Record& r : series.records) {
    if (r.p_front) out.push_back({static_cast<double>(r.t), *r.p_front});
  }
  return out;
}

std::vector<double> CollapseResult::master_curve() const {
  std::vector<double> out(scaling_variable_grid.size(), 0.0);
  if (rescaled_curves.empty()) return out;
  for (const auto& curve : rescaled_curves) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += curve[i];
  }
  for (double& v : out) v /= static_cast<double>(rescaled_curves.size());
  return out;
}

CollapseResult collapse_curves(std::span<const Curve> curves, std::span<const std::int64_t> times,
                               const CollapseOptions& options) {
  if (curves.empty()) {
    throw PreconditionError("collapse needs at least one curve");
  }
  if (curves.size() != times.size()) {
    throw PreconditionError("collapse needs one time label per curve");
  }
  if (options.grid_points < 2) {
    throw DomainError("collapse grid needs at least two points");
  }
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const Curve& c : curves) {
    if (c.x.size() < 2 || c.x.size() != c.y.size()) {
      throw PreconditionError("each curve needs at least two (x, y) points");
    }
    if (!std::is_sorted(c.x.begin(), c.x.end()) || std::adjacent_find(c.x.begin(), c.x.end()) != c.x.end()) {
      throw PreconditionError("curve abscissae must be strictly increasing");
    }
    lo = std::max(lo, c.x.front());
    hi = std::min(hi, c.x.back());
  }
  if (!(lo < hi)) {
    throw CollapseError("rescaled curves have no overlapping scaling-variable range");
  }

  CollapseResult result;
  result.times_used.assign(times.begin(), times.end());
  const std::size_t n = options.grid_points;
  result.scaling_variable_grid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.scaling_variable_grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  result.scaling_variable_grid.back() = hi;
  for (const Curve& c : curves) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = interpolate(c, result.scaling_variable_grid[i]);
    result.rescaled_curves.push_back(std::move(y));
  }

  const auto k = static_cast<double>(curves.size());
  double variance_sum = 0.0;
  double mean_sq_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& y : result.rescaled_curves) mean += y[i];
    mean /= k;
    double var = 0.0;
    for (const auto& y : result.rescaled_curves) var += (y[i] - mean) * (y[i] - mean);
    variance_sum += var / k;
    mean_sq_sum += mean * mean;
  }
  result.quality = mean_sq_sum > 0.0 ? variance_sum / mean_sq_sum : 0.0;
  return result;
}

CollapseResult collapse_sp(const Surface& sp_surface, double rho, std::span<const std::int64_t> times,
                           double eta_exponent, const CollapseOptions& options) {
  return collapse_surface(sp_surface, rho, times, options, [eta_exponent](double offset, double t, double sp) {
    return std::pair{offset * std::pow(t, eta_exponent), sp * t};
  });
}

CollapseResult collapse_pr(const Surface& pr_surface, double rho, std::span<const std::int64_t> times, double b,
                           bool log_correction, const CollapseOptions& options) {
  return collapse_surface(pr_surface, rho, times, options, [b, log_correction](double offset, double t, double pr) {
    double scaled_time = t;
    if (log_correction) {
      const double denom = b + std::log(t);
      if (!(denom > 0.0)) {
        throw DomainError("b + ln t must be positive for the log-corrected time");
      }
      scaled_time = t / denom;
    }
    return std::pair{offset * std::pow(scaled_time, 0.25), pr / scaled_time};
  });
}

PowerLawFit master_curve_tail(const CollapseResult& result, double tail_start) {
  const std::vector<double> master = result.master_curve();
  double reach = 0.0;
  for (double eta : result.scaling_variable_grid) reach = std::max(reach, std::abs(eta));
  const double cutoff = tail_start * reach;
  std::vector<Sample> tail;
  for (std::size_t i = 0; i < master.size(); ++i) {
    const double eta = std::abs(result.scaling_variable_grid[i]);
    if (eta > 0.0 && eta >= cutoff) tail.push_back({eta, master[i]});
  }
  return fit_power_law(tail, {cutoff, reach});
}

VicinityExponents vicinity_exponents(const std::map<double, SaturatedPoint>& saturated, double rho,
                                     VicinityWindow window) {
  const double tc = theta_c(CoinParameter(rho)).value();
  std::vector<Sample> sp, pr;
  int side = 0;
  for (const auto& [theta, point] : saturated) {
    const double offset = theta - tc;
    const double distance = std::abs(offset);
    if (distance < window.min_offset || distance > window.max_offset) continue;
    const int this_side = offset > 0.0 ? 1 : -1;
    if (side != 0 && this_side != side) {
      throw PreconditionError("vicinity fit needs all theta samples on one side of theta_c");
    }
    side = this_side;
    if (!point.sp_saturated || !point.pr_saturated) {
      throw PreconditionError("vicinity fit needs saturated SP and PR (theta=" + std::to_string(theta) + ")");
    }
    sp.push_back({distance, point.sp});
    pr.push_back({distance, point.pr});
  }
  const FitWindow all{window.min_offset, window.max_offset};
  return {fit_power_law(sp, all), fit_power_law(pr, all)};
}

}  // namespace qwalk
