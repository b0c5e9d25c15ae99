#include "qwalk/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "qwalk/errors.hpp"

namespace qwalk {

SpatialDistribution::SpatialDistribution(long time, int min_x, std::vector<double> probabilities)
    : time_(time), min_x_(min_x), probabilities_(std::move(probabilities)) {}

double SpatialDistribution::at(int x) const {
  if (x < min_x_ || x > max_x()) return 0.0;
  return probabilities_[static_cast<std::size_t>(x - min_x_)];
}

double SpatialDistribution::total() const {
  return std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
}

void TimeSeries::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record& r = records[i];
    if (i > 0 && r.t <= records[i - 1].t) {
      throw PreconditionError("time series records must have strictly increasing t (at t=" + std::to_string(r.t) + ")");
    }
    // Rounding can push SP a hair past 1 and PR a hair below 1 for a delta peak.
    if (!(r.sp >= 0.0 && r.sp <= 1.0 + 1e-12)) {
      throw PreconditionError("survival probability outside [0, 1] at t=" + std::to_string(r.t));
    }
    if (!(r.pr >= 1.0 - 1e-12)) {
      throw PreconditionError("participation ratio below 1 at t=" + std::to_string(r.t));
    }
  }
}

SpatialDistribution distribution(const WalkState& state) {
  const int reach = state.reach();
  std::vector<double> p(2 * static_cast<std::size_t>(reach) + 1);
  for (int x = -reach; x <= reach; ++x) {
    p[static_cast<std::size_t>(x + reach)] = state.at(x).norm_squared();
  }
  return SpatialDistribution(state.time(), -reach, std::move(p));
}

double survival_probability(const SpatialDistribution& dist) { return dist.at(0); }

double participation_ratio(const SpatialDistribution& dist) {
  double sum_sq = 0.0;
  for (double p : dist.probabilities()) sum_sq += p * p;
  return 1.0 / sum_sq;
}

std::vector<ExponentSample> effective_exponent(const TimeSeries& series, int pair_spacing) {
  if (pair_spacing < 1) {
    throw DomainError("pair spacing must be at least 1");
  }
  std::vector<const Record*> usable;
  for (const Record& r : series.records) {
    if (r.t > 0 && r.pr > 0.0) usable.push_back(&r);
  }
  if (usable.size() < 2 || usable.size() <= static_cast<std::size_t>(pair_spacing)) {
    throw InsufficientDataError("effective exponent needs at least two usable records separated by the pair spacing");
  }
  std::vector<ExponentSample> out;
  out.reserve(usable.size() - pair_spacing);
  for (std::size_t i = 0; i + pair_spacing < usable.size(); ++i) {
    const Record& a = *usable[i];
    const Record& b = *usable[i + pair_spacing];
    const double t1 = static_cast<double>(a.t);
    const double t2 = static_cast<double>(b.t);
    const double lambda = (std::log(b.pr) - std::log(a.pr)) / (std::log(t2) - std::log(t1));
    out.push_back({std::sqrt(t1 * t2), lambda});
  }
  return out;
}

WavefrontSample wavefront(const SpatialDistribution& dist, double rho, long t) {
  if (t < 1) {
    throw DomainError("wavefront requires t >= 1");
  }
  const int hi = static_cast<int>(std::min<long>(t, dist.max_x()));
  int best_x = 0;
  double best_p = 0.0;
  for (int x = 1; x <= hi; ++x) {
    const double p = dist.at(x);
    if (p > 0.0 && p >= best_p) {
      best_p = p;
      best_x = x;
    }
  }
  if (best_x == 0) {
    throw UndefinedFrontError("no probability on the right half of the lattice at t=" + std::to_string(t));
  }
  return {t, best_x, rho * static_cast<double>(t) - best_x, best_p};
}

double StationaryEstimate::sp_change() const { return std::abs(sp - sp_early) / sp; }

double StationaryEstimate::pr_change() const { return std::abs(pr - pr_early) / pr; }

bool StationaryEstimate::sp_saturated(double tolerance) const {
  return sp * static_cast<double>(final_time) >= 1.0 && sp_change() < tolerance;
}

bool StationaryEstimate::pr_saturated(double tolerance) const {
  return sp_saturated(tolerance) && pr_change() < tolerance;
}

StationaryEstimator::StationaryEstimator(long final_time, int capacity, bool origin_only)
    : final_time_(final_time), capacity_(capacity), origin_only_(origin_only) {
  if (final_time < 4) {
    throw DomainError("stationary estimate needs at least 4 steps");
  }
  early_sum_.assign(2 * static_cast<std::size_t>(capacity) + 1, Spinor{});
  late_sum_.assign(early_sum_.size(), Spinor{});
}

void StationaryEstimator::observe(const WalkState& state) {
  const long t = state.time();
  std::vector<Spinor>* target = nullptr;
  if (4 * t > final_time_ && 2 * t <= final_time_) {
    target = &early_sum_;
    ++early_count_;
  } else if (2 * t > final_time_ && t <= final_time_) {
    target = &late_sum_;
    ++late_count_;
  } else {
    return;
  }
  if (state.capacity() != capacity_) {
    throw DomainError("stationary estimator lattice does not match the walker");
  }
  const int reach = origin_only_ ? 0 : state.reach();
  auto sites = state.sites();
  for (int x = -reach; x <= reach; ++x) {
    const auto i = static_cast<std::size_t>(x + capacity_);
    Spinor& acc = (*target)[i];
    acc.left += sites[i].left;
    acc.stay += sites[i].stay;
    acc.right += sites[i].right;
  }
}

StationaryEstimate StationaryEstimator::estimate() const {
  if (early_count_ == 0 || late_count_ == 0) {
    throw InsufficientDataError("stationary estimate requested before both averaging windows were observed");
  }
  auto limits = [this](const std::vector<Spinor>& sum, long count) {
    const double scale = 1.0 / (static_cast<double>(count) * static_cast<double>(count));
    double sum_sq = 0.0;
    for (const Spinor& s : sum) {
      const double p = s.norm_squared() * scale;
      sum_sq += p * p;
    }
    const double sp = sum[static_cast<std::size_t>(capacity_)].norm_squared() * scale;
    const double pr = origin_only_ ? std::numeric_limits<double>::quiet_NaN()
                      : sum_sq > 0.0 ? 1.0 / sum_sq : std::numeric_limits<double>::infinity();
    return std::pair{sp, pr};
  };
  StationaryEstimate out;
  out.final_time = final_time_;
  std::tie(out.sp_early, out.pr_early) = limits(early_sum_, early_count_);
  std::tie(out.sp, out.pr) = limits(late_sum_, late_count_);
  return out;
}

}  // namespace qwalk
