#include "qwalk/evolve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "qwalk/errors.hpp"

namespace qwalk {

RecordCadence RecordCadence::every(long n) {
  if (n < 1) throw DomainError("record cadence 'every' needs n >= 1");
  return RecordCadence(false, n, 0.0);
}

RecordCadence RecordCadence::geometric(double factor) {
  if (!(factor > 1.0)) throw DomainError("geometric record cadence needs factor > 1");
  return RecordCadence(true, 0, factor);
}

RecordCadence RecordCadence::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw DomainError("record cadence must look like 'every:N' or 'geometric:F', got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if (kind == "every") {
    long n = 0;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc{} || ptr != last) throw DomainError("bad cadence step count '" + value + "'");
    return every(n);
  }
  if (kind == "geometric") {
    double f = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, f);
    if (ec != std::errc{} || ptr != last) throw DomainError("bad cadence factor '" + value + "'");
    return geometric(f);
  }
  throw DomainError("unknown record cadence kind '" + kind + "'");
}

std::vector<long> RecordCadence::times(long steps) const {
  std::set<long> out{0, steps};
  if (geometric_) {
    for (double x = 1.0; x < static_cast<double>(steps); x *= factor_) {
      out.insert(std::lround(x));
    }
  } else {
    for (long t = every_; t < steps; t += every_) out.insert(t);
  }
  return {out.begin(), out.end()};
}

std::string RecordCadence::describe() const {
  char buf[64];
  if (geometric_) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, factor_);
    return "geometric:" + std::string(buf, ptr);
  }
  return "every:" + std::to_string(every_);
}

EvolutionResult evolve(MixingAngle theta, CoinParameter rho, long steps, const EvolveOptions& options) {
  if (steps < 0) {
    throw DomainError("step count must be non-negative");
  }
  if (steps > 50'000'000) {
    throw DomainError("step count too large for an in-memory lattice");
  }
  const CoinOperator coin = build_coin(rho);
  const int capacity = static_cast<int>(std::max<long>(steps, 1));
  auto init = initial_state(theta, rho, capacity);
  WalkState& state = init.state;

  EvolutionResult result;
  TimeSeries& series = result.series;
  series.metadata = {rho.value(), theta.value(), steps, options.cadence.describe(), rho.degenerate(), "simulation"};

  const std::vector<long> record_times = options.cadence.times(steps);
  std::vector<long> snapshot_times = options.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  for (long t : snapshot_times) {
    if (t < 0 || t > steps) throw DomainError("snapshot time " + std::to_string(t) + " outside [0, steps]");
  }

  std::optional<StationaryEstimator> stationary;
  if (options.estimate_stationary) stationary.emplace(steps, capacity, options.stationary_origin_only);

  auto next_record = record_times.begin();
  auto next_snapshot = snapshot_times.begin();
  for (long t = 0;; ++t) {
    const bool want_record = next_record != record_times.end() && *next_record == t;
    const bool want_snapshot = next_snapshot != snapshot_times.end() && *next_snapshot == t;
    if (want_record || want_snapshot) {
      SpatialDistribution dist = distribution(state);
      if (want_record) {
        Record rec{t, survival_probability(dist), participation_ratio(dist), {}, {}, {}};
        if (options.track_wavefront && t >= 1) {
          const WavefrontSample front = wavefront(dist, rho.value(), t);
          rec.x_m = front.x_m;
          rec.delta = front.delta;
          rec.p_front = front.p_front;
        }
        series.records.push_back(rec);
        ++next_record;
      }
      while (next_snapshot != snapshot_times.end() && *next_snapshot == t) {
        result.snapshots.push_back(dist);
        ++next_snapshot;
      }
    }
    if (t == steps) break;
    step(state, coin);
    if (stationary) stationary->observe(state);
  }
  if (stationary) result.stationary = stationary->estimate();
  return result;
}

}  // namespace qwalk
