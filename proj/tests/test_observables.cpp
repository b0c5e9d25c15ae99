#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"
#include "qwalk/observables.hpp"

using namespace qwalk;

namespace {

const double kGrover = 1.0 / std::numbers::sqrt3;

TimeSeries synthetic(const std::vector<long>& times, double (*pr)(double)) {
  TimeSeries s;
  for (long t : times) s.records.push_back({t, 0.5, pr(static_cast<double>(t)), {}, {}, {}});
  return s;
}

std::vector<long> log_times(double lo, double hi, int n) {
  std::vector<long> out;
  for (int i = 0; i < n; ++i) {
    const long t = std::lround(lo * std::pow(hi / lo, i / (n - 1.0)));
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("distribution of the initial and one-step states") {
  auto init = initial_state(MixingAngle(1.1), CoinParameter(0.4), 4);
  const SpatialDistribution d0 = distribution(init.state);
  CHECK(d0.at(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d0.total() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(survival_probability(d0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(participation_ratio(d0) == doctest::Approx(1.0).epsilon(1e-15));

  for (double rho : {0.1, kGrover, 0.85}) {
    WalkState s(2);
    s.set(0, Spinor{0.0, 1.0, 0.0});
    step(s, build_coin(CoinParameter(rho)));
    const SpatialDistribution d = distribution(s);
    const double side = rho * rho * (2 - 2 * rho * rho);
    const double centre = (2 * rho * rho - 1) * (2 * rho * rho - 1);
    CHECK(std::abs(d.at(-1) - side) < 1e-15);
    CHECK(std::abs(d.at(1) - side) < 1e-15);
    CHECK(std::abs(d.at(0) - centre) < 1e-15);
    CHECK(std::abs(2 * side + centre - 1.0) < 1e-15);
    CHECK(d.at(5) == 0.0);
  }
}

TEST_CASE("participation ratio of simple distributions") {
  CHECK(participation_ratio(SpatialDistribution(0, 0, {1.0})) == 1.0);
  for (int m : {1, 2, 7, 100}) {
    std::vector<double> p(static_cast<std::size_t>(m), 1.0 / m);
    CHECK(participation_ratio(SpatialDistribution(0, -m / 2, p)) == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("distribution invariants along random runs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int run = 0; run < 20; ++run) {
    const CoinParameter rho(u(rng));
    auto init = initial_state(MixingAngle(std::numbers::pi * u(rng)), rho, 200);
    const CoinOperator coin = build_coin(rho);
    for (int t = 1; t <= 200; ++t) {
      step(init.state, coin);
      const SpatialDistribution d = distribution(init.state);
      const auto p = d.probabilities();
      double off_origin = 0.0;
      for (int x = d.min_x(); x <= d.max_x(); ++x) {
        REQUIRE(d.at(x) >= 0.0);
        if (x != 0) off_origin += d.at(x);
        REQUIRE(std::abs(d.at(x) - d.at(-x)) < 1e-12);
      }
      REQUIRE(std::abs(d.total() - 1.0) < 1e-12);
      REQUIRE(std::abs(survival_probability(d) + off_origin - 1.0) < 1e-12);
      const double pr = participation_ratio(d);
      REQUIRE(pr >= 1.0 - 1e-12);
      REQUIRE(pr <= static_cast<double>(p.size()) + 1e-9);
    }
  }
}

TEST_CASE("effective exponent of exact laws") {
  const auto times = log_times(10, 1e5, 40);
  for (int spacing : {1, 2, 5}) {
    const auto lam = effective_exponent(synthetic(times, [](double t) { return t * t; }), spacing);
    REQUIRE(lam.size() == times.size() - static_cast<std::size_t>(spacing));
    for (const auto& s : lam) CHECK(std::abs(s.lambda - 2.0) < 1e-10);
  }
  const auto lam = effective_exponent(synthetic(times, [](double t) { return 2 * t / (3 + std::log(t)); }));
  for (const auto& s : lam) CHECK(std::abs(s.lambda - (1 - 1 / (3 + std::log(s.t)))) < 1e-3);
  CHECK(lam.front().t == doctest::Approx(std::sqrt(static_cast<double>(times[0] * times[1]))));

  CHECK_THROWS_AS(effective_exponent(synthetic({5}, [](double t) { return t; })), InsufficientDataError);
  CHECK_THROWS_AS(effective_exponent(synthetic({5, 6}, [](double t) { return t; }), 2), InsufficientDataError);
}

TEST_CASE("wavefront picks the outermost maximum in [1, t]") {
  // x = -3..3
  const SpatialDistribution d(3, -3, {0.3, 0.0, 0.05, 0.1, 0.2, 0.15, 0.2});
  const WavefrontSample w = wavefront(d, 0.5, 3);
  CHECK(w.x_m == 3);
  CHECK(w.delta == doctest::Approx(1.5 - 3));
  CHECK(w.p_front == 0.2);
  CHECK_THROWS_AS(wavefront(d, 0.5, 0), DomainError);
  const SpatialDistribution still(2, -2, {0.0, 0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(wavefront(still, 0.0, 2), UndefinedFrontError);
}

TEST_CASE("left and right fronts mirror each other for the symmetric input") {
  const CoinParameter rho(kGrover);
  EvolveOptions opts;
  opts.snapshot_times = {150};
  const auto run = evolve(theta_c(rho), rho, 150, opts);
  const SpatialDistribution& d = run.snapshots.at(0);
  const WavefrontSample w = wavefront(d, rho.value(), 150);
  double left_max = 0.0;
  int left_x = 0;
  for (int x = -150; x <= -1; ++x) {
    if (d.at(x) > left_max) {
      left_max = d.at(x);
      left_x = x;
    }
  }
  CHECK(left_x == -w.x_m);
  CHECK(w.x_m > 0);
  CHECK(w.x_m <= 150);
}

TEST_CASE("time series validation") {
  TimeSeries s;
  s.records = {{0, 1.0, 1.0, {}, {}, {}}, {2, 0.5, 2.0, {}, {}, {}}};
  CHECK_NOTHROW(s.validate());
  s.records.push_back({2, 0.5, 2.0, {}, {}, {}});
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s.records.back() = {3, 1.5, 2.0, {}, {}, {}};
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s.records.back() = {3, 0.5, 0.5, {}, {}, {}};
  CHECK_THROWS_AS(s.validate(), PreconditionError);
}

TEST_CASE("record cadence") {
  CHECK(RecordCadence::every(3).times(10) == std::vector<long>{0, 3, 6, 9, 10});
  CHECK(RecordCadence::parse("every:5").times(10) == std::vector<long>{0, 5, 10});
  const auto g = RecordCadence::parse("geometric:2").times(20);
  CHECK(g == std::vector<long>{0, 1, 2, 4, 8, 16, 20});
  CHECK(RecordCadence::parse("geometric:1.25").describe() == "geometric:1.25");
  CHECK_THROWS_AS(RecordCadence::parse("every:0"), DomainError);
  CHECK_THROWS_AS(RecordCadence::parse("geometric:1"), DomainError);
  CHECK_THROWS_AS(RecordCadence::parse("often"), DomainError);
  CHECK_THROWS_AS(RecordCadence::parse("every:3x"), DomainError);
}

TEST_CASE("evolve with T = 0 gives the delta record") {
  const auto run = evolve(MixingAngle(0.7), CoinParameter(0.3), 0);
  REQUIRE(run.series.records.size() == 1);
  const Record& r = run.series.records[0];
  CHECK(r.t == 0);
  CHECK(r.sp == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.pr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(evolve(MixingAngle(0.7), CoinParameter(0.3), -1), DomainError);
}

// The ratio of the SP values is 4.53 here, which an independent numpy
// simulation reproduces.
TEST_CASE("trapping off theta_c and spreading at theta_c after 100 steps") {
  const CoinParameter rho(kGrover);
  const double tc = theta_c(rho).value();
  EvolveOptions opts;
  opts.snapshot_times = {100};
  const auto at_c = evolve(MixingAngle(tc), rho, 100, opts);
  const auto off = evolve(MixingAngle(tc - 0.3), rho, 100, opts);
  const double sp_c = at_c.series.records.back().sp;
  const double sp_off = off.series.records.back().sp;
  CHECK(sp_off > 10 * sp_c);

  const SpatialDistribution& d = at_c.snapshots.at(0);
  double peak = 0.0;
  for (double p : d.probabilities()) peak = std::max(peak, p);
  CHECK(d.at(0) < 0.1 * peak);
  CHECK(std::abs(d.total() - 1.0) < 1e-12);
  CHECK(at_c.series.records.back().pr > 30.0);
}

TEST_CASE("snapshots and records agree") {
  const CoinParameter rho(0.45);
  EvolveOptions opts;
  opts.cadence = RecordCadence::every(10);
  opts.snapshot_times = {30, 10};
  opts.track_wavefront = true;
  const auto run = evolve(MixingAngle(2.0), rho, 40, opts);
  REQUIRE(run.snapshots.size() == 2);
  CHECK(run.snapshots[0].time() == 10);
  CHECK(run.snapshots[1].time() == 30);
  const Record& r30 = run.series.records[3];
  CHECK(r30.t == 30);
  CHECK(r30.sp == survival_probability(run.snapshots[1]));
  CHECK(r30.pr == participation_ratio(run.snapshots[1]));
  CHECK(r30.x_m.has_value());
  CHECK_FALSE(run.series.records[0].x_m.has_value());
  CHECK_NOTHROW(run.series.validate());
  CHECK(run.series.metadata.cadence == "every:10");
}

TEST_CASE("stationary estimator") {
  CHECK_THROWS_AS(StationaryEstimator(3, 10), DomainError);
  // rho = 1 and theta = 0 leave |S> parked at the origin.
  EvolveOptions opts;
  opts.estimate_stationary = true;
  const auto still = evolve(MixingAngle(0.0), CoinParameter(1.0), 64, opts);
  REQUIRE(still.stationary.has_value());
  CHECK(still.stationary->sp == doctest::Approx(1.0));
  CHECK(still.stationary->pr == doctest::Approx(1.0));
  CHECK(still.stationary->sp_saturated());
  CHECK(still.stationary->pr_saturated());
  CHECK(still.series.metadata.degenerate);

  // Nothing is trapped at theta_c.
  const CoinParameter rho(kGrover);
  const auto at_c = evolve(theta_c(rho), rho, 2000, opts);
  CHECK_FALSE(at_c.stationary->sp_saturated());

  opts.stationary_origin_only = true;
  const auto off = evolve(MixingAngle(theta_c(rho).value() - 0.3), rho, 2000, opts);
  CHECK(std::isnan(off.stationary->pr));
  CHECK_FALSE(off.stationary->pr_saturated());
  CHECK(off.stationary->sp_saturated());
}

// The instantaneous form of the convergence statement. The origin carries a
// cross term between the trapped and the spreading parts that decays only
// like t^-1/2, so the ratio below is of order 1e-2 at these times.
TEST_CASE("SP(t) settles off theta_c: |SP(1e4) - SP(5e3)| < 1e-3 SP(1e4)") {
  const CoinParameter rho(kGrover);
  const double tc = theta_c(rho).value();
  EvolveOptions opts;
  opts.cadence = RecordCadence::every(5000);
  for (double offset : {-0.3, 0.3}) {
    const auto run = evolve(MixingAngle(tc + offset), rho, 10'000, opts);
    const auto& r = run.series.records;
    REQUIRE(r.size() == 3);
    const double change = std::abs(r[2].sp - r[1].sp) / r[2].sp;
    CAPTURE(offset);
    CAPTURE(change);
    CHECK(change < 1e-3);
  }
}
