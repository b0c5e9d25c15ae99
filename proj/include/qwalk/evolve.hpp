#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qwalk/observables.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

/// Which steps get a Record: every n-th step, or log-spaced times
/// round(factor^k). Step 0 and the final step are always recorded.
class RecordCadence {
 public:
  static RecordCadence every(long n);
  static RecordCadence geometric(double factor);

  /// Parses "every:N" or "geometric:F".
  static RecordCadence parse(const std::string& text);

  std::vector<long> times(long steps) const;
  std::string describe() const;

 private:
  RecordCadence(bool geometric, long every, double factor) : geometric_(geometric), every_(every), factor_(factor) {}

  bool geometric_;
  long every_;
  double factor_;
};

struct EvolveOptions {
  RecordCadence cadence = RecordCadence::geometric(1.25);
  bool track_wavefront = false;
  std::vector<long> snapshot_times;
  bool estimate_stationary = false;
  // Cheaper estimate that tracks SP only.
  bool stationary_origin_only = false;
};

struct EvolutionResult {
  TimeSeries series;
  std::vector<SpatialDistribution> snapshots;
  std::optional<StationaryEstimate> stationary;
};

/// Runs `steps` exact steps from the symmetric input on a lattice of 2*steps+1
/// sites (the strict light cone).
EvolutionResult evolve(MixingAngle theta, CoinParameter rho, long steps, const EvolveOptions& options = {});

}  // namespace qwalk
