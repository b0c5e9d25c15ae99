#pragma once

// (rho, theta) parameter grids of independent runs, persisted incrementally.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

enum class ThetaMode { absolute, offset };

struct SweepPlan {
  std::vector<double> rho_grid;
  std::vector<double> theta_grid;
  ThetaMode theta_mode = ThetaMode::absolute;
  long steps = 10'000;

  /// Throws ValidationError for an empty grid or out-of-domain values.
  void validate() const;

  std::size_t size() const { return rho_grid.size() * theta_grid.size(); }

  /// Absolute theta of grid point (i_rho, i_theta).
  double theta_at(std::size_t i_rho, std::size_t i_theta) const;

  /// FNV-1a over a canonical text form of the plan.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  /// 61 x 61 over rho in [0.05, 0.95] and theta in [pi/2, pi], T = 10^4.
  static SweepPlan fig5_default();
};

struct SweepRow {
  double rho = 0.0;
  double theta = 0.0;
  double sp_final = 0.0;
  double pr_final = 0.0;
  bool saturated = false;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepProvenance {
  std::string version;
  std::string plan_hash;
  long steps = 0;
  std::optional<std::string> started;
  std::optional<std::string> finished;

  friend bool operator==(const SweepProvenance&, const SweepProvenance&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // rho-major, theta-minor
  SweepProvenance provenance;
  bool complete = true;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

struct SweepOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  // CSV target. Rows are journaled to "<output>.partial" as they finish and
  // the CSV plus "<output>.json" sidecar appear once the plan is complete.
  std::optional<std::filesystem::path> output;
  bool resume = false;
  // Stop after this many newly computed points, leaving the journal behind.
  std::optional<std::size_t> max_new_points;
  // Wall-clock stamps go to the JSON sidecar only; the CSV stays reproducible.
  bool timestamps = false;
};

/// Final-time SP and PR at every grid point. `saturated` is the stationary
/// SP detector of the run (false for steps < 4).
SweepResult run_sweep(const SweepPlan& plan, const SweepOptions& options = {});

SweepRow run_point(double rho, double theta, long steps);

std::vector<std::pair<double, double>> locus_theta_c(const std::vector<double>& rho_grid);

std::filesystem::path journal_path(const std::filesystem::path& output);
std::filesystem::path sidecar_path(const std::filesystem::path& output);

}  // namespace qwalk
