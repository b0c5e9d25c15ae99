#pragma once

// Plot-ready CSV and JSON files. Every CSV starts with '#' provenance lines
// and every number is written with 17 significant digits, so parse(write(x))
// gives x back exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/analysis.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/sweep.hpp"

namespace qwalk {

std::string format_double(double value);
double parse_double(const std::string& text);
long parse_long(const std::string& text);
std::vector<std::string> split_csv_line(const std::string& line);

/// Ordered "# key=value" lines written under the "# qwalk <version>" banner.
using Provenance = std::vector<std::pair<std::string, std::string>>;

void write_series_csv(std::ostream& out, const TimeSeries& series);
TimeSeries read_series_csv(std::istream& in);
void write_series_json(std::ostream& out, const TimeSeries& series);
TimeSeries read_series_json(std::istream& in);

void write_distribution_csv(std::ostream& out, const SpatialDistribution& dist, const Provenance& extra = {});
SpatialDistribution read_distribution_csv(std::istream& in);

void write_fit_json(std::ostream& out, const ScalingFit& fit, const Provenance& extra = {});
ScalingFit read_fit_json(std::istream& in);
void write_fit_csv(std::ostream& out, const ScalingFit& fit, const Provenance& extra = {});
ScalingFit read_fit_csv(std::istream& in);

void write_power_law_json(std::ostream& out, const PowerLawFit& fit, const Provenance& extra = {});
PowerLawFit read_power_law_json(std::istream& in);

/// Columns eta, t<time>...; the quality goes in the header.
void write_collapse_csv(std::ostream& out, const CollapseResult& result, const Provenance& extra = {});
CollapseResult read_collapse_csv(std::istream& in);

/// Long format theta, t, value.
void write_surface_csv(std::ostream& out, const Surface& surface, const std::string& observable);
Surface read_surface_csv(std::istream& in);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
SweepResult read_sweep_csv(std::istream& in);
void save_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
void save_sweep_sidecar(const std::filesystem::path& path, const SweepPlan& plan, const SweepResult& result);

/// Writes through a temporary file and a rename, so a failed run leaves no
/// partial output behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace qwalk
