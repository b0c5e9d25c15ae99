#include "qwalk/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"
#include "qwalk/io.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string journal_header(const SweepPlan& plan) { return "# qwalk sweep journal plan=" + plan.hash_hex(); }

// index -> row. A torn final line (no newline) is ignored.
std::map<std::size_t, SweepRow> read_journal(const std::filesystem::path& path, const SweepPlan& plan) {
  std::map<std::size_t, SweepRow> done;
  std::ifstream in(path, std::ios::binary);
  if (!in) return done;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::istringstream lines(content);
  std::string line;
  bool first = true;
  std::size_t consumed = 0;
  while (std::getline(lines, line)) {
    consumed += line.size() + 1;
    if (consumed > content.size()) break;  // no trailing newline
    if (first) {
      if (line != journal_header(plan)) {
        throw IoError("journal " + path.string() + " belongs to a different plan");
      }
      first = false;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) throw IoError("malformed journal line in " + path.string());
    const auto index = static_cast<std::size_t>(parse_long(fields[0]));
    if (index >= plan.size()) throw IoError("journal index out of range in " + path.string());
    done[index] = {parse_double(fields[1]), parse_double(fields[2]), parse_double(fields[3]),
                   parse_double(fields[4]), fields[5] == "1"};
  }
  return done;
}

}  // namespace

void SweepPlan::validate() const {
  if (rho_grid.empty() || theta_grid.empty()) {
    throw ValidationError("sweep grids must be non-empty");
  }
  if (steps < 1) {
    throw DomainError("sweep needs T >= 1");
  }
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    CoinParameter{rho_grid[i]};
    for (std::size_t j = 0; j < theta_grid.size(); ++j) theta_at(i, j);
  }
}

double SweepPlan::theta_at(std::size_t i_rho, std::size_t i_theta) const {
  const double theta = theta_grid.at(i_theta);
  if (theta_mode == ThetaMode::absolute) return MixingAngle(theta).value();
  return MixingAngle(theta_c(CoinParameter(rho_grid.at(i_rho))).value() + theta).value();
}

std::uint64_t SweepPlan::hash() const {
  std::string text = "steps=" + std::to_string(steps);
  text += theta_mode == ThetaMode::absolute ? ";mode=absolute;rho=" : ";mode=offset;rho=";
  for (double r : rho_grid) text += format_double(r) + ",";
  text += ";theta=";
  for (double t : theta_grid) text += format_double(t) + ",";
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string SweepPlan::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

SweepPlan SweepPlan::fig5_default() {
  SweepPlan plan;
  for (int i = 0; i < 61; ++i) {
    plan.rho_grid.push_back(i == 60 ? 0.95 : 0.05 + 0.9 * i / 60.0);
    plan.theta_grid.push_back(i == 60 ? std::numbers::pi : std::numbers::pi / 2.0 + (std::numbers::pi / 2.0) * i / 60.0);
  }
  plan.steps = 10'000;
  return plan;
}

SweepRow run_point(double rho, double theta, long steps) {
  EvolveOptions options;
  options.cadence = RecordCadence::every(std::max(steps, 1L));
  options.estimate_stationary = steps >= 4;
  options.stationary_origin_only = true;
  const EvolutionResult run = evolve(MixingAngle(theta), CoinParameter(rho), steps, options);
  const Record& last = run.series.records.back();
  return {rho, theta, last.sp, last.pr, run.stationary ? run.stationary->sp_saturated() : false};
}

SweepResult run_sweep(const SweepPlan& plan, const SweepOptions& options) {
  plan.validate();
  SweepResult result;
  result.provenance = {QWALK_VERSION, plan.hash_hex(), plan.steps, {}, {}};
  if (options.timestamps) result.provenance.started = utc_now();

  std::map<std::size_t, SweepRow> done;
  std::ofstream journal;
  if (options.output) {
    const auto jpath = journal_path(*options.output);
    if (options.resume) done = read_journal(jpath, plan);
    const bool fresh = done.empty();
    if (fresh) {
      journal.open(jpath, std::ios::binary | std::ios::trunc);
      if (journal) journal << journal_header(plan) << '\n';
    } else {
      // Drop a torn tail before appending.
      std::ifstream in(jpath, std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      in.close();
      content.resize(content.rfind('\n') + 1);
      journal.open(jpath, std::ios::binary | std::ios::trunc);
      journal << content;
    }
    if (!journal) throw IoError("cannot write sweep journal " + jpath.string());
    journal.flush();
  }

  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    if (!done.contains(k)) todo.push_back(k);
  }
  const std::size_t budget = std::min(todo.size(), options.max_new_points.value_or(todo.size()));

  std::vector<std::optional<SweepRow>> computed(plan.size());
  std::atomic<std::size_t> next{0};
  std::mutex journal_mutex;
  const std::size_t nt = plan.theta_grid.size();
  auto worker = [&] {
    for (std::size_t i = next++; i < budget; i = next++) {
      const std::size_t k = todo[i];
      const double rho = plan.rho_grid[k / nt];
      const SweepRow row = run_point(rho, plan.theta_at(k / nt, k % nt), plan.steps);
      computed[k] = row;
      if (journal.is_open()) {
        const std::lock_guard lock(journal_mutex);
        journal << k << ',' << format_double(row.rho) << ',' << format_double(row.theta) << ','
                << format_double(row.sp_final) << ',' << format_double(row.pr_final) << ','
                << (row.saturated ? 1 : 0) << '\n';
        journal.flush();
      }
    }
  };
  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(budget, 1)));
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (std::size_t k = 0; k < plan.size(); ++k) {
    if (computed[k]) {
      result.rows.push_back(*computed[k]);
    } else if (auto it = done.find(k); it != done.end()) {
      result.rows.push_back(it->second);
    } else {
      result.complete = false;
    }
  }
  if (options.timestamps) result.provenance.finished = utc_now();

  if (options.output && result.complete) {
    journal.close();
    save_sweep_csv(*options.output, result);
    save_sweep_sidecar(sidecar_path(*options.output), plan, result);
    std::filesystem::remove(journal_path(*options.output));
  }
  return result;
}

std::vector<std::pair<double, double>> locus_theta_c(const std::vector<double>& rho_grid) {
  std::vector<std::pair<double, double>> out;
  for (double rho : rho_grid) out.emplace_back(rho, theta_c(CoinParameter(rho)).value());
  return out;
}

std::filesystem::path journal_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".partial");
}

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".json");
}

}  // namespace qwalk
