#include "qwalk/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

using nlohmann::json;

struct CsvDocument {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  const std::string& get(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw IoError("missing header field '" + key + "'");
    return it->second;
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw IoError("missing column '" + name + "'");
  }
};

CsvDocument parse_csv(std::istream& in) {
  CsvDocument doc;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        doc.meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    auto fields = split_csv_line(line);
    if (!have_columns) {
      doc.columns = std::move(fields);
      have_columns = true;
      continue;
    }
    if (fields.size() != doc.columns.size()) {
      throw IoError("row has " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(doc.columns.size()));
    }
    doc.rows.push_back(std::move(fields));
  }
  if (!have_columns) throw IoError("CSV has no column header");
  return doc;
}

void write_banner(std::ostream& out, const std::string& kind, const Provenance& fields) {
  out << "# qwalk " << QWALK_VERSION << '\n' << "# kind=" << kind << '\n';
  for (const auto& [k, v] : fields) out << "# " << k << '=' << v << '\n';
}

void require_kind(const CsvDocument& doc, const std::string& kind) {
  if (doc.get("kind") != kind) {
    throw IoError("expected a '" + kind + "' file, found '" + doc.get("kind") + "'");
  }
}

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

json to_json(const ScalingFit& fit) {
  return {{"a", fit.a},
          {"b", fit.b},
          {"window", {{"t_min", fit.window.t_min}, {"t_max", fit.window.t_max}}},
          {"residual_rms", fit.residual_rms},
          {"mean_y", fit.mean_y},
          {"points", fit.points},
          {"log_term_resolved", fit.log_term_resolved}};
}

json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
std::optional<T> optional_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw IoError("not a number: '" + text + "'");
  return v;
}

long parse_long(const std::string& text) {
  long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw IoError("not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  const auto& m = series.metadata;
  write_banner(out, "timeseries",
               {{"origin", m.origin},
                {"rho", format_double(m.rho)},
                {"theta", format_double(m.theta)},
                {"steps", std::to_string(m.steps)},
                {"cadence", m.cadence},
                {"degenerate", m.degenerate ? "1" : "0"}});
  out << "t,sp,pr,x_m,delta,p_front\n";
  for (const Record& r : series.records) {
    out << r.t << ',' << format_double(r.sp) << ',' << format_double(r.pr) << ',' << optional_field(r.x_m) << ','
        << optional_field(r.delta) << ',' << optional_field(r.p_front) << '\n';
  }
}

TimeSeries read_series_csv(std::istream& in) {
  const CsvDocument doc = parse_csv(in);
  require_kind(doc, "timeseries");
  TimeSeries s;
  s.metadata.origin = doc.get("origin");
  s.metadata.rho = parse_double(doc.get("rho"));
  s.metadata.theta = parse_double(doc.get("theta"));
  s.metadata.steps = parse_long(doc.get("steps"));
  s.metadata.cadence = doc.get("cadence");
  s.metadata.degenerate = doc.get("degenerate") == "1";
  const std::size_t ct = doc.column("t"), csp = doc.column("sp"), cpr = doc.column("pr");
  const std::size_t cx = doc.column("x_m"), cd = doc.column("delta"), cp = doc.column("p_front");
  for (const auto& row : doc.rows) {
    Record r;
    r.t = parse_long(row[ct]);
    r.sp = parse_double(row[csp]);
    r.pr = parse_double(row[cpr]);
    if (!row[cx].empty()) r.x_m = parse_long(row[cx]);
    if (!row[cd].empty()) r.delta = parse_double(row[cd]);
    if (!row[cp].empty()) r.p_front = parse_double(row[cp]);
    s.records.push_back(r);
  }
  return s;
}

void write_series_json(std::ostream& out, const TimeSeries& series) {
  const auto& m = series.metadata;
  json records = json::array();
  for (const Record& r : series.records) {
    records.push_back({{"t", r.t},
                       {"sp", r.sp},
                       {"pr", r.pr},
                       {"x_m", r.x_m ? json(*r.x_m) : json(nullptr)},
                       {"delta", r.delta ? json(*r.delta) : json(nullptr)},
                       {"p_front", r.p_front ? json(*r.p_front) : json(nullptr)}});
  }
  const json doc = {{"version", QWALK_VERSION},
                    {"metadata",
                     {{"origin", m.origin},
                      {"rho", m.rho},
                      {"theta", m.theta},
                      {"steps", m.steps},
                      {"cadence", m.cadence},
                      {"degenerate", m.degenerate}}},
                    {"records", records}};
  out << doc.dump(1) << '\n';
}

TimeSeries read_series_json(std::istream& in) {
  const json doc = parse_json(in);
  try {
    TimeSeries s;
    const json& m = doc.at("metadata");
    s.metadata = {m.at("rho").get<double>(),       m.at("theta").get<double>(),    m.at("steps").get<long>(),
                  m.at("cadence").get<std::string>(), m.at("degenerate").get<bool>(), m.at("origin").get<std::string>()};
    for (const json& r : doc.at("records")) {
      s.records.push_back({r.at("t").get<long>(), r.at("sp").get<double>(), r.at("pr").get<double>(),
                           optional_json<long>(r.at("x_m")), optional_json<double>(r.at("delta")),
                           optional_json<double>(r.at("p_front"))});
    }
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad time series JSON: ") + e.what());
  }
}

void write_distribution_csv(std::ostream& out, const SpatialDistribution& dist, const Provenance& extra) {
  Provenance fields{{"t", std::to_string(dist.time())}};
  fields.insert(fields.end(), extra.begin(), extra.end());
  write_banner(out, "distribution", fields);
  out << "x,P_x\n";
  int x = dist.min_x();
  for (double p : dist.probabilities()) out << x++ << ',' << format_double(p) << '\n';
}

SpatialDistribution read_distribution_csv(std::istream& in) {
  const CsvDocument doc = parse_csv(in);
  require_kind(doc, "distribution");
  const std::size_t cx = doc.column("x"), cp = doc.column("P_x");
  std::vector<double> p;
  int min_x = 0;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const long x = parse_long(doc.rows[i][cx]);
    if (i == 0) min_x = static_cast<int>(x);
    if (x != min_x + static_cast<long>(i)) throw IoError("distribution sites must be contiguous");
    p.push_back(parse_double(doc.rows[i][cp]));
  }
  return SpatialDistribution(parse_long(doc.get("t")), min_x, std::move(p));
}

void write_fit_json(std::ostream& out, const ScalingFit& fit, const Provenance& extra) {
  json doc = {{"version", QWALK_VERSION}, {"kind", "log_correction_fit"}, {"fit", to_json(fit)}};
  for (const auto& [k, v] : extra) doc["provenance"][k] = v;
  out << doc.dump(1) << '\n';
}

ScalingFit read_fit_json(std::istream& in) {
  const json doc = parse_json(in);
  try {
    const json& f = doc.at("fit");
    ScalingFit fit;
    fit.a = f.at("a").get<double>();
    fit.b = f.at("b").get<double>();
    fit.window = {f.at("window").at("t_min").get<double>(), f.at("window").at("t_max").get<double>()};
    fit.residual_rms = f.at("residual_rms").get<double>();
    fit.mean_y = f.at("mean_y").get<double>();
    fit.points = f.at("points").get<std::size_t>();
    fit.log_term_resolved = f.at("log_term_resolved").get<bool>();
    return fit;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad fit JSON: ") + e.what());
  }
}

void write_fit_csv(std::ostream& out, const ScalingFit& fit, const Provenance& extra) {
  write_banner(out, "log_correction_fit", extra);
  out << "a,b,t_min,t_max,residual_rms,mean_y,points,log_term_resolved\n"
      << format_double(fit.a) << ',' << format_double(fit.b) << ',' << format_double(fit.window.t_min) << ','
      << format_double(fit.window.t_max) << ',' << format_double(fit.residual_rms) << ','
      << format_double(fit.mean_y) << ',' << fit.points << ',' << (fit.log_term_resolved ? 1 : 0) << '\n';
}

ScalingFit read_fit_csv(std::istream& in) {
  const CsvDocument doc = parse_csv(in);
  require_kind(doc, "log_correction_fit");
  if (doc.rows.size() != 1) throw IoError("fit file must hold exactly one row");
  const auto& row = doc.rows[0];
  ScalingFit fit;
  fit.a = parse_double(row[doc.column("a")]);
  fit.b = parse_double(row[doc.column("b")]);
  fit.window = {parse_double(row[doc.column("t_min")]), parse_double(row[doc.column("t_max")])};
  fit.residual_rms = parse_double(row[doc.column("residual_rms")]);
  fit.mean_y = parse_double(row[doc.column("mean_y")]);
  fit.points = static_cast<std::size_t>(parse_long(row[doc.column("points")]));
  fit.log_term_resolved = row[doc.column("log_term_resolved")] == "1";
  return fit;
}

void write_power_law_json(std::ostream& out, const PowerLawFit& fit, const Provenance& extra) {
  json doc = {{"version", QWALK_VERSION},
              {"kind", "power_law_fit"},
              {"fit",
               {{"exponent", fit.exponent},
                {"prefactor", fit.prefactor},
                {"residual_rms", fit.residual_rms},
                {"points", fit.points}}}};
  for (const auto& [k, v] : extra) doc["provenance"][k] = v;
  out << doc.dump(1) << '\n';
}

PowerLawFit read_power_law_json(std::istream& in) {
  const json doc = parse_json(in);
  try {
    const json& f = doc.at("fit");
    return {f.at("exponent").get<double>(), f.at("prefactor").get<double>(), f.at("residual_rms").get<double>(),
            f.at("points").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw IoError(std::string("bad fit JSON: ") + e.what());
  }
}

void write_collapse_csv(std::ostream& out, const CollapseResult& result, const Provenance& extra) {
  Provenance fields{{"quality", format_double(result.quality)}};
  fields.insert(fields.end(), extra.begin(), extra.end());
  write_banner(out, "collapse", fields);
  out << "eta";
  for (std::int64_t t : result.times_used) out << ",t" << t;
  out << '\n';
  for (std::size_t i = 0; i < result.scaling_variable_grid.size(); ++i) {
    out << format_double(result.scaling_variable_grid[i]);
    for (const auto& curve : result.rescaled_curves) out << ',' << format_double(curve[i]);
    out << '\n';
  }
}

CollapseResult read_collapse_csv(std::istream& in) {
  const CsvDocument doc = parse_csv(in);
  require_kind(doc, "collapse");
  if (doc.columns.empty() || doc.columns[0] != "eta") throw IoError("collapse file must start with an eta column");
  CollapseResult result;
  result.quality = parse_double(doc.get("quality"));
  for (std::size_t c = 1; c < doc.columns.size(); ++c) {
    if (doc.columns[c].empty() || doc.columns[c][0] != 't') throw IoError("bad collapse column " + doc.columns[c]);
    result.times_used.push_back(parse_long(doc.columns[c].substr(1)));
  }
  result.rescaled_curves.assign(result.times_used.size(), {});
  for (const auto& row : doc.rows) {
    result.scaling_variable_grid.push_back(parse_double(row[0]));
    for (std::size_t c = 1; c < row.size(); ++c) result.rescaled_curves[c - 1].push_back(parse_double(row[c]));
  }
  return result;
}

void write_surface_csv(std::ostream& out, const Surface& surface, const std::string& observable) {
  write_banner(out, "surface", {{"observable", observable}});
  out << "theta,t,value\n";
  for (const auto& [theta, by_time] : surface) {
    for (const auto& [t, v] : by_time) out << format_double(theta) << ',' << t << ',' << format_double(v) << '\n';
  }
}

Surface read_surface_csv(std::istream& in) {
  const CsvDocument doc = parse_csv(in);
  require_kind(doc, "surface");
  const std::size_t ctheta = doc.column("theta"), ct = doc.column("t"), cv = doc.column("value");
  Surface s;
  for (const auto& row : doc.rows) s[parse_double(row[ctheta])][parse_long(row[ct])] = parse_double(row[cv]);
  return s;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  write_banner(out, "sweep",
               {{"plan_hash", result.provenance.plan_hash}, {"steps", std::to_string(result.provenance.steps)}});
  out << "rho,theta,sp_final,pr_final,saturated\n";
  for (const SweepRow& r : result.rows) {
    out << format_double(r.rho) << ',' << format_double(r.theta) << ',' << format_double(r.sp_final) << ','
        << format_double(r.pr_final) << ',' << (r.saturated ? 1 : 0) << '\n';
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string banner;
  std::getline(in, banner);
  const std::string prefix = "# qwalk ";
  if (banner.rfind(prefix, 0) != 0) throw IoError("missing qwalk banner line");
  const CsvDocument doc = parse_csv(in);
  require_kind(doc, "sweep");
  SweepResult result;
  result.provenance.version = banner.substr(prefix.size());
  result.provenance.plan_hash = doc.get("plan_hash");
  result.provenance.steps = parse_long(doc.get("steps"));
  const std::size_t cr = doc.column("rho"), ct = doc.column("theta"), cs = doc.column("sp_final");
  const std::size_t cp = doc.column("pr_final"), csat = doc.column("saturated");
  for (const auto& row : doc.rows) {
    result.rows.push_back({parse_double(row[cr]), parse_double(row[ct]), parse_double(row[cs]),
                           parse_double(row[cp]), row[csat] == "1"});
  }
  return result;
}

void save_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::ostringstream out;
  write_sweep_csv(out, result);
  write_file_atomic(path, out.str());
}

void save_sweep_sidecar(const std::filesystem::path& path, const SweepPlan& plan, const SweepResult& result) {
  json provenance = {{"version", result.provenance.version}, {"plan_hash", result.provenance.plan_hash}};
  if (result.provenance.started) provenance["started"] = *result.provenance.started;
  if (result.provenance.finished) provenance["finished"] = *result.provenance.finished;
  const json doc = {{"plan",
                     {{"rho_grid", plan.rho_grid},
                      {"theta_grid", plan.theta_grid},
                      {"theta_mode", plan.theta_mode == ThetaMode::absolute ? "absolute" : "offset"},
                      {"steps", plan.steps}}},
                    {"rows", result.rows.size()},
                    {"provenance", provenance}};
  write_file_atomic(path, doc.dump(1) + "\n");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out.flush()) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace qwalk
