#include "swelab/cli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "swelab/params.hpp"
#include "swelab/solvability.hpp"

namespace swelab::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Shortest representation that round-trips.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw std::runtime_error("write to " + path.string() + " failed");
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json timing(double seconds) { return {{"runtime_seconds", seconds}, {"finished_at", utc_timestamp()}}; }

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

json coords_json(const bounds::Coordinates& c) {
  json j = json::object();
  for (const auto& [k, v] : c) j[k] = v;
  return j;
}

json limit(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- raw field dumps -------------------------------------------------------

void write_le_f64(std::ofstream& os, const double* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto bits = std::bit_cast<std::uint64_t>(data[i]);
      char b[8];
      for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
      os.write(b, 8);
    }
  }
}

bounds::BatchSink field_dumper(const fs::path& dir) {
  return [dir](std::size_t cell, const bounds::Coordinates& coords, const field::PointSet& points,
               const field::SampleBatch& batch) {
    fs::create_directories(dir);
    const std::string stem = "cell" + std::to_string(cell);
    const std::size_t n_reps = batch.n_reps();
    const auto n_points = static_cast<std::size_t>(batch.values.cols());
    std::ofstream os(dir / (stem + ".f64"), std::ios::binary);
    // values is column-major; emit one replicate (row) at a time.
    std::vector<double> row(n_points);
    for (std::size_t r = 0; r < n_reps; ++r) {
      for (std::size_t j = 0; j < n_points; ++j) {
        row[j] = batch.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      }
      write_le_f64(os, row.data(), n_points);
    }
    if (!os) throw std::runtime_error("failed to write field dump");
    json pts = json::array();
    for (const auto& [it, ix] : points.index) pts.push_back({it, ix});
    write_json(dir / (stem + ".json"), {{"data_file", stem + ".f64"},
                                        {"dtype", "float64"},
                                        {"byte_order", "little"},
                                        {"layout", "row-major [n_reps][n_points]"},
                                        {"n_reps", n_reps},
                                        {"n_points", n_points},
                                        {"seed", batch.seed},
                                        {"coords", coords_json(coords)},
                                        {"t_values", points.grid.t_values},
                                        {"x_values", points.grid.x_values},
                                        {"points", pts}});
  };
}

// ---- commands ----------------------------------------------------------------

struct RunConfig {
  std::string command;
  fs::path out_dir;
  std::uint64_t seed = bounds::kDefaultSeed;
  bool emit_svg = false;
  bool dump_fields = false;
};

struct Context {
  RunConfig run;
  std::ostream& out;
  std::ostream& err;

  [[nodiscard]] fs::path output(const std::string& explicit_path, const std::string& fallback) const {
    return explicit_path.empty() ? run.out_dir / fallback : fs::path(explicit_path);
  }
};

// Parse-time failures of a command body are usage errors; everything the
// numerical layer throws afterwards is classified by run().
struct SolvabilityArgs {
  std::size_t d = 1;
  bool d_given = false;
  double h0 = 0.5;
  std::string h;
  std::optional<double> habs;
  bool numeric = false;
  double t = 1.0;
  double lambda_max = 1024.0;
  std::size_t n_cutoffs = 6;
  double band = 0.05;
  std::string out;
};

int cmd_solvability(const Context& ctx, const SolvabilityArgs& a) {
  std::vector<double> h;
  std::size_t d = a.d;
  if (!a.h.empty()) {
    if (a.habs) throw UsageError("give either --h or --habs, not both");
    h = parse_list(a.h);
    if (a.d_given && h.size() != d) throw UsageError("--h must list exactly d exponents");
    d = h.size();
  } else if (a.habs) {
    if (d == 0) throw UsageError("--d must be >= 1");
    h.assign(d, *a.habs / static_cast<double>(d));
  } else {
    throw UsageError("one of --h or --habs is required");
  }
  const HurstParams params(a.h0, h);
  const auto verdict = solvability::condition_closed_form(params);
  ctx.out << "closed-form: " << (verdict.solvable ? "solvable" : "not solvable") << " (regime "
          << solvability::to_string(verdict.regime) << ", margin " << num(verdict.margin) << ")\n";
  json doc{{"d", d},
           {"h0", a.h0},
           {"h", h},
           {"closed", {{"solvable", verdict.solvable}, {"margin", verdict.margin},
                       {"regime", solvability::to_string(verdict.regime)}}}};
  int code = kPass;
  if (a.numeric) {
    const auto fit = solvability::classify_numeric(params, a.t, a.lambda_max, a.n_cutoffs);
    const bool near = std::abs(verdict.margin) < a.band;
    const bool decisive = fit.verdict != solvability::NumericVerdict::kIndeterminate;
    const bool agrees = decisive && fit.classified_convergent == verdict.solvable;
    std::string flag = near ? "near-critical" : (agrees ? "ok" : (decisive ? "mismatch" : "indeterminate"));
    ctx.out << "numeric: " << solvability::to_string(fit.verdict) << " (increment slope "
            << num(fit.fitted_exponent) << ", R^2 " << num(fit.r_squared) << ") -> " << flag << "\n";
    doc["numeric"] = {{"verdict", solvability::to_string(fit.verdict)},
                      {"fitted_exponent", limit(fit.fitted_exponent)},
                      {"r_squared", fit.r_squared},
                      {"lambda_grid", fit.lambda_grid},
                      {"partial_integrals", fit.partial_integrals},
                      {"negative_samples", fit.negative_samples},
                      {"t", a.t},
                      {"agrees", agrees},
                      {"flag", flag}};
    if (near || !decisive) {
      code = kIndeterminate;
    } else if (!agrees) {
      code = kFailure;
    }
  }
  write_json(ctx.output(a.out, "solvability.json"), doc);
  return code;
}

struct G1Args {
  double h0 = 0.7;
  double rho_min = 0.0;
  double rho_max = 1000.0;
  std::size_t n_points = 1001;
  double fit_from = 0.2;
  std::string out;
};

int cmd_g1_curve(const Context& ctx, const G1Args& a) {
  if (a.n_points < 2) throw UsageError("--n-points must be >= 2");
  if (!(a.rho_max > a.rho_min) || a.rho_min < 0.0) throw UsageError("need 0 <= rho-min < rho-max");
  if (!(a.fit_from >= 0.0 && a.fit_from < 1.0)) throw UsageError("--fit-from must lie in [0, 1)");
  std::vector<double> rho(a.n_points);
  const double step = (a.rho_max - a.rho_min) / static_cast<double>(a.n_points - 1);
  for (std::size_t i = 0; i < a.n_points; ++i) rho[i] = a.rho_min + step * static_cast<double>(i);
  rho.back() = a.rho_max;
  const auto curve = solvability::g_curve(a.h0, rho);

  std::ostringstream csv;
  csv << "# schema=" << kCsvSchema << "\nrho,g1\n";
  std::vector<double> g1v;
  for (const auto& v : curve) {
    csv << num(v.rho) << "," << num(v.g1) << "\n";
    g1v.push_back(v.g1);
  }
  const fs::path csv_path = ctx.output(a.out, "g1_curve.csv");
  write_file(csv_path, csv.str());

  const double window_lo = a.rho_min + a.fit_from * (a.rho_max - a.rho_min);
  std::vector<double> fx, fy;
  for (const auto& v : curve) {
    if (v.rho >= window_lo) {
      fx.push_back(v.rho);
      fy.push_back(v.g1);
    }
  }
  json sidecar{{"h0", a.h0},
               {"rho_min", a.rho_min},
               {"rho_max", a.rho_max},
               {"n_points", a.n_points},
               {"g1_min", *std::min_element(g1v.begin(), g1v.end())},
               {"g1_max", *std::max_element(g1v.begin(), g1v.end())},
               {"csv", csv_path.filename().string()}};
  if (fx.size() >= 3) {
    const auto fit = stats::fit_line(fx, fy);
    sidecar["fit"] = {{"window", {window_lo, a.rho_max}}, {"slope", fit.slope}, {"intercept", fit.intercept},
                      {"r2", fit.r_squared}, {"n", fit.n}};
    ctx.out << "g1 fit on [" << num(window_lo) << ", " << num(a.rho_max) << "]: slope " << num(fit.slope)
            << ", R^2 " << num(fit.r_squared) << "\n";
  } else {
    sidecar["fit"] = nullptr;
  }
  fs::path side = csv_path;
  side.replace_extension(".json");
  write_json(side, sidecar);
  if (ctx.run.emit_svg) {
    fs::path svg = csv_path;
    svg.replace_extension(".svg");
    std::ostringstream title;
    title << "g1(rho), h0 = " << num(a.h0);
    write_file(svg, svg_line_plot(rho, g1v, title.str(), "rho", "g1"));
  }
  ctx.out << "wrote " << curve.size() << " rows to " << csv_path.string() << "\n";
  return kPass;
}

struct PhaseArgs {
  std::size_t d = 1;
  std::string h0_grid;
  std::string habs_grid;
  double lambda_max = 1024.0;
  std::size_t n_cutoffs = 6;
  double band = 0.05;
  double t = 1.0;
  std::string out;
};

int cmd_phase_diagram(const Context& ctx, const PhaseArgs& a) {
  const auto h0 = parse_grid(a.h0_grid);
  const auto habs = parse_grid(a.habs_grid);
  if (a.d == 0) throw UsageError("--d must be >= 1");
  solvability::PhaseScanConfig cfg;
  cfg.t = a.t;
  cfg.lambda_max = a.lambda_max;
  cfg.n_cutoffs = a.n_cutoffs;
  cfg.exclusion_band = a.band;
  const auto rows = solvability::phase_diagram_scan(a.d, h0, habs, cfg);
  std::ostringstream csv;
  csv << "# schema=" << kCsvSchema << "\nh0,habs,closed,numeric,margin,flag\n";
  std::size_t mismatches = 0, near = 0;
  for (const auto& r : rows) {
    csv << num(r.h0) << "," << num(r.habs) << "," << (r.closed.solvable ? "solvable" : "not-solvable") << ","
        << solvability::to_string(r.numeric) << "," << num(r.closed.margin) << "," << r.flag() << "\n";
    if (r.flag() == "mismatch") ++mismatches;
    if (r.near_critical) ++near;
  }
  const fs::path path = ctx.output(a.out, "phase_diagram.csv");
  write_file(path, csv.str());
  ctx.out << rows.size() << " cells, " << near << " near-critical, " << mismatches << " mismatches -> "
          << path.string() << "\n";
  return mismatches == 0 ? kPass : kFailure;
}

struct ExperimentArgs {
  double H = 0.3;
  std::string T_list = "0.5,1,2,4";
  std::string L_list = "1,4,16,64";
  double lscan_T = 1.0;
  double t = 1.0;
  double L = 4.0;
  std::string h_list = "1/16,1/32,1/64,1/128";
  std::string t_list = "1,2";
  std::string tau_list = "1/16,1/32,1/64,1/128";
  std::size_t n_reps = 0;  // 0: harness default
  std::size_t x_per_tmin = 16;
  std::size_t time_levels = 8;
  std::string out;
};

int finish_experiment(const Context& ctx, const bounds::ExperimentReport& rep, const std::string& out) {
  json doc = report_to_json(rep);
  doc["command"] = ctx.run.command;
  const fs::path path = ctx.output(out, rep.id + ".json");
  write_json(path, doc);
  for (const auto& f : rep.fits) {
    ctx.out << f.name << ": slope " << num(f.fit.slope) << " [" << num(f.ci_lo) << ", " << num(f.ci_hi)
            << "], R^2 " << num(f.fit.r_squared) << (f.pass ? " ok" : " FAIL") << "\n";
  }
  for (const auto& c : rep.checks) {
    if (!c.pass) ctx.out << "check " << c.name << " failed: " << num(c.value) << "\n";
  }
  ctx.out << rep.id << ": " << (rep.pass ? "pass" : "FAIL") << " -> " << path.string() << "\n";
  return rep.pass ? kPass : kFailure;
}

// Failures inside a harness (grid cap, factorization) are runtime failures
// even when the harness reports them as precondition violations.
struct HarnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
bounds::ExperimentReport run_harness(F&& f) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    throw HarnessError(e.what());
  }
}

void require_reps(std::size_t n) {
  if (n == 1) throw UsageError("--n-reps must be >= 2: the standard error is undefined for one replicate");
}

std::vector<double> positive_list(const std::string& text, const char* flag) {
  auto v = parse_list(text);
  for (double x : v) {
    if (!(x > 0.0)) throw UsageError(std::string(flag) + " entries must be > 0");
  }
  return v;
}

bounds::BatchSink maybe_dumper(const Context& ctx, const std::string& id) {
  if (!ctx.run.dump_fields) return {};
  return field_dumper(ctx.run.out_dir / (id + "_fields"));
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw UsageError("empty number");
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double p = parse_number(s.substr(0, slash));
    const double q = parse_number(s.substr(slash + 1));
    if (q == 0.0) throw UsageError("zero denominator in '" + s + "'");
    return p / q;
  }
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto r = std::from_chars(first, s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("not a number: '" + s + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_number(part));
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.find(':') == std::string::npos) return parse_list(spec);
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError("grid spec must be start:stop:step, got '" + spec + "'");
  const double start = parse_number(parts[0]);
  const double stop = parse_number(parts[1]);
  const double step = parse_number(parts[2]);
  if (!(step > 0.0)) throw UsageError("grid step must be > 0");
  std::vector<double> out;
  if (stop < start) return out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw UsageError("grid has too many points");
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::round((start + step * static_cast<double>(i)) * 1e12) / 1e12);
  }
  return out;
}

CsvTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("empty CSV");
  line = trim(line);
  const std::string prefix = "# schema=";
  if (line.rfind(prefix, 0) != 0) throw UsageError("CSV lacks a '# schema=N' first line");
  if (line.substr(prefix.size()) != std::to_string(kCsvSchema)) {
    throw UsageError("unsupported CSV schema '" + line.substr(prefix.size()) + "'");
  }
  CsvTable t;
  if (!std::getline(in, line)) throw UsageError("CSV lacks a header row");
  t.header = split(trim(line), ',');
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto row = split(line, ',');
    if (row.size() != t.header.size()) throw UsageError("ragged CSV row: " + line);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string svg_line_plot(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                          const std::string& x_label, const std::string& y_label) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("svg_line_plot needs >= 2 matching points");
  constexpr double W = 720, Hgt = 440, ml = 80, mr = 20, mt = 40, mb = 60;
  const auto [xlo_it, xhi_it] = std::minmax_element(x.begin(), x.end());
  const auto [ylo_it, yhi_it] = std::minmax_element(y.begin(), y.end());
  double xlo = *xlo_it, xhi = *xhi_it, ylo = *ylo_it, yhi = *yhi_it;
  if (xhi == xlo) xhi = xlo + 1.0;
  if (yhi == ylo) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  const double pw = W - ml - mr, ph = Hgt - mt - mb;
  auto px = [&](double v) { return ml + (v - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double v) { return mt + (yhi - v) / (yhi - ylo) * ph; };
  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title) << "</text>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xlo + (xhi - xlo) * k / 4.0;
    const double fy = ylo + (yhi - ylo) * k / 4.0;
    s << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">" << fx << "</text>\n";
    s << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << fy << "</text>\n";
  }
  s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << Hgt - 16 << "\" text-anchor=\"middle\">" << svg_escape(x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
    << ")\">" << svg_escape(y_label) << "</text>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) s << px(x[i]) << "," << py(y[i]) << (i + 1 < x.size() ? " " : "");
  s << "\"/>\n</svg>\n";
  return s.str();
}

json report_to_json(const bounds::ExperimentReport& r) {
  json params = coords_json(r.params);
  json estimates = json::array();
  for (const auto& e : r.estimates) {
    json j = coords_json(e.coords);
    j["mean"] = e.sup.mean;
    j["stderr"] = e.sup.stderr_;
    j["n"] = e.sup.n_reps;
    j["abs_mean"] = e.sup_abs.mean;
    j["abs_stderr"] = e.sup_abs.stderr_;
    j["statistic"] = field::to_string(e.sup.statistic);
    j["n_points"] = e.n_points;
    j["relative_jitter"] = e.relative_jitter;
    j["seed"] = e.sup.seed;
    estimates.push_back(std::move(j));
  }
  json fits = json::array();
  for (const auto& f : r.fits) {
    fits.push_back({{"name", f.name},
                    {"x", f.x_label},
                    {"y", f.y_label},
                    {"slope", f.fit.slope},
                    {"intercept", f.fit.intercept},
                    {"ci", {f.ci_lo, f.ci_hi}},
                    {"ci_level", 0.95},
                    {"r2", f.fit.r_squared},
                    {"n", f.fit.n},
                    {"slope_range", {limit(f.slope_lo), limit(f.slope_hi)}},
                    {"r2_min", limit(f.r2_min)},
                    {"pass", f.pass}});
  }
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"range", {limit(c.lo), limit(c.hi)}}, {"pass", c.pass}});
  }
  return {{"schema", 1},
          {"experiment", r.id},
          {"params", params},
          {"seed", r.seed},
          {"n_reps", r.n_reps},
          {"grid_rule", r.grid_rule},
          {"estimates", estimates},
          {"fits", fits},
          {"checks", checks},
          {"pass", r.pass},
          {"timing", timing(r.runtime_seconds)}};
}

json without_timing(json doc) {
  if (doc.is_object()) doc.erase("timing");
  return doc;
}

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return (env != nullptr && *env != '\0') ? fs::path(env) : fs::path("swelab_out");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for the stochastic wave equation with fractional noise", "swelab"};
  // -h is left free: the spatial exponents are given with --h.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  std::string out_dir;
  app.add_option("--out-dir", out_dir, std::string("output directory (default $") + kOutDirEnv + " or ./swelab_out)");
  app.add_option("--seed", rc.seed, "64-bit seed for Monte Carlo commands")->capture_default_str();
  app.add_flag("--svg", rc.emit_svg, "also write SVG plots where available");
  app.add_flag("--dump-fields", rc.dump_fields, "write sampled fields as little-endian f64 with JSON sidecars");

  std::function<int(const Context&)> action;

  SolvabilityArgs sa;
  auto* s = app.add_subcommand("solvability", "closed-form (and optional numeric) existence verdict");
  s->add_option("--d", sa.d, "spatial dimension")->check(CLI::Range(1, 16));
  s->add_option("--h0", sa.h0, "temporal Hurst parameter in [1/2, 1]")->required();
  s->add_option("--h", sa.h, "comma-separated spatial Hurst parameters");
  s->add_option("--habs", sa.habs, "sum |H| of equal spatial parameters");
  s->add_flag("--numeric", sa.numeric, "also classify the spectral tail numerically");
  s->add_option("--t", sa.t, "time horizon for the numeric check")->capture_default_str();
  s->add_option("--lambda-max", sa.lambda_max)->capture_default_str();
  s->add_option("--n-cutoffs", sa.n_cutoffs)->capture_default_str();
  s->add_option("--band", sa.band, "near-critical exclusion band")->capture_default_str();
  s->add_option("--out", sa.out, "JSON output path");
  s->callback([&] {
    sa.d_given = s->count("--d") > 0;
    action = [&](const Context& c) { return cmd_solvability(c, sa); };
  });

  G1Args ga;
  auto* g = app.add_subcommand("g1-curve", "tabulate g1(rho) on a uniform grid");
  g->add_option("--h0", ga.h0)->required();
  g->add_option("--rho-min", ga.rho_min)->capture_default_str();
  g->add_option("--rho-max", ga.rho_max)->capture_default_str();
  g->add_option("--n-points", ga.n_points)->capture_default_str();
  g->add_option("--fit-from", ga.fit_from, "fit window starts at this fraction of the range")->capture_default_str();
  g->add_option("--out", ga.out, "CSV output path");
  g->callback([&] { action = [&](const Context& c) { return cmd_g1_curve(c, ga); }; });

  PhaseArgs pa;
  auto* p = app.add_subcommand("phase-diagram", "closed-form vs numeric verdicts over a parameter grid");
  p->add_option("--d", pa.d)->capture_default_str();
  p->add_option("--h0-grid", pa.h0_grid, "start:stop:step")->required();
  p->add_option("--habs-grid", pa.habs_grid, "start:stop:step")->required();
  p->add_option("--lambda-max", pa.lambda_max)->capture_default_str();
  p->add_option("--n-cutoffs", pa.n_cutoffs)->capture_default_str();
  p->add_option("--band", pa.band)->capture_default_str();
  p->add_option("--t", pa.t)->capture_default_str();
  p->add_option("--out", pa.out, "CSV output path");
  p->callback([&] { action = [&](const Context& c) { return cmd_phase_diagram(c, pa); }; });

  ExperimentArgs ea;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--H", ea.H, "spatial Hurst parameter")->capture_default_str();
    sub->add_option("--n-reps", ea.n_reps, "Monte Carlo replicates per cell");
    sub->add_option("--x-per-tmin", ea.x_per_tmin, "grid rule: dx <= t_min / this")->capture_default_str();
    sub->add_option("--out", ea.out, "JSON report path");
  };
  auto* sg = app.add_subcommand("sup-growth", "E[sup u] growth in T and L");
  add_common(sg);
  sg->add_option("--T-list", ea.T_list)->capture_default_str();
  sg->add_option("--L-list", ea.L_list)->capture_default_str();
  sg->add_option("--lscan-T", ea.lscan_T)->capture_default_str();
  sg->add_option("--time-levels", ea.time_levels)->capture_default_str();
  sg->callback([&] {
    action = [&](const Context& c) {
      bounds::GrowthConfig cfg;
      require_reps(ea.n_reps);
      require_spatial_hurst(ea.H);
      cfg.H = ea.H;
      cfg.T_list = positive_list(ea.T_list, "--T-list");
      cfg.L_list = positive_list(ea.L_list, "--L-list");
      cfg.lscan_T = ea.lscan_T;
      cfg.rule = {ea.x_per_tmin, ea.time_levels};
      if (ea.n_reps != 0) cfg.n_reps = ea.n_reps;
      cfg.seed = c.run.seed;
      cfg.sink = maybe_dumper(c, "sup_growth");
      return finish_experiment(c, run_harness([&] { return bounds::sup_growth_experiment(cfg); }), ea.out);
    };
  });
  auto* hs = app.add_subcommand("holder-space", "spatial increment suprema against h");
  add_common(hs);
  hs->add_option("--t", ea.t)->capture_default_str();
  hs->add_option("--L", ea.L)->capture_default_str();
  hs->add_option("--h-list", ea.h_list)->capture_default_str();
  hs->callback([&] {
    action = [&](const Context& c) {
      bounds::HolderSpaceConfig cfg;
      require_reps(ea.n_reps);
      require_spatial_hurst(ea.H);
      cfg.H = ea.H;
      cfg.t = ea.t;
      cfg.L = ea.L;
      cfg.h_list = positive_list(ea.h_list, "--h-list");
      cfg.rule.x_per_tmin = ea.x_per_tmin;
      if (ea.n_reps != 0) cfg.n_reps = ea.n_reps;
      cfg.seed = c.run.seed;
      cfg.sink = maybe_dumper(c, "holder_space");
      return finish_experiment(c, run_harness([&] { return bounds::holder_space_experiment(cfg); }), ea.out);
    };
  });
  auto* ht = app.add_subcommand("holder-time", "temporal increment suprema against tau");
  add_common(ht);
  ht->add_option("--t-list", ea.t_list, "first value is fitted; the rest are ratio-checked")->capture_default_str();
  ht->add_option("--L", ea.L, "spatial half-width (default 2)");
  ht->add_option("--tau-list", ea.tau_list)->capture_default_str();
  ht->callback([&] {
    action = [&](const Context& c) {
      bounds::HolderTimeConfig cfg;
      require_reps(ea.n_reps);
      require_spatial_hurst(ea.H);
      cfg.H = ea.H;
      cfg.t_values = positive_list(ea.t_list, "--t-list");
      if (ht->count("--L") > 0) cfg.L = ea.L;
      cfg.tau_list = positive_list(ea.tau_list, "--tau-list");
      cfg.rule.x_per_tmin = ea.x_per_tmin;
      if (ea.n_reps != 0) cfg.n_reps = ea.n_reps;
      cfg.seed = c.run.seed;
      cfg.sink = maybe_dumper(c, "holder_time");
      return finish_experiment(c, run_harness([&] { return bounds::holder_time_experiment(cfg); }), ea.out);
    };
  });

  double mr_H = 0.3;
  std::string mr_t = "0.25,0.5,1,2,4", mr_s, mr_dx = "0:8:0.1", mr_out;
  bool mr_refine = false;
  double mr_tol = 0.05;
  auto* mr = app.add_subcommand("metric-ratio", "extremes of d1 / D1H over a structured grid");
  mr->add_option("--H", mr_H)->capture_default_str();
  mr->add_option("--t-set", mr_t)->capture_default_str();
  mr->add_option("--s-set", mr_s, "defaults to the t set");
  mr->add_option("--dx-grid", mr_dx, "start:stop:step or list")->capture_default_str();
  mr->add_flag("--refine", mr_refine, "repeat on the 2x refined grid and check stability");
  mr->add_option("--tol", mr_tol, "allowed relative change under refinement")->capture_default_str();
  mr->add_option("--out", mr_out, "JSON output path");
  mr->callback([&] {
    action = [&](const Context& c) {
      const auto ts = parse_list(mr_t);
      const auto ss = mr_s.empty() ? ts : parse_list(mr_s);
      const auto dxs = parse_grid(mr_dx);
      const auto start = std::chrono::steady_clock::now();
      auto scan_json = [&](const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& x,
                           bounds::RatioScanResult& res) {
        res = bounds::metric_ratio_scan(a, b, x, mr_H);
        if (res.degenerate_skipped > 0) {
          c.err << "warning: skipped " << res.degenerate_skipped << " degenerate pair(s)\n";
        }
        auto loc = [](const bounds::RatioLocation& l) { return json{{"t", l.t}, {"s", l.s}, {"dx", l.dx}}; };
        return json{{"grid", {{"t_set", a}, {"s_set", b}, {"dx_set", x}}},
                    {"r_min", res.r_min},
                    {"r_max", res.r_max},
                    {"argmin", loc(res.argmin)},
                    {"argmax", loc(res.argmax)},
                    {"evaluated", res.evaluated},
                    {"degenerate_skipped", res.degenerate_skipped},
                    {"roundoff_flags", res.roundoff_flags}};
      };
      bounds::RatioScanResult base;
      json doc = scan_json(ts, ss, dxs, base);
      doc["H"] = mr_H;
      c.out << "d1/D1H in [" << num(base.r_min) << ", " << num(base.r_max) << "] over " << base.evaluated
            << " pairs\n";
      int code = kPass;
      if (mr_refine) {
        bounds::RatioScanResult fine;
        doc["refined"] = scan_json(bounds::refine_geometric(ts), bounds::refine_geometric(ss),
                                   bounds::refine_arithmetic(dxs), fine);
        const double cmin = std::abs(fine.r_min / base.r_min - 1.0);
        const double cmax = std::abs(fine.r_max / base.r_max - 1.0);
        const bool stable = cmin < mr_tol && cmax < mr_tol;
        doc["relative_change"] = {{"r_min", cmin}, {"r_max", cmax}, {"tol", mr_tol}};
        doc["pass"] = stable;
        c.out << "refined: [" << num(fine.r_min) << ", " << num(fine.r_max) << "], changes " << num(cmin) << ", "
              << num(cmax) << (stable ? " ok" : " FAIL") << "\n";
        if (!stable) code = kFailure;
      }
      doc["timing"] = timing(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      write_json(c.output(mr_out, "metric_ratio.json"), doc);
      return code;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  rc.command = app.get_subcommands().front()->get_name();
  rc.out_dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
  const Context ctx{rc, out, err};
  try {
    return action(ctx);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace swelab::cli
