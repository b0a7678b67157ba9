// cli_io.hpp
// Run configuration (JSON file and/or flags), angle parsing, and the five
// commands behind the hybridtp executable. Each command renders its artifact
// to a string; write_artifact puts it on disk.

#pragma once

#include "hybridtp/cqt_protocol.hpp"
#include "hybridtp/qubit_circuit.hpp"
#include "hybridtp/wigner.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace hybridtp {

using ojson = nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitCutoff = 3, kExitIo = 4 };

// ---------------------------------------------------------------------------
// Angles and numbers

/// Accepts plain radians ("0.7", "-1e-3"), multiples of pi ("0.25pi", "pi",
/// "-3pi") and fractions of pi ("pi/4", "3pi/4", "-pi/2").
inline double parse_angle(const std::string& text) {
  static const std::regex num(R"(^\s*([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)\s*$)");
  static const std::regex pim(R"(^\s*([+-]?)((\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?\s*\*?\s*pi\s*(/\s*(\d+\.?\d*))?\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, num)) return std::stod(m[1]);
  if (std::regex_match(text, m, pim)) {
    double v = m[2].matched ? std::stod(m[2]) : 1.0;
    if (m[1] == "-") v = -v;
    if (m[6].matched) {
      const double den = std::stod(m[6]);
      if (den == 0.0) throw ConfigError("angle '" + text + "' divides by zero");
      v /= den;
    }
    return v * kPi;
  }
  throw ConfigError("cannot parse angle '" + text + "'");
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string key_context(const std::string& key) { return "config key '" + key + "'"; }

inline double as_number(const ojson& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(key_context(key) + ": expected a number");
}

inline double as_angle(const ojson& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_angle(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(key_context(key) + ": " + e.what());
    }
  }
  throw ConfigError(key_context(key) + ": expected an angle");
}

inline long as_integer(const ojson& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(key_context(key) + ": expected an integer");
  return static_cast<long>(d);
}

inline std::string as_string(const ojson& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  throw ConfigError(key_context(key) + ": expected a string");
}

/// JSON array, or a comma-separated string of angles. Empty entries are kept
/// out, so "" gives an empty list.
inline std::vector<double> as_angle_list(const ojson& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(as_angle(e, key));
    return out;
  }
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ','))
      if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(as_angle(ojson(item), key));
    return out;
  }
  if (v.is_number()) return {v.get<double>()};
  throw ConfigError(key_context(key) + ": expected a list of angles");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Configuration

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> n = {"fidelity-sweep", "wigner-grid", "protocol-run", "circuit-run",
                                             "resource-info"};
  return n;
}

inline const std::set<std::string>& allowed_keys(const std::string& command) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"fidelity-sweep",
       {"alpha", "cutoff", "points", "phis", "thetaBs", "thetaCs", "thetaD", "coupling", "offset", "output", "format"}},
      {"wigner-grid",
       {"alpha", "zeta", "resource", "c", "d", "thetaB", "thetaC", "thetaD", "cutoff", "qMin", "qMax", "pMin", "pMax",
        "gridPoints", "output", "format"}},
      {"protocol-run", {"alpha", "phi", "x", "y", "output", "format"}},
      {"circuit-run", {"phis", "shots", "seed", "output", "format"}},
      {"resource-info",
       {"alpha", "zeta", "resource", "encoding", "thetaB", "thetaC", "thetaD", "cutoff", "output", "format"}},
  };
  auto it = keys.find(command);
  if (it == keys.end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

struct RunConfig {
  std::string command;
  std::optional<double> alpha;
  std::optional<double> zeta;
  std::string resource = "coherent";  // or "squeezed"
  Encoding encoding = Encoding::Fock;
  double phi = 0.0;
  std::optional<double> x, y;
  double theta_b = 0.0, theta_c = 0.0, theta_d = 0.0;
  int cutoff = kDefaultCutoff;
  GridSpec grid;
  int points = 17;
  std::optional<std::vector<double>> phis, theta_bs, theta_cs;
  std::string coupling = "free";  // free | equal | offset
  double offset = kPi / 2;
  CBasis c = CBasis::Zero;
  int d = 0;
  long shots = 8192;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output = "-";
  std::string format;  // empty: the command's default

  double alpha_or(double fallback) const { return alpha ? *alpha : fallback; }
};

/// Merge `flags` over `file` (flags win) and validate against the command.
inline ojson merge_config(const ojson& file, const ojson& flags) {
  ojson out = file.is_null() ? ojson::object() : file;
  if (!out.is_object()) throw ConfigError("config file must hold a JSON object");
  for (auto it = flags.begin(); it != flags.end(); ++it) out[it.key()] = it.value();
  return out;
}

inline std::uint64_t parse_seed(const std::string& s, const std::string& origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &used, 10);
  } catch (const std::exception&) {
    throw ConfigError(origin + ": seed must be a non-negative integer");
  }
  if (used != s.size()) throw ConfigError(origin + ": seed must be a non-negative integer");
  return v;
}

inline RunConfig parse_config(const std::string& command, const ojson& j) {
  const auto& allowed = allowed_keys(command);
  RunConfig c;
  c.command = command;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown " + detail::key_context(it.key()) + " for " + command);

  auto get = [&](const char* k) -> const ojson* { return j.contains(k) ? &j.at(k) : nullptr; };
  using namespace detail;
  if (auto v = get("alpha")) {
    c.alpha = as_number(*v, "alpha");
    if (!(*c.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  }
  if (auto v = get("zeta")) {
    c.zeta = as_number(*v, "zeta");
    if (!(*c.zeta > 0.0 && *c.zeta < 1.0)) throw ConfigError("zeta must lie in (0, 1)");
  }
  if (auto v = get("resource")) {
    c.resource = as_string(*v, "resource");
    if (c.resource != "coherent" && c.resource != "squeezed") throw ConfigError("resource must be coherent or squeezed");
  }
  if (c.resource == "squeezed" && !c.zeta) c.zeta = 0.18;
  if (auto v = get("encoding")) {
    const auto e = as_string(*v, "encoding");
    if (e == "fock") c.encoding = Encoding::Fock;
    else if (e == "qubit") c.encoding = Encoding::Qubit;
    else throw ConfigError("encoding must be fock or qubit");
  }
  if (auto v = get("phi")) c.phi = as_angle(*v, "phi");
  if (auto v = get("x")) c.x = as_number(*v, "x");
  if (auto v = get("y")) c.y = as_number(*v, "y");
  if (c.x.has_value() != c.y.has_value()) throw ConfigError("x and y must be given together");
  if (auto v = get("thetaB")) c.theta_b = as_angle(*v, "thetaB");
  if (auto v = get("thetaC")) c.theta_c = as_angle(*v, "thetaC");
  if (auto v = get("thetaD")) c.theta_d = as_angle(*v, "thetaD");
  if (auto v = get("cutoff")) {
    const long n = as_integer(*v, "cutoff");
    if (n < 2 || n > 200) throw ConfigError("cutoff must lie in [2, 200]");
    c.cutoff = static_cast<int>(n);
  }
  if (auto v = get("qMin")) c.grid.q_min = as_number(*v, "qMin");
  if (auto v = get("qMax")) c.grid.q_max = as_number(*v, "qMax");
  if (auto v = get("pMin")) c.grid.p_min = as_number(*v, "pMin");
  if (auto v = get("pMax")) c.grid.p_max = as_number(*v, "pMax");
  if (auto v = get("gridPoints")) {
    const long n = as_integer(*v, "gridPoints");
    if (n < 2 || n > 2001) throw ConfigError("gridPoints must lie in [2, 2001]");
    c.grid.points = static_cast<int>(n);
  }
  try {
    c.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (auto v = get("points")) {
    const long n = as_integer(*v, "points");
    if (n < 0 || n == 1 || n > 1000) throw ConfigError("points must be 0 or lie in [2, 1000]");
    c.points = static_cast<int>(n);
  }
  if (auto v = get("phis")) c.phis = as_angle_list(*v, "phis");
  if (auto v = get("thetaBs")) c.theta_bs = as_angle_list(*v, "thetaBs");
  if (auto v = get("thetaCs")) c.theta_cs = as_angle_list(*v, "thetaCs");
  if (auto v = get("coupling")) {
    c.coupling = as_string(*v, "coupling");
    if (c.coupling != "free" && c.coupling != "equal" && c.coupling != "offset")
      throw ConfigError("coupling must be free, equal or offset");
  }
  if (auto v = get("offset")) c.offset = as_angle(*v, "offset");
  if (auto v = get("c")) {
    const auto s = as_string(*v, "c");
    if (s == "0") c.c = CBasis::Zero;
    else if (s == "1") c.c = CBasis::One;
    else if (s == "+" || s == "plus") c.c = CBasis::Plus;
    else if (s == "-" || s == "minus") c.c = CBasis::Minus;
    else throw ConfigError("c must be one of 0, 1, +, -");
  }
  if (auto v = get("d")) {
    const long n = as_integer(*v, "d");
    if (n != 0 && n != 1) throw ConfigError("d must be 0 or 1");
    c.d = static_cast<int>(n);
  }
  if (auto v = get("shots")) {
    c.shots = as_integer(*v, "shots");
    if (c.shots < 1 || c.shots > 100000000) throw ConfigError("shots must lie in [1, 1e8]");
  }
  if (auto v = get("seed")) {
    c.seed = v->is_number_unsigned() ? v->get<std::uint64_t>() : parse_seed(as_string(*v, "seed"), "seed");
    c.seed_given = true;
  }
  if (!c.seed_given && allowed.count("seed")) {
    if (const char* env = std::getenv("HYBRIDTP_SEED")) {
      c.seed = parse_seed(env, "HYBRIDTP_SEED");
      c.seed_given = true;
    }
  }
  if (auto v = get("output")) c.output = as_string(*v, "output");
  if (auto v = get("format")) {
    c.format = as_string(*v, "format");
    if (c.format != "json" && c.format != "csv") throw ConfigError("format must be json or csv");
  }
  return c;
}

inline ojson load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Artifacts

struct Artifact {
  std::string format;
  std::string body;
  std::optional<std::string> sidecar;  // JSON metadata next to a CSV body
};

inline std::string dump_json(const ojson& j) { return j.dump(2) + "\n"; }

inline ojson complex_json(cplx z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

inline ojson matrix_json(const Mat& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson r = ojson::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(complex_json(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ",";
    s += c;
  }
  return s + "\n";
}

inline std::string csv_row(const std::vector<double>& v) {
  std::string s;
  for (double d : v) {
    if (!s.empty()) s += ",";
    s += format_double(d);
  }
  return s + "\n";
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// "-" writes the body to stdout; the sidecar then goes nowhere.
inline void write_artifact(const Artifact& a, const std::string& output, std::ostream& stdout_stream) {
  if (output == "-") {
    stdout_stream << a.body;
    return;
  }
  write_file(output, a.body);
  if (a.sidecar) write_file(output + ".meta.json", *a.sidecar);
}

// ---------------------------------------------------------------------------
// Commands

struct SweepPoint {
  double phi, theta_b, theta_c;
};

inline std::vector<SweepPoint> sweep_points(const RunConfig& c) {
  const auto grid = c.points >= 2 ? default_phase_grid(c.points) : std::vector<double>{};
  const auto phis = c.phis ? *c.phis : grid;
  const auto tbs = c.theta_bs ? *c.theta_bs : grid;
  std::vector<SweepPoint> pts;
  for (double phi : phis)
    for (double tb : tbs) {
      if (c.coupling == "equal") {
        pts.push_back({phi, tb, tb});
      } else if (c.coupling == "offset") {
        pts.push_back({phi, tb, tb - c.offset});
      } else {
        const auto tcs = c.theta_cs ? *c.theta_cs : grid;
        for (double tc : tcs) pts.push_back({phi, tb, tc});
      }
    }
  return pts;
}

/// Columns phi, thetaB, thetaC, F_closed_first, F_numeric_first, F_closed_second.
inline Artifact cmd_fidelity_sweep(const RunConfig& c) {
  const auto pts = sweep_points(c);
  if (pts.empty()) throw ConfigError("fidelity-sweep: the phase grid is empty");
  const double alpha = c.alpha_or(0.05);
  const std::string fmt = c.format.empty() ? "csv" : c.format;
  std::string csv = "phi,thetaB,thetaC,F_closed_first,F_numeric_first,F_closed_second\n";
  ojson rows = ojson::array();
  for (const auto& p : pts) {
    const double fc = fidelity_first_order_closed(p.phi, p.theta_b, p.theta_c);
    const double fn = run_cqt_cv_first_order(p.phi, p.theta_b, p.theta_c, c.theta_d, alpha, c.cutoff).fidelity_numeric;
    const double f2 = fidelity_second_order_closed(p.phi, p.theta_b);
    if (fmt == "csv") csv += csv_row({p.phi, p.theta_b, p.theta_c, fc, fn, f2});
    else
      rows.push_back(ojson{{"phi", p.phi},
                           {"thetaB", p.theta_b},
                           {"thetaC", p.theta_c},
                           {"F_closed_first", fc},
                           {"F_numeric_first", fn},
                           {"F_closed_second", f2}});
  }
  if (fmt == "csv") return {fmt, csv, std::nullopt};
  ojson j{{"command", "fidelity-sweep"}, {"alpha", alpha}, {"cutoff", c.cutoff}, {"thetaD", c.theta_d},
          {"coupling", c.coupling}, {"rows", rows}};
  return {fmt, dump_json(j), std::nullopt};
}

inline MultiModeState config_resource(const RunConfig& c) {
  if (c.resource == "squeezed") {
    if (c.encoding != Encoding::Fock) throw ConfigError("the squeezed resource is Fock-encoded only");
    return build_squeezed_resource(*c.zeta, c.cutoff, c.theta_b, c.theta_c, c.theta_d);
  }
  ResourceSpec spec;
  spec.alpha = c.alpha_or(0.5);
  spec.encoding = c.encoding;
  spec.cutoff = c.cutoff;
  spec.theta_b = c.theta_b;
  spec.theta_c = c.theta_c;
  spec.theta_d = c.theta_d;
  return build_resource(spec);
}

inline ojson grid_json(const GridSpec& g) {
  return ojson{{"qMin", g.q_min}, {"qMax", g.q_max}, {"pMin", g.p_min}, {"pMax", g.p_max}, {"points", g.points}};
}

inline Artifact cmd_wigner_grid(const RunConfig& c) {
  const auto r = resource_projection_wigner(config_resource(c), c.c, c.d, c.grid);
  const std::string fmt = c.format.empty() ? "csv" : c.format;
  ojson meta{{"command", "wigner-grid"},
             {"resource", c.resource},
             {"alpha", c.resource == "coherent" ? ojson(c.alpha_or(0.5)) : ojson(nullptr)},
             {"zeta", c.zeta ? ojson(*c.zeta) : ojson(nullptr)},
             {"c", cbasis_name(c.c)},
             {"d", c.d},
             {"thetaB", c.theta_b},
             {"thetaC", c.theta_c},
             {"thetaD", c.theta_d},
             {"cutoff", c.cutoff},
             {"grid", grid_json(c.grid)},
             {"probability", r.probability},
             {"classification", state_class_name(r.classification.kind)},
             {"fidelity", r.classification.fidelity},
             {"amplitude", complex_json(r.classification.amplitude)},
             {"candidates",
              {{"coherent", r.classification.coherent_fidelity},
               {"EVEN cat", r.classification.even_fidelity},
               {"ODD cat", r.classification.odd_fidelity}}},
             {"integral", r.grid.integral()},
             {"min", r.grid.min()},
             {"max", r.grid.max()}};
  if (c.zeta) {
    const auto [e, o] = cat_amplitude_from_squeezing(*c.zeta);
    meta["catAmplitudesFromSqueezing"] = {{"even", e}, {"odd", o}};
  }
  if (fmt == "json") {
    ojson values = ojson::array();
    for (int i = 0; i < c.grid.points; ++i) {
      ojson row = ojson::array();
      for (int k = 0; k < c.grid.points; ++k) row.push_back(r.grid.values(i, k));
      values.push_back(row);
    }
    meta["values"] = values;
    return {fmt, dump_json(meta), std::nullopt};
  }
  std::string csv = "q,p,W\n";
  for (int i = 0; i < c.grid.points; ++i)
    for (int k = 0; k < c.grid.points; ++k) csv += csv_row({c.grid.q(i), c.grid.p(k), r.grid.values(i, k)});
  return {fmt, csv, dump_json(meta)};
}

inline Artifact cmd_protocol_run(const RunConfig& c) {
  const double alpha = c.alpha_or(0.5);
  const auto [x, y] = c.x ? std::pair<cplx, cplx>{*c.x, *c.y} : phase_coefficients(c.phi);
  const auto rows = run_cqt_dv(TargetSpec::coefficients(x, y, alpha, Encoding::Qubit));
  const std::string fmt = c.format.empty() ? "json" : c.format;
  double total = 0.0;
  for (const auto& r : rows) total += r.probability;
  if (fmt == "csv") {
    std::string csv = "row,bell,count,correction,probability,fidelity\n";
    int i = 1;
    for (const auto& r : rows)
      csv += csv_row({std::to_string(i++), bell_name(r.bell), std::to_string(r.count), correction_name(r.correction),
                      format_double(r.probability), format_double(r.fidelity)});
    return {fmt, csv, std::nullopt};
  }
  ojson out = ojson::array();
  int i = 1;
  for (const auto& r : rows)
    out.push_back(ojson{{"row", i++},
                        {"bell", bell_name(r.bell)},
                        {"count", r.count},
                        {"correction", correction_name(r.correction)},
                        {"probability", r.probability},
                        {"fidelity", r.fidelity}});
  ojson j{{"command", "protocol-run"},  {"alpha", alpha},  {"encoding", "qubit"}, {"x", complex_json(x)},
          {"y", complex_json(y)},        {"rows", out},    {"probabilitySum", total}};
  return {fmt, dump_json(j), std::nullopt};
}

inline Artifact cmd_circuit_run(const RunConfig& c) {
  const auto phis = c.phis ? *c.phis : tabulated_phases();
  if (phis.empty()) throw ConfigError("circuit-run: the phase list is empty");
  const auto rows = phase_table_experiment(phis, c.shots, c.seed);
  const std::string fmt = c.format.empty() ? "json" : c.format;
  if (fmt == "csv") {
    std::string csv = "phi,theta,p0_exact,p1_exact,p0,p1,rho01_re,rho01_im\n";
    for (const auto& r : rows)
      csv += csv_row({r.phi, r.theta, r.exact[0], r.exact[1], r.empirical[0], r.empirical[1], r.rho_c(0, 1).real(),
                      r.rho_c(0, 1).imag()});
    return {fmt, csv, std::nullopt};
  }
  ojson out = ojson::array();
  for (const auto& r : rows) {
    ojson counts = ojson::object();
    for (const auto& [k, v] : r.record.counts) counts[k] = v;
    out.push_back(ojson{{"phi", r.phi},
                        {"thetaB", r.theta},
                        {"thetaC", r.theta},
                        {"thetaD", 0.0},
                        {"exact", {r.exact[0], r.exact[1]}},
                        {"empirical", {r.empirical[0], r.empirical[1]}},
                        {"rhoC", matrix_json(r.rho_c)},
                        {"rho01Arg", std::arg(r.rho_c(0, 1))},
                        {"counts", counts}});
  }
  ojson j{{"command", "circuit-run"}, {"shots", c.shots}, {"seed", c.seed}, {"rows", out}};
  return {fmt, dump_json(j), std::nullopt};
}

inline Artifact cmd_resource_info(const RunConfig& c) {
  const auto r = config_resource(c);
  const std::string fmt = c.format.empty() ? "json" : c.format;
  ojson j{{"command", "resource-info"}, {"resource", c.resource}, {"encoding", encoding_name(c.encoding)}};
  if (c.resource == "squeezed") {
    j["zeta"] = *c.zeta;
    const auto [e, o] = cat_amplitude_from_squeezing(*c.zeta);
    j["catAmplitudesFromSqueezing"] = {{"even", e}, {"odd", o}};
  } else {
    const double a = c.alpha_or(0.5);
    j["alpha"] = a;
    j["x2"] = overlap_x2(a);
    j["Nplus"] = cat_norm(a, Parity::Even);
    j["Nminus"] = cat_norm(a, Parity::Odd);
    const double xxx = quadrature_expectation_xxx(r);
    j["XXX"] = {{"numeric", xxx},
                {"exact", quadrature_xxx_exact(a, c.theta_b, c.theta_c, c.theta_d)},
                {"printedLaw", quadrature_xxx_printed(a, c.theta_b, c.theta_c, c.theta_d)}};
  }
  j["thetaB"] = c.theta_b;
  j["thetaC"] = c.theta_c;
  j["thetaD"] = c.theta_d;
  j["cutoff"] = c.cutoff;
  j["modes"] = mode_string(r.modes());
  j["dimension"] = r.amps().size();
  j["norm"] = r.amps().norm();
  const auto rho_c = partial_trace(r, {Mode::C}).matrix();
  const auto rho_d = partial_trace(r, {Mode::D}).matrix();
  j["rhoC"] = matrix_json(rho_c);
  j["rhoD"] = matrix_json(rho_d);
  if (fmt == "csv") {
    std::string csv = "key,value\n";
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.value().is_primitive()) csv += it.key() + "," + (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) + "\n";
    return {fmt, csv, std::nullopt};
  }
  return {fmt, dump_json(j), std::nullopt};
}

inline Artifact run_command(const RunConfig& c) {
  if (c.command == "fidelity-sweep") return cmd_fidelity_sweep(c);
  if (c.command == "wigner-grid") return cmd_wigner_grid(c);
  if (c.command == "protocol-run") return cmd_protocol_run(c);
  if (c.command == "circuit-run") return cmd_circuit_run(c);
  if (c.command == "resource-info") return cmd_resource_info(c);
  throw ConfigError("unknown command '" + c.command + "'");
}

/// Map an exception from a run to the documented exit code.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InsufficientCutoff*>(&e)) return kExitCutoff;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) return kExitConfig;
  return 1;
}

}  // namespace hybridtp
