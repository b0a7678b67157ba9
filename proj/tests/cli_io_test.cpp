#include "hybridtp/cli_io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using namespace hybridtp;
namespace fs = std::filesystem;

namespace {

RunConfig cfg(const std::string& command, ojson j = ojson::object()) { return parse_config(command, j); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& body) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(body);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    std::vector<double> r;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(r);
  }
  return rows;
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("hybridtp_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + HYBRIDTP_CLI_PATH + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CliAngles, AcceptedForms) {
  EXPECT_DOUBLE_EQ(parse_angle("0.7"), 0.7);
  EXPECT_DOUBLE_EQ(parse_angle("-1e-3"), -1e-3);
  EXPECT_DOUBLE_EQ(parse_angle("0.25pi"), 0.25 * kPi);
  EXPECT_DOUBLE_EQ(parse_angle("pi"), kPi);
  EXPECT_DOUBLE_EQ(parse_angle("-pi/2"), -kPi / 2);
  EXPECT_DOUBLE_EQ(parse_angle("3pi/4"), 0.75 * kPi);
  EXPECT_DOUBLE_EQ(parse_angle(" 2*pi "), 2 * kPi);
}

TEST(CliAngles, RejectsGarbage) {
  for (const char* s : {"", "abc", "pi/0", "1.2.3", "pipi", "0.5 rad"}) EXPECT_THROW(parse_angle(s), ConfigError) << s;
}

TEST(CliConfig, UnknownKeysRejected) {
  EXPECT_THROW(cfg("protocol-run", {{"shots", 10}}), ConfigError);
  EXPECT_THROW(cfg("circuit-run", {{"bogus", 1}}), ConfigError);
  EXPECT_THROW(cfg("no-such-command"), ConfigError);
}

TEST(CliConfig, RangeChecks) {
  EXPECT_THROW(cfg("protocol-run", {{"alpha", -1}}), ConfigError);
  EXPECT_THROW(cfg("wigner-grid", {{"zeta", 1.0}}), ConfigError);
  EXPECT_THROW(cfg("wigner-grid", {{"d", 2}}), ConfigError);
  EXPECT_THROW(cfg("wigner-grid", {{"c", "x"}}), ConfigError);
  EXPECT_THROW(cfg("wigner-grid", {{"gridPoints", 1}}), ConfigError);
  EXPECT_THROW(cfg("wigner-grid", {{"qMin", 3}, {"qMax", 2}}), ConfigError);
  EXPECT_THROW(cfg("circuit-run", {{"shots", 0}}), ConfigError);
  EXPECT_THROW(cfg("circuit-run", {{"seed", "-4"}}), ConfigError);
  EXPECT_THROW(cfg("fidelity-sweep", {{"points", 1}}), ConfigError);
  EXPECT_THROW(cfg("fidelity-sweep", {{"cutoff", 1.5}}), ConfigError);
  EXPECT_THROW(cfg("protocol-run", {{"x", 1}}), ConfigError);
  EXPECT_THROW(cfg("protocol-run", {{"format", "xml"}}), ConfigError);
}

TEST(CliConfig, FlagsOverrideFile) {
  const ojson file = {{"alpha", 0.3}, {"phi", "pi/2"}};
  const ojson flags = {{"alpha", "0.7"}};
  const auto c = cfg("protocol-run", merge_config(file, flags));
  EXPECT_DOUBLE_EQ(*c.alpha, 0.7);
  EXPECT_DOUBLE_EQ(c.phi, kPi / 2);
  EXPECT_THROW(merge_config(ojson::array(), flags), ConfigError);
}

TEST(CliConfig, SeedFallsBackToEnvironment) {
  ::setenv("HYBRIDTP_SEED", "77", 1);
  EXPECT_EQ(cfg("circuit-run").seed, 77u);
  EXPECT_EQ(cfg("circuit-run", {{"seed", 5}}).seed, 5u);
  ::setenv("HYBRIDTP_SEED", "x1", 1);
  EXPECT_THROW(cfg("circuit-run"), ConfigError);
  ::unsetenv("HYBRIDTP_SEED");
  EXPECT_EQ(cfg("circuit-run").seed, 0u);
}

TEST(CliConfig, AngleListsFromStringsAndArrays) {
  const auto c = cfg("circuit-run", {{"phis", "0, pi/4 ,0.5pi"}});
  ASSERT_EQ(c.phis->size(), 3u);
  EXPECT_DOUBLE_EQ((*c.phis)[2], kPi / 2);
  const auto d = cfg("circuit-run", {{"phis", ojson::array({0.1, "pi"})}});
  EXPECT_DOUBLE_EQ((*d.phis)[1], kPi);
}

TEST(CliSweep, EqualPhasesPeakAtQuarterTurn) {
  auto c = cfg("fidelity-sweep", {{"points", 9}, {"coupling", "equal"}});
  const auto rows = parse_csv(cmd_fidelity_sweep(c).body);
  ASSERT_EQ(rows.size(), 81u);
  double best = 0.0;
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 6u);
    best = std::max(best, r[3]);
    if (std::abs(std::remainder(r[0] - r[1] - kPi / 2, 2 * kPi)) < 1e-12) EXPECT_NEAR(r[3], 1.0, 1e-15);
    EXPECT_NEAR(r[3], r[4], 0.01);
  }
  EXPECT_NEAR(best, 1.0, 1e-15);
}

TEST(CliSweep, QuarterOffsetRange) {
  // closed form over thetaB - thetaC = pi/2: max 3/4, min 1/4 (see README)
  auto c = cfg("fidelity-sweep", {{"points", 17}, {"coupling", "offset"}, {"offset", "pi/2"}});
  const auto rows = parse_csv(cmd_fidelity_sweep(c).body);
  double lo = 1, hi = 0;
  for (const auto& r : rows) {
    EXPECT_NEAR(r[1] - r[2], kPi / 2, 1e-12);
    lo = std::min(lo, r[3]);
    hi = std::max(hi, r[3]);
  }
  EXPECT_NEAR(hi, 0.75, 1e-12);
  EXPECT_NEAR(lo, 0.25, 1e-12);
}

TEST(CliSweep, EmptyGridIsAnError) {
  EXPECT_THROW(cmd_fidelity_sweep(cfg("fidelity-sweep", {{"points", 0}})), ConfigError);
  EXPECT_THROW(cmd_fidelity_sweep(cfg("fidelity-sweep", {{"phis", ""}})), ConfigError);
}

TEST(CliSweep, CsvRoundTripIsExact) {
  auto c = cfg("fidelity-sweep", {{"phis", "0.3"}, {"thetaBs", "0.1"}, {"thetaCs", "-0.2"}});
  const auto rows = parse_csv(cmd_fidelity_sweep(c).body);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0][3], fidelity_first_order_closed(0.3, 0.1, -0.2));
  EXPECT_EQ(rows[0][5], fidelity_second_order_closed(0.3, 0.1));
}

TEST(CliWigner, CoherentOutcome) {
  auto c = cfg("wigner-grid", {{"c", "0"}, {"d", 0}, {"gridPoints", 41}});
  const auto a = cmd_wigner_grid(c);
  ASSERT_TRUE(a.sidecar);
  const auto meta = ojson::parse(*a.sidecar);
  EXPECT_EQ(meta["classification"], "coherent");
  EXPECT_NEAR(meta["integral"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(parse_csv(a.body).size(), 41u * 41u);
}

TEST(CliWigner, SqueezedOddCat) {
  auto c = cfg("wigner-grid", {{"resource", "squeezed"}, {"zeta", 0.18}, {"c", "+"}, {"d", 0}, {"gridPoints", 41},
                               {"format", "json"}});
  const auto meta = ojson::parse(cmd_wigner_grid(c).body);
  EXPECT_EQ(meta["classification"], "ODD cat");
  const double amp = std::hypot(meta["amplitude"]["re"].get<double>(), meta["amplitude"]["im"].get<double>());
  EXPECT_NEAR(amp, 0.73, 0.01);
  EXPECT_NEAR(meta["integral"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(meta["values"].size(), 41u);
}

TEST(CliProtocol, EightRowsMatchCorrectionTable) {
  const auto j = ojson::parse(cmd_protocol_run(cfg("protocol-run", {{"phi", "pi/3"}})).body);
  ASSERT_EQ(j["rows"].size(), 8u);
  double total = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& r = j["rows"][i];
    EXPECT_EQ(r["correction"], correction_name(correction_table()[i].correction));
    EXPECT_EQ(r["bell"], bell_name(correction_table()[i].bell));
    EXPECT_NEAR(r["fidelity"].get<double>(), 1.0, 1e-12);
    total += r["probability"].get<double>();
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(CliCircuit, TableRowsAndSeed) {
  const auto j = ojson::parse(cmd_circuit_run(cfg("circuit-run", {{"seed", 31}})).body);
  EXPECT_EQ(j["seed"], 31);
  EXPECT_EQ(j["shots"], 8192);
  ASSERT_EQ(j["rows"].size(), 8u);
  for (const auto& r : j["rows"]) {
    EXPECT_NEAR(r["exact"][0].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(r["empirical"][0].get<double>(), 0.5, 0.02);
    const auto& rho = r["rhoC"];
    EXPECT_NEAR(rho[0][0]["re"].get<double>(), 0.5, 1e-12);
  }
}

TEST(CliCircuit, OffDiagonalFollowsReducedDensity) {
  const auto j = ojson::parse(cmd_circuit_run(cfg("circuit-run", {{"phis", "0.25pi"}, {"shots", 10}})).body);
  const double phi = kPi / 4;
  const auto th = criterion_phases(phi);
  const Mat rho = qubit_density(simulate_statevector(build_full_cqt_circuit(phi, th[0], th[1], th[2])), Mode::C);
  EXPECT_EQ(j["rows"][0]["rhoC"][0][1]["re"].get<double>(), rho(0, 1).real());
  EXPECT_EQ(j["rows"][0]["rhoC"][0][1]["im"].get<double>(), rho(0, 1).imag());
}

TEST(CliResource, ReportsNormAndCorrelator) {
  const auto j = ojson::parse(cmd_resource_info(cfg("resource-info", {{"alpha", 0.4}, {"thetaB", 0.3}, {"thetaD", 1.0}})).body);
  EXPECT_NEAR(j["norm"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["XXX"]["numeric"].get<double>(), j["XXX"]["exact"].get<double>(), 1e-10);
  EXPECT_EQ(j["modes"], "BCD");
}

TEST(CliIo, WriteFailureIsIoError) {
  EXPECT_THROW(write_file("/nonexistent-dir/x.csv", "a"), IoError);
  EXPECT_THROW(load_config_file("/nonexistent-dir/c.json"), IoError);
}

TEST(CliIo, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(InsufficientCutoff("x")), kExitCutoff);
  EXPECT_EQ(exit_code_for(IoError("x")), kExitIo);
}

TEST(CliBinary, SuccessWritesFile) {
  const auto dir = scratch_dir();
  const auto out = dir / "proto.json";
  EXPECT_EQ(run_cli("protocol-run --phi=pi/4 --output " + out.string()), 0);
  ASSERT_TRUE(fs::exists(out));
  EXPECT_EQ(ojson::parse(slurp(out))["rows"].size(), 8u);
}

TEST(CliBinary, ByteIdenticalReruns) {
  const auto dir = scratch_dir();
  const auto a = dir / "a.json", b = dir / "b.json";
  ASSERT_EQ(run_cli("circuit-run --seed 9 --shots 2000 --output " + a.string()), 0);
  ASSERT_EQ(run_cli("circuit-run --seed 9 --shots 2000 --output " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto e = dir / "env.json";
  ASSERT_EQ(run_cli("circuit-run --shots 2000 --output " + e.string(), "HYBRIDTP_SEED=9"), 0);
  EXPECT_EQ(slurp(a), slurp(e));
}

TEST(CliBinary, ConfigFileWithFlagOverride) {
  const auto dir = scratch_dir();
  const auto conf = dir / "conf.json", out = dir / "o.json";
  write_file(conf.string(), R"({"alpha": 0.3, "phi": "0.5pi"})");
  ASSERT_EQ(run_cli("protocol-run --config " + conf.string() + " --alpha 0.6 --output " + out.string()), 0);
  EXPECT_DOUBLE_EQ(ojson::parse(slurp(out))["alpha"].get<double>(), 0.6);
}

TEST(CliBinary, ExitCodes) {
  const auto dir = scratch_dir();
  const auto conf = dir / "bad.json";
  write_file(conf.string(), R"({"alpha": 0.3, "colour": "red"})");
  EXPECT_EQ(run_cli("protocol-run --config " + conf.string()), kExitConfig);
  EXPECT_EQ(run_cli("protocol-run --phi=banana"), kExitConfig);
  EXPECT_EQ(run_cli("no-such-command"), kExitConfig);
  EXPECT_EQ(run_cli("resource-info --alpha 3 --cutoff 10"), kExitCutoff);
  EXPECT_EQ(run_cli("protocol-run --output /nonexistent-dir/out.json"), kExitIo);
  EXPECT_EQ(run_cli("protocol-run --config /nonexistent-dir/c.json"), kExitIo);
}

TEST(CliBinary, EmptyGridWritesNothing) {
  const auto out = scratch_dir() / "sweep.csv";
  fs::remove(out);
  EXPECT_EQ(run_cli("fidelity-sweep --points 0 --output " + out.string()), kExitConfig);
  EXPECT_FALSE(fs::exists(out));
}

TEST(CliBinary, WignerCsvWithSidecar) {
  const auto out = scratch_dir() / "w.csv";
  ASSERT_EQ(run_cli("wigner-grid --c=+ --d 1 --gridPoints 21 --output " + out.string()), 0);
  const auto meta = ojson::parse(slurp(out.string() + ".meta.json"));
  EXPECT_EQ(meta["classification"], "EVEN cat");
  EXPECT_EQ(parse_csv(slurp(out)).size(), 21u * 21u);
}
