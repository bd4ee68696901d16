#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using namespace iip;
namespace fs = std::filesystem;

namespace {

const EarthModel kEarth;
const std::string kTable1 = std::string(IIP_DATA_DIR) + "/table1.cfg";
const std::string kS1 = "6578137,0,0";
const std::string kS1v = "4949.747468305833,4949.747468305833,0";

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

using Row = std::map<std::string, std::string>;

std::vector<Row> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const auto header = detail::split(line, ',');
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    const auto cells = detail::split(line, ',');
    Row r;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
    rows.push_back(r);
  }
  return rows;
}

double num(const Row& r, const std::string& key) {
  const auto it = r.find(key);
  if (it == r.end()) throw std::runtime_error("missing column " + key);
  return std::stod(it->second);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("iip_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

void write_rows(const std::string& path, const std::vector<TrajectorySample>& samples) {
  std::ofstream f(path);
  write_trajectory_csv(f, samples);
}

}  // namespace

TEST(CliIip, SurfaceSubCircularRow) {
  const double v = std::sqrt(0.5 * kEarth.mu / kEarth.radius);
  const CliRun r = run({"iip", "--r", "6378137,0,0", "--v", "0," + format_double(v) + ",0",
                     "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(num(rows[0], "phi_deg"), 0.0);
  EXPECT_EQ(num(rows[0], "t_F"), 0.0);
}

TEST(CliIip, BelowSurfaceExitsNonzero) {
  const CliRun r = run({"iip", "--r", "6000000,0,0", "--v", "0,7000,0"});
  EXPECT_EQ(r.code, cli::exit_code(ErrorKind::BelowSurface));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error: BelowSurface:"), std::string::npos) << r.err;
}

TEST(CliIip, S1MatchesLibraryCall) {
  const CliRun r = run({"iip", "--r", kS1, "--v", kS1v, "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Row row = parse_csv(r.out).at(0);
  const InertialState s{0.0, Vec3(6578137, 0, 0), Vec3(4949.747468305833, 4949.747468305833, 0)};
  const IipSolution sol = compute_iip(s, kEarth);
  const double deg = 180.0 / kPi;
  EXPECT_EQ(row.at("status"), "ok");
  EXPECT_EQ(num(row, "phi_deg"), sol.phi * deg);
  EXPECT_EQ(num(row, "t_F"), sol.t_F);
  EXPECT_EQ(num(row, "i_p_x"), sol.i_p.x());
  EXPECT_EQ(num(row, "i_p_y"), sol.i_p.y());
  EXPECT_EQ(num(row, "lat_I_deg"), sol.lat_I * deg);
  EXPECT_EQ(num(row, "lon_I_deg"), sol.lon_I * deg);
  EXPECT_EQ(num(row, "lon_E_deg"), sol.lon_E * deg);
}

TEST(CliIip, JsonLinesAndEarthOverride) {
  const CliRun r = run({"--earth", "radius=6371000,omega=7.2921159e-5", "iip", "--r", kS1, "--v",
                     kS1v, "--format", "json-lines"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EarthModel e;
  e.radius = 6371000;
  e.omega = 7.2921159e-5;
  const IipSolution sol = compute_iip(test::state_s1(), e);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_NEAR(j["t_F"].get<double>(), sol.t_F, 1e-9);

  EXPECT_EQ(run({"--earth", "radius=-1", "iip", "--r", kS1, "--v", kS1v}).code,
            cli::exit_code(ErrorKind::ConfigError));
  EXPECT_EQ(run({"--earth", "moon=1", "iip", "--r", kS1, "--v", kS1v}).code,
            cli::exit_code(ErrorKind::MalformedInput));
}

TEST(CliRate, ZeroAccelerationColumns) {
  const CliRun r = run({"rate", "--r", kS1, "--v", kS1v, "--method", "legacy", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Row row = parse_csv(r.out).at(0);
  const StateKinematics k = derive_kinematics(test::state_s1(), kEarth);
  for (const auto& [key, value] : row) {
    if (key == "status" || key == "t" || key == "tf_dot" || key == "phi_dot_deg_s") continue;
    EXPECT_EQ(std::stod(value), 0.0) << key;
  }
  EXPECT_EQ(num(row, "tf_dot"), -1.0);
  EXPECT_NEAR(num(row, "phi_dot_deg_s"), -k.h / (k.r0 * k.r0) * 180.0 / kPi, 1e-15);
}

TEST(CliRate, OffPlaneOnlyHasNoDownrangePart) {
  const CliRun r = run({"rate", "--r", kS1, "--v", kS1v, "--accel", "0,0,2", "--method",
                     "geometric", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Row row = parse_csv(r.out).at(0);
  for (const char* c : {"p_dot_D_x", "p_dot_D_y", "p_dot_D_z"}) EXPECT_EQ(num(row, c), 0.0);
  EXPECT_GT(num(row, "p_dot_C_z"), 0.0);
}

TEST(CliRate, S1BothMethodsAgree) {
  const CliRun r = run({"rate", "--r", kS1, "--v", kS1v, "--accel", "1,1,0", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Row row = parse_csv(r.out).at(0);
  int dev_cols = 0;
  for (const auto& [key, value] : row) {
    if (key.rfind("dev_", 0) == 0) {
      ++dev_cols;
      EXPECT_LE(std::stod(value), 1e-8) << key;
    }
  }
  EXPECT_EQ(dev_cols, 7);
}

TEST_F(CliFiles, RateContinuesPastSingularRows) {
  const auto samples = simulate(load_vehicle_config(kTable1), kEarth, 1.0).samples;
  std::vector<TrajectorySample> subset(samples.begin(), samples.begin() + 15);
  write_rows(path("in.csv"), subset);
  const CliRun r = run({"rate", "--input", path("in.csv"), "--format", "csv", "--out",
                     path("rates.csv")});
  EXPECT_EQ(r.code, cli::exit_code(ErrorKind::SensitivitySingularity)) << r.err;
  EXPECT_NE(r.err.find("error: SensitivitySingularity:"), std::string::npos);
  const auto rows = parse_csv(read_file(path("rates.csv")));
  ASSERT_EQ(rows.size(), subset.size());
  EXPECT_EQ(rows[0].at("status"), "SensitivitySingularity");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].at("status"), "ok");
    EXPECT_EQ(num(rows[i], "t"), subset[i].t);
  }
}

TEST_F(CliFiles, SimulateShippedConfig) {
  const auto t0 = std::chrono::steady_clock::now();
  const CliRun r = run({"simulate", "--config", kTable1, "--dt", "1", "--out", path("traj.csv")});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(secs, 10.0);
  EXPECT_NE(r.out.find("burnout_1"), std::string::npos);
  EXPECT_NE(r.out.find("burnout_2"), std::string::npos);
  EXPECT_NE(r.out.find("max_altitude_m"), std::string::npos);
  EXPECT_NE(r.out.find("final_iip_lat_deg"), std::string::npos);
  EXPECT_GE(load_trajectory_csv(path("traj.csv")).size(), 390u);
}

TEST_F(CliFiles, SimulateZeroThrustAndMalformedConfig) {
  const InertialState s = test::state_s1();
  {
    std::ofstream f(path("coast.cfg"));
    f.precision(17);
    f << "pitch_program_deg = 0:90\n"
      << "initial_position_m = " << s.r.x() << "," << s.r.y() << "," << s.r.z() << "\n"
      << "initial_velocity_mps = " << s.v.x() << "," << s.v.y() << "," << s.v.z() << "\n"
      << "[stage]\nstructural_mass = 10\nthrust_n = 0:0\nburn_time = 30\n";
  }
  ASSERT_EQ(run({"simulate", "--config", path("coast.cfg"), "--out", path("c.csv")}).code, 0);
  const auto rows = load_trajectory_csv(path("c.csv"));
  ASSERT_EQ(rows.size(), 31u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.accel.r, 0.0);
    EXPECT_EQ(row.accel.theta, 0.0);
    EXPECT_EQ(row.accel.h, 0.0);
  }

  {
    std::ofstream f(path("bad.cfg"));
    f << "pitch_program_deg = 0:90\n[stage]\nburn_time = soon\n";
  }
  const CliRun bad = run({"simulate", "--config", path("bad.cfg"), "--out", path("x.csv")});
  EXPECT_EQ(bad.code, cli::exit_code(ErrorKind::ConfigError));
  EXPECT_NE(bad.err.find("error: ConfigError: line 3: field 'burn_time'"), std::string::npos)
      << bad.err;
  EXPECT_EQ(run({"simulate", "--out", path("x.csv")}).code, cli::kExitUsage);
}

TEST_F(CliFiles, CompareShippedTrajectory) {
  ASSERT_EQ(run({"simulate", "--config", kTable1, "--out", path("traj.csv")}).code, 0);
  const CliRun r = run({"compare", "--trajectory", path("traj.csv"), "--out", path("report.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(path("report.json")));
  for (const char* key : {"max_rel_dev", "mean_rel_dev", "n_samples", "n_skipped", "skip_reasons"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_LE(j["max_rel_dev"].get<double>(), 1e-8);
  EXPECT_GE(j["n_samples"].get<int>(), 390);
  const auto rows = parse_csv(read_file(path("report.csv")));
  EXPECT_EQ(rows.size(), j["n_samples"].get<std::size_t>());
  std::size_t skipped = 0;
  for (const auto& row : rows) skipped += row.at("status") != "ok";
  EXPECT_EQ(skipped, j["n_skipped"].get<std::size_t>());

  const CliRun strict = run({"compare", "--trajectory", path("traj.csv"), "--out",
                          path("strict.csv"), "--tol", "0"});
  EXPECT_EQ(strict.code, cli::kExitTolerance);
}

TEST_F(CliFiles, CompareCoastOnlyTrajectoryIsExact) {
  const InertialState s = test::state_s1();
  std::vector<TrajectorySample> samples;
  for (int k = 0; k < 20; ++k) {
    const InertialState st = propagate_thrusting(s, {}, 5.0 * k, kEarth);
    samples.push_back({st.t, st.r, st.v, {}, 1.0});
  }
  write_rows(path("coast.csv"), samples);
  const CliRun r = run({"compare", "--trajectory", path("coast.csv"), "--out", path("rep.csv"),
                     "--summary", path("sum.json"), "--tol", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(read_file(path("sum.json")));
  EXPECT_EQ(j["max_rel_dev"].get<double>(), 0.0);
  EXPECT_EQ(j["n_skipped"].get<int>(), 0);
  for (const auto& row : parse_csv(read_file(path("rep.csv")))) {
    for (const auto& [key, value] : row) {
      if (key == "t" || key == "status") continue;
      EXPECT_EQ(std::stod(value), 0.0) << key;
    }
  }
}

TEST_F(CliFiles, OutputIsByteStable) {
  ASSERT_EQ(run({"simulate", "--config", kTable1, "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", kTable1, "--out", path("b.csv")}).code, 0);
  EXPECT_EQ(read_file(path("a.csv")), read_file(path("b.csv")));
  ASSERT_EQ(run({"compare", "--trajectory", path("a.csv"), "--out", path("r1.csv")}).code, 0);
  ASSERT_EQ(run({"compare", "--trajectory", path("a.csv"), "--out", path("r2.csv")}).code, 0);
  EXPECT_EQ(read_file(path("r1.csv")), read_file(path("r2.csv")));
  EXPECT_EQ(read_file(path("r1.json")), read_file(path("r2.json")));
  const CliRun x = run({"rate", "--input", path("a.csv"), "--format", "json-lines"});
  const CliRun y = run({"rate", "--input", path("a.csv"), "--format", "json-lines"});
  EXPECT_EQ(x.out, y.out);
}

TEST(CliValidate, ImpactMode) {
  const CliRun r = run({"validate", "--mode", "impact", "--r", kS1, "--v", kS1v});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto parts = detail::split(line, '=');
    if (parts.size() == 2) kv[parts[0]] = std::stod(parts[1]);
  }
  EXPECT_LE(kv.at("delta_position_m"), 1.0);
  EXPECT_LE(kv.at("delta_t_F_s"), 1e-3);
}

TEST(CliValidate, FdModeFreeFallAndOrder) {
  const CliRun zero = run({"validate", "--mode", "fd", "--r", kS1, "--v", kS1v});
  ASSERT_EQ(zero.code, 0) << zero.err;
  const auto tf_line = zero.out.substr(zero.out.find("t_F:"));
  const double fd = std::stod(tf_line.substr(tf_line.find(" fd = ") + 6));
  EXPECT_NEAR(fd, -1.0, 1e-6);

  const CliRun thrust = run({"validate", "--mode", "fd", "--r", kS1, "--v", kS1v, "--accel",
                          "1,1,1", "--dt-sweep", "0.2,0.1,0.05,0.025"});
  ASSERT_EQ(thrust.code, 0) << thrust.err;
  std::istringstream in(thrust.out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const auto pos = line.find("order = ");
    ASSERT_NE(pos, std::string::npos) << line;
    EXPECT_GE(std::stod(line.substr(pos + 8)), 1.9) << line;
  }
  EXPECT_EQ(lines, 7);
}

TEST(CliErrors, ExitCodesAreDistinctAndDocumented) {
  std::set<int> codes;
  for (ErrorKind k : kAllErrorKinds) {
    const int c = cli::exit_code(k);
    EXPECT_GE(c, 10);
    codes.insert(c);
  }
  EXPECT_EQ(codes.size(), std::size(kAllErrorKinds));
  EXPECT_FALSE(codes.count(cli::kExitOk) || codes.count(cli::kExitUsage) ||
               codes.count(cli::kExitTolerance));
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"rate", "--method", "magic"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"iip", "--input", "/nonexistent.csv"}).code,
            cli::exit_code(ErrorKind::MalformedInput));
  EXPECT_EQ(run({"iip"}).code, cli::exit_code(ErrorKind::MalformedInput));
}
