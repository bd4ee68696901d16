#pragma once

// Command-line front end for the IIP toolkit. Kept in a header so the test
// suite can drive run_cli() in-process.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iip/iip.hpp"

namespace iip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTolerance = 3;

/// Exit code for a library error: 10 + position in kAllErrorKinds.
inline int exit_code(ErrorKind kind) {
  int code = 10;
  for (ErrorKind k : kAllErrorKinds) {
    if (k == kind) return code;
    ++code;
  }
  return 1;
}

inline constexpr double kDeg = 180.0 / kPi;

enum class Format { Text, Csv, JsonLines };

/// One output record: ordered (name, value) fields plus a status string.
struct Record {
  std::vector<std::pair<std::string, double>> fields;
  std::string status = "ok";

  void add(const std::string& name, double v) { fields.emplace_back(name, v); }
  void add(const std::string& name, const Vec3& v) {
    add(name + "_x", v.x());
    add(name + "_y", v.y());
    add(name + "_z", v.z());
  }
};

class RecordWriter {
 public:
  RecordWriter(std::ostream& out, Format fmt) : out_(out), fmt_(fmt) {}

  void write(const Record& rec) {
    switch (fmt_) {
      case Format::Csv: {
        if (!header_written_) {
          out_ << "status";
          for (const auto& [name, v] : rec.fields) out_ << ',' << name;
          out_ << '\n';
          header_written_ = true;
        }
        out_ << rec.status;
        for (const auto& [name, v] : rec.fields) {
          out_ << ',';
          if (rec.status == "ok" || name == "t") out_ << format_double(v);
        }
        out_ << '\n';
        break;
      }
      case Format::JsonLines: {
        nlohmann::ordered_json j;
        j["status"] = rec.status;
        for (const auto& [name, v] : rec.fields) {
          if (rec.status == "ok" || name == "t") j[name] = v;
        }
        out_ << j.dump() << '\n';
        break;
      }
      case Format::Text: {
        if (rec.status != "ok") {
          out_ << "t = " << format_double(rec.fields.front().second) << "  error: "
               << rec.status << '\n';
          break;
        }
        for (const auto& [name, v] : rec.fields) {
          out_ << name << " = " << format_double(v) << '\n';
        }
        out_ << '\n';
        break;
      }
    }
  }

 private:
  std::ostream& out_;
  Format fmt_;
  bool header_written_ = false;
};

struct StateOptions {
  std::vector<double> r;
  std::vector<double> v;
  double t = 0.0;
  std::vector<double> accel{0.0, 0.0, 0.0};
  std::string input;
};

inline void add_state_options(CLI::App& cmd, StateOptions& opt, bool with_accel) {
  cmd.add_option("--r", opt.r, "ECI position x,y,z [m]")->expected(3)->delimiter(',');
  cmd.add_option("--v", opt.v, "ECI velocity x,y,z [m/s]")->expected(3)->delimiter(',');
  cmd.add_option("--t", opt.t, "state epoch [s]");
  if (with_accel) {
    cmd.add_option("--accel", opt.accel, "external acceleration a_r,a_theta,a_h [m/s^2]")
        ->expected(3)
        ->delimiter(',');
  }
}

inline std::vector<TrajectoryRow> gather_rows(const StateOptions& opt) {
  if (!opt.input.empty()) return load_trajectory_csv(opt.input);
  if (opt.r.size() != 3 || opt.v.size() != 3) {
    throw IipError(ErrorKind::MalformedInput, "give --r and --v, or --input");
  }
  TrajectoryRow row;
  row.state = {opt.t, Vec3(opt.r[0], opt.r[1], opt.r[2]), Vec3(opt.v[0], opt.v[1], opt.v[2])};
  row.accel = {opt.accel[0], opt.accel[1], opt.accel[2]};
  return {row};
}

inline EarthModel parse_earth(const std::string& spec) {
  EarthModel earth;
  if (spec.empty()) return earth;
  for (const auto& item : detail::split(spec, ',')) {
    const auto kv = detail::split(item, '=');
    if (kv.size() != 2) {
      throw IipError(ErrorKind::MalformedInput, "--earth expects key=value items");
    }
    char* end = nullptr;
    const double x = std::strtod(kv[1].c_str(), &end);
    if (kv[1].empty() || *end != '\0') {
      throw IipError(ErrorKind::MalformedInput, "--earth value '" + kv[1] + "'");
    }
    if (kv[0] == "mu") earth.mu = x;
    else if (kv[0] == "radius") earth.radius = x;
    else if (kv[0] == "omega") earth.omega = x;
    else if (kv[0] == "t_ref") earth.t_ref = x;
    else throw IipError(ErrorKind::MalformedInput, "--earth key '" + kv[0] + "'");
  }
  earth.validate();
  return earth;
}

inline Record iip_record(const InertialState& s, const EarthModel& earth) {
  Record rec;
  rec.add("t", s.t);
  const IipSolution sol = compute_iip(s, earth);
  rec.add("phi_deg", sol.phi * kDeg);
  rec.add("t_F", sol.t_F);
  rec.add("i_p", sol.i_p);
  rec.add("lat_I_deg", sol.lat_I * kDeg);
  rec.add("lon_I_deg", sol.lon_I * kDeg);
  rec.add("lat_E_deg", sol.lat_E * kDeg);
  rec.add("lon_E_deg", sol.lon_E * kDeg);
  return rec;
}

enum class Method { Legacy, Geometric, Both };

struct RateColumns {
  double phi_dot, tf_dot, dlat_I, dlon_I, dlon_E;
  Vec3 dip_dt, p_dot_E;
};

inline void add_rate_columns(Record& rec, const std::string& prefix, const RateColumns& c) {
  rec.add(prefix + "phi_dot_deg_s", c.phi_dot * kDeg);
  rec.add(prefix + "tf_dot", c.tf_dot);
  rec.add(prefix + "dlat_I_deg_s", c.dlat_I * kDeg);
  rec.add(prefix + "dlon_I_deg_s", c.dlon_I * kDeg);
  rec.add(prefix + "dlon_E_deg_s", c.dlon_E * kDeg);
  rec.add(prefix + "dip_dt", c.dip_dt);
  rec.add(prefix + "p_dot_E", c.p_dot_E);
}

inline double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double rel_dev(const Vec3& a, const Vec3& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline Record rate_record(const TrajectoryRow& row, Method method, const EarthModel& earth) {
  Record rec;
  rec.add("t", row.state.t);
  const IipSolution sol = compute_iip(row.state, earth);

  std::optional<RateColumns> legacy, geometric;
  Vec3 p_dot_D, p_dot_C;
  if (method != Method::Geometric) {
    const LegacyRates L = legacy_rates(sol, legacy_sensitivities(sol, earth), row.accel, earth);
    legacy = RateColumns{L.phi_dot, L.tf_dot, L.dlat_I, L.dlon_I, L.dlon_E, L.dip_dt,
                         legacy_ecef_rate(sol, L, earth)};
  }
  if (method != Method::Legacy) {
    const GeometricRates G = geometric_rates(row.state, sol, row.accel, earth);
    geometric = RateColumns{G.phi_dot, G.tf_dot_a - 1.0, G.dlat_I, G.dlon_I, G.dlon_E,
                            G.p_dot / earth.radius, G.p_dot_E};
    p_dot_D = G.p_dot_D;
    p_dot_C = G.p_dot_C;
  }
  if (method == Method::Both) {
    add_rate_columns(rec, "legacy_", *legacy);
    add_rate_columns(rec, "geometric_", *geometric);
    const RateColumns& L = *legacy;
    const RateColumns& G = *geometric;
    rec.add("dev_phi_dot", rel_dev(L.phi_dot, G.phi_dot));
    rec.add("dev_tf_dot", rel_dev(L.tf_dot, G.tf_dot));
    rec.add("dev_dlat_I", rel_dev(L.dlat_I, G.dlat_I));
    rec.add("dev_dlon_I", rel_dev(L.dlon_I, G.dlon_I));
    rec.add("dev_dlon_E", rel_dev(L.dlon_E, G.dlon_E));
    rec.add("dev_dip_dt", rel_dev(L.dip_dt, G.dip_dt));
    rec.add("dev_p_dot_E", rel_dev(L.p_dot_E, G.p_dot_E));
  } else {
    add_rate_columns(rec, "", legacy ? *legacy : *geometric);
  }
  if (geometric) {
    rec.add(method == Method::Both ? "geometric_p_dot_D" : "p_dot_D", p_dot_D);
    rec.add(method == Method::Both ? "geometric_p_dot_C" : "p_dot_C", p_dot_C);
  }
  return rec;
}

inline std::string summary_path_for(const std::string& out) {
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return out + ".json";
  }
  return out.substr(0, dot) + ".json";
}

inline nlohmann::ordered_json summary_json(const CompareSummary& s) {
  nlohmann::ordered_json j;
  j["max_rel_dev"] = s.max_rel_dev;
  j["mean_rel_dev"] = s.mean_rel_dev;
  j["n_samples"] = s.n_samples;
  j["n_skipped"] = s.n_skipped;
  j["skip_reasons"] = nlohmann::ordered_json::object();
  for (const auto& [reason, count] : s.skip_reasons) j["skip_reasons"][reason] = count;
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < kCompareColumns.size(); ++c) {
    cols[kCompareColumns[c]] = s.column_max_rel_dev[c];
  }
  j["column_max_rel_dev"] = cols;
  return j;
}

inline void write_compare_csv(std::ostream& out, const CompareReport& report) {
  out << "t,status";
  for (const char* c : kCompareColumns) out << ",legacy_" << c;
  for (const char* c : kCompareColumns) out << ",geometric_" << c;
  out << ",rel_dev\n";
  for (const auto& rec : report.records) {
    out << format_double(rec.t) << ',' << (rec.skipped ? rec.skip_reason : "ok");
    for (double v : rec.legacy) out << ',' << (rec.skipped ? "" : format_double(v));
    for (double v : rec.geometric) out << ',' << (rec.skipped ? "" : format_double(v));
    out << ',' << (rec.skipped ? "" : format_double(rec.rel_dev)) << '\n';
  }
}

inline const std::map<std::string, FdQuantity>& fd_quantities() {
  static const std::map<std::string, FdQuantity> q = {
      {"phi", FdQuantity::FlightAngle},        {"t_F", FdQuantity::TimeOfFlight},
      {"i_p", FdQuantity::IipUnitVector},      {"lat_I", FdQuantity::LatInertial},
      {"lon_I", FdQuantity::LonInertial},      {"lon_E", FdQuantity::LonEcef},
      {"p_E", FdQuantity::EcefImpactPosition},
  };
  return q;
}

/// Analytic counterpart of each finite-difference quantity (geometric route
/// for the ECEF vector, legacy route elsewhere).
inline Eigen::VectorXd analytic_rate(FdQuantity q, const LegacyRates& L,
                                     const GeometricRates& G) {
  Eigen::VectorXd out(1);
  switch (q) {
    case FdQuantity::FlightAngle: out[0] = L.phi_dot; break;
    case FdQuantity::TimeOfFlight: out[0] = L.tf_dot; break;
    case FdQuantity::LatInertial: out[0] = L.dlat_I; break;
    case FdQuantity::LonInertial: out[0] = L.dlon_I; break;
    case FdQuantity::LonEcef: out[0] = L.dlon_E; break;
    case FdQuantity::IipUnitVector: out = L.dip_dt; break;
    case FdQuantity::EcefImpactPosition: out = G.p_dot_E; break;
  }
  return out;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Instantaneous impact point and IIP-rate toolkit"};
  app.require_subcommand(1);
  std::string earth_spec;
  app.add_option("--earth", earth_spec,
                 "override Earth model: mu=..,radius=..,omega=..,t_ref=..");

  const std::map<std::string, Format> formats = {
      {"text", Format::Text}, {"csv", Format::Csv}, {"json-lines", Format::JsonLines}};
  Format format = Format::Text;

  // iip
  StateOptions iip_opt;
  auto* iip_cmd = app.add_subcommand("iip", "impact point of one state or a trajectory csv");
  add_state_options(*iip_cmd, iip_opt, false);
  std::string records_out;
  iip_cmd->add_option("--input", iip_opt.input, "trajectory csv");
  iip_cmd->add_option("--out", records_out, "write records here instead of stdout");
  iip_cmd->add_option("--format", format)->transform(CLI::CheckedTransformer(formats));

  // rate
  StateOptions rate_opt;
  Method method = Method::Both;
  const std::map<std::string, Method> methods = {
      {"legacy", Method::Legacy}, {"geometric", Method::Geometric}, {"both", Method::Both}};
  auto* rate_cmd = app.add_subcommand("rate", "IIP time derivatives");
  add_state_options(*rate_cmd, rate_opt, true);
  rate_cmd->add_option("--input", rate_opt.input, "trajectory csv");
  rate_cmd->add_option("--out", records_out, "write records here instead of stdout");
  rate_cmd->add_option("--method", method)->transform(CLI::CheckedTransformer(methods));
  rate_cmd->add_option("--format", format)->transform(CLI::CheckedTransformer(formats));

  // simulate
  std::string config_path, sim_out;
  double sim_dt = 1.0;
  auto* sim_cmd = app.add_subcommand("simulate", "integrate a staged launch trajectory");
  sim_cmd->add_option("--config", config_path, "vehicle config file")->required();
  sim_cmd->add_option("--dt", sim_dt, "sample spacing [s]");
  sim_cmd->add_option("--out", sim_out, "trajectory csv to write")->required();

  // compare
  std::string traj_path, report_path, summary_path;
  double tol = 1e-8;
  auto* cmp_cmd = app.add_subcommand("compare", "legacy vs geometric rates along a trajectory");
  cmp_cmd->add_option("--trajectory", traj_path, "trajectory csv")->required();
  cmp_cmd->add_option("--out", report_path, "per-sample report csv")->required();
  cmp_cmd->add_option("--summary", summary_path, "summary json (default: <out>.json)");
  cmp_cmd->add_option("--tol", tol, "max allowed relative deviation");

  // validate
  StateOptions val_opt;
  std::string mode;
  std::vector<double> sweep{0.2, 0.1, 0.05, 0.025};
  double prop_dt = 0.0;
  auto* val_cmd = app.add_subcommand("validate", "check analytic results against oracles");
  add_state_options(*val_cmd, val_opt, true);
  val_cmd->add_option("--mode", mode)->required()->check(CLI::IsMember({"impact", "fd"}));
  val_cmd->add_option("--dt-sweep", sweep, "central-difference steps [s]")->delimiter(',');
  val_cmd->add_option("--dt", prop_dt, "free-fall integration step [s] (impact mode)");

  std::vector<std::string> argv_store{"iip"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const EarthModel earth = parse_earth(earth_spec);

    auto run_rows = [&](const std::vector<TrajectoryRow>& rows, auto&& make_record) {
      std::ofstream file;
      if (!records_out.empty()) {
        file.open(records_out);
        if (!file) throw IipError(ErrorKind::MalformedInput, "cannot write " + records_out);
      }
      RecordWriter writer(records_out.empty() ? out : file, format);
      int code = kExitOk;
      for (const auto& row : rows) {
        try {
          writer.write(make_record(row));
        } catch (const IipError& e) {
          Record bad;
          bad.add("t", row.state.t);
          bad.status = std::string(to_string(e.kind()));
          writer.write(bad);
          err << "error: " << e.what() << " (t = " << format_double(row.state.t) << ")\n";
          if (code == kExitOk) code = exit_code(e.kind());
        }
      }
      return code;
    };

    if (*iip_cmd) {
      return run_rows(gather_rows(iip_opt),
                      [&](const TrajectoryRow& row) { return iip_record(row.state, earth); });
    }
    if (*rate_cmd) {
      return run_rows(gather_rows(rate_opt), [&](const TrajectoryRow& row) {
        return rate_record(row, method, earth);
      });
    }
    if (*sim_cmd) {
      const VehicleConfig cfg = load_vehicle_config(config_path);
      const auto t0 = std::chrono::steady_clock::now();
      const SimulationResult res = simulate(cfg, earth, sim_dt);
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::ofstream f(sim_out);
      if (!f) throw IipError(ErrorKind::MalformedInput, "cannot write " + sim_out);
      write_trajectory_csv(f, res.samples);

      out << "samples = " << res.samples.size() << '\n';
      out << "liftoff_mass_kg = " << format_double(cfg.liftoff_mass()) << '\n';
      double max_alt = 0.0;
      for (const auto& s : res.samples) max_alt = std::max(max_alt, s.r.norm() - earth.radius);
      for (std::size_t i = 0; i < res.burnout_times.size(); ++i) {
        const double tb = res.burnout_times[i];
        for (const auto& s : res.samples) {
          if (std::abs(s.t - tb) < 0.5 * sim_dt) {
            out << "burnout_" << i + 1 << " t = " << format_double(s.t)
                << " alt_m = " << format_double(s.r.norm() - earth.radius)
                << " speed_mps = " << format_double(s.v.norm()) << '\n';
            break;
          }
        }
      }
      out << "max_altitude_m = " << format_double(max_alt) << '\n';
      if (!res.samples.empty()) {
        const auto& last = res.samples.back();
        try {
          const IipSolution sol = compute_iip({last.t, last.r, last.v}, earth);
          out << "final_iip_lat_deg = " << format_double(sol.lat_E * kDeg) << '\n';
          out << "final_iip_lon_deg = " << format_double(sol.lon_E * kDeg) << '\n';
        } catch (const IipError& e) {
          out << "final_iip = " << e.what() << '\n';
        }
      }
      if (res.subsurface_time) {
        out << "SubsurfaceState: trajectory re-entered at t = "
            << format_double(*res.subsurface_time) << " s; samples truncated\n";
      }
      err << "simulated in " << elapsed << " s\n";
      return kExitOk;
    }
    if (*cmp_cmd) {
      const CompareReport report = compare_formulations(load_trajectory_csv(traj_path), earth);
      std::ofstream f(report_path);
      if (!f) throw IipError(ErrorKind::MalformedInput, "cannot write " + report_path);
      write_compare_csv(f, report);
      const auto j = summary_json(report.summary);
      const std::string sp = summary_path.empty() ? summary_path_for(report_path) : summary_path;
      std::ofstream js(sp);
      if (!js) throw IipError(ErrorKind::MalformedInput, "cannot write " + sp);
      js << j.dump(2) << '\n';
      out << j.dump(2) << '\n';
      if (!(report.summary.max_rel_dev <= tol)) {
        err << "max relative deviation " << format_double(report.summary.max_rel_dev)
            << " exceeds tolerance " << format_double(tol) << '\n';
        return kExitTolerance;
      }
      return kExitOk;
    }
    if (*val_cmd) {
      const auto rows = gather_rows(val_opt);
      const TrajectoryRow& row = rows.front();
      if (mode == "impact") {
        const IipSolution sol = compute_iip(row.state, earth);
        const PropagationResult prop = propagate_freefall(row.state, earth, prop_dt);
        const Vec3 analytic = earth.radius * sol.i_p;
        out << "analytic_t_F = " << format_double(sol.t_F) << '\n';
        out << "propagated_t_F = " << format_double(prop.impact_time) << '\n';
        out << "delta_t_F_s = " << format_double(std::abs(sol.t_F - prop.impact_time)) << '\n';
        out << "delta_position_m = "
            << format_double((analytic - prop.impact_position).norm()) << '\n';
        out << "steps = " << prop.steps << '\n';
        return kExitOk;
      }
      const IipSolution sol = compute_iip(row.state, earth);
      const LegacyRates L = legacy_rates(sol, legacy_sensitivities(sol, earth), row.accel, earth);
      const GeometricRates G = geometric_rates(row.state, sol, row.accel, earth);
      for (const auto& [name, q] : fd_quantities()) {
        const FdEstimate est = fd_rate(row.state, row.accel, q, sweep, earth);
        const Eigen::VectorXd an = analytic_rate(q, L, G);
        const double scale = std::max(an.norm(), est.value.norm());
        const double rel = scale == 0.0 ? 0.0 : (an - est.value).norm() / scale;
        out << name << ": analytic_norm = " << format_double(an.norm())
            << " fd_norm = " << format_double(est.value.norm())
            << " abs_delta = " << format_double((an - est.value).norm())
            << " rel_delta = " << format_double(rel);
        if (est.value.size() == 1) out << " analytic = " << format_double(an[0])
                                       << " fd = " << format_double(est.value[0]);
        if (an.norm() == 0.0) out << " order = n/a (zero rate)";
        else if (est.order) out << " order = " << format_double(*est.order);
        out << '\n';
      }
      return kExitOk;
    }
  } catch (const IipError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return kExitUsage;
}

}  // namespace iip::cli
