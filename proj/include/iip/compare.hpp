#pragma once

// Runs both rate formulations over a trajectory and reports their deviation
// column by column, relative to each column's largest magnitude over the run.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "iip/rate_geometric.hpp"
#include "iip/rate_legacy.hpp"
#include "iip/trajectory_csv.hpp"

namespace iip {

inline constexpr std::array<const char*, 9> kCompareColumns = {
    "dlat_I", "dlon_I", "dlon_E", "dip_x", "dip_y", "dip_z", "pE_x", "pE_y", "pE_z"};

using CompareValues = std::array<double, kCompareColumns.size()>;

struct CompareRecord {
  double t = 0.0;
  bool skipped = false;
  std::string skip_reason;
  CompareValues legacy{};
  CompareValues geometric{};
  double rel_dev = 0.0;
};

struct CompareSummary {
  double max_rel_dev = 0.0;
  double mean_rel_dev = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;
  CompareValues column_max_rel_dev{};
  CompareValues column_scale{};
};

struct CompareReport {
  std::vector<CompareRecord> records;
  CompareSummary summary;
};

struct PairedRates {
  LegacyRates legacy;
  GeometricRates geometric;
  Vec3 legacy_ecef;
};

/// Both formulations at one state; throws if either is undefined there.
inline PairedRates paired_rates(const InertialState& state, const AccelRtn& a,
                                const EarthModel& earth) {
  const IipSolution sol = compute_iip(state, earth);
  PairedRates out;
  out.legacy = legacy_rates(sol, legacy_sensitivities(sol, earth), a, earth);
  out.geometric = geometric_rates(state, sol, a, earth);
  out.legacy_ecef = legacy_ecef_rate(sol, out.legacy, earth);
  return out;
}

inline CompareReport compare_formulations(const std::vector<TrajectoryRow>& rows,
                                          const EarthModel& earth) {
  CompareReport report;
  report.records.reserve(rows.size());
  for (const auto& row : rows) {
    CompareRecord rec;
    rec.t = row.state.t;
    try {
      const PairedRates p = paired_rates(row.state, row.accel, earth);
      const LegacyRates& L = p.legacy;
      const GeometricRates& G = p.geometric;
      const Vec3 dip_geo = G.p_dot / earth.radius;
      rec.legacy = {L.dlat_I,      L.dlon_I,      L.dlon_E,      L.dip_dt.x(),
                    L.dip_dt.y(),  L.dip_dt.z(),  p.legacy_ecef.x(), p.legacy_ecef.y(),
                    p.legacy_ecef.z()};
      rec.geometric = {G.dlat_I,  G.dlon_I,  G.dlon_E,  dip_geo.x(), dip_geo.y(),
                       dip_geo.z(), G.p_dot_E.x(), G.p_dot_E.y(), G.p_dot_E.z()};
    } catch (const IipError& err) {
      rec.skipped = true;
      rec.skip_reason = std::string(to_string(err.kind()));
    }
    report.records.push_back(rec);
  }

  CompareSummary& sum = report.summary;
  sum.n_samples = rows.size();
  for (const auto& rec : report.records) {
    if (rec.skipped) {
      ++sum.n_skipped;
      ++sum.skip_reasons[rec.skip_reason];
      continue;
    }
    for (std::size_t c = 0; c < kCompareColumns.size(); ++c) {
      sum.column_scale[c] = std::max(
          {sum.column_scale[c], std::abs(rec.legacy[c]), std::abs(rec.geometric[c])});
    }
  }

  double total = 0.0;
  std::size_t used = 0;
  for (auto& rec : report.records) {
    if (rec.skipped) continue;
    for (std::size_t c = 0; c < kCompareColumns.size(); ++c) {
      const double diff = std::abs(rec.legacy[c] - rec.geometric[c]);
      double dev = 0.0;
      if (diff != 0.0) {
        dev = sum.column_scale[c] > 0.0 ? diff / sum.column_scale[c]
                                        : std::numeric_limits<double>::infinity();
      }
      sum.column_max_rel_dev[c] = std::max(sum.column_max_rel_dev[c], dev);
      rec.rel_dev = std::max(rec.rel_dev, dev);
    }
    sum.max_rel_dev = std::max(sum.max_rel_dev, rec.rel_dev);
    total += rec.rel_dev;
    ++used;
  }
  sum.mean_rel_dev = used ? total / static_cast<double>(used) : 0.0;
  return report;
}

}  // namespace iip
