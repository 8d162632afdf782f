#pragma once

#include <string>
#include <vector>

#include "rbsp/planner.hpp"
#include "rbsp/run_config.hpp"

namespace rbsp {

/// Shortest representation with 9 significant digits ("%.9g").
std::string format_g9(double value);

inline constexpr const char* kSweepCsvHeader =
    "L,mu,T,Q_mu,Q_v1,Q_v2,p1,m,N,S_over_N,plateau_flag";

/// CSV body for sweep rows: header + one line per row, LF endings,
/// 9 significant digits. `m` is the real-valued (asymptotic) group size.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Fixed-distance mu sweep evaluated over the config's mu grid.
std::vector<SweepRow> run_mu_sweep(const RunConfig& cfg);

/// Per-distance optimization over the config's length list.
std::vector<SweepRow> run_distance_sweep(const RunConfig& cfg);

/// `key = value` report of a single operating point.
std::string estimate_text(const RunConfig& cfg, const PlanResult& plan,
                          bool include_other_mode = false);

/// Same record as JSON.
std::string estimate_json(const RunConfig& cfg, const PlanResult& plan);

}  // namespace rbsp
