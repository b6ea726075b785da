#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "moment_ensemble/grid.hpp"
#include "moment_ensemble/moments.hpp"
#include "moment_ensemble/profile.hpp"
#include "moment_ensemble/scenarios.hpp"

namespace moment_ensemble {

/// 17 significant digits, the format used for every numeric CSV cell.
std::string format_number(long double value);

/// Header `k_1,...,k_d,state_i,value`, one row per (multi-index, component), state_i 1-based.
void write_moments_csv(std::ostream& os, const MomentSequence& m);
/// Same layout with a leading `time` column, one block per sample.
void write_moment_trace_csv(std::ostream& os, const std::vector<double>& times, const std::vector<MomentSequence>& m);
/// Reads the moments layout. The truncation order is the largest |k| present; every
/// (multi-index, component) up to it must appear exactly once.
[[nodiscard]] MomentSequence read_moments_csv(std::istream& is, const std::string& source = "<stream>");
[[nodiscard]] MomentSequence load_moments_csv(const std::string& path);

/// Header `beta_1..beta_d,x_1..x_n`.
void write_profile_csv(std::ostream& os, const ParameterGrid& grid, const EnsembleProfile& profile);
/// Infers a uniform midpoint grid from the β columns: each axis must be strictly increasing
/// with constant spacing h, and the box is [β_first − h/2, β_last + h/2].
[[nodiscard]] std::pair<ParameterGrid, EnsembleProfile> read_profile_csv(std::istream& is,
                                                                         const std::string& source = "<stream>");
[[nodiscard]] std::pair<ParameterGrid, EnsembleProfile> load_profile_csv(const std::string& path);

/// Header `time,node_index,beta_1..beta_d,x_1..x_n,u_1..u_l`.
void write_trajectory_csv(std::ostream& os, const ScenarioResult& result);

/// Writes every artifact of a scenario run into dir (created if missing) and returns the
/// written paths; the last entry is manifest.json.
std::vector<std::string> emit_csv(const ScenarioResult& result, const std::string& dir,
                                  const std::string& config_json = {});

} // namespace moment_ensemble
