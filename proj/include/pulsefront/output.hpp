#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pulsefront/classify.hpp"
#include "pulsefront/config.hpp"
#include "pulsefront/eigen.hpp"
#include "pulsefront/periodic.hpp"
#include "pulsefront/simulator.hpp"

namespace pulsefront {

using Json = nlohmann::ordered_json;

/// 17 significant digits, so outputs round-trip and diff byte-exactly.
std::string format_double(double v);

/// "t,g,h,mass1,mass2,max1,max2"
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
/// snap_<n>.csv with "x,u1,u2" for the state at t = n tau before the pulse.
/// Returns the number of files written.
std::size_t write_snapshots(const Trajectory& traj, const std::filesystem::path& dir);
/// "t[,x],U1,U2" over one period, starting at t = 0+.
void write_periodic_csv(const PeriodicSolution& sol, const std::filesystem::path& path);
/// "x,phi,psi"
void write_eigenfunction_csv(const EigenResult& r, const std::filesystem::path& path);

void write_json(const Json& j, const std::filesystem::path& path);

Json to_json(const AuditReport& a);
Json to_json(const Verdict& v);
Json to_json(const PredictedVerdict& v);
Json to_json(const EigenInputs& in);
Json to_json(const EigenResult& r);
Json to_json(const GeneralizedBracket& b);
Json to_json(const VanishingCertificate& c);
Json to_json(const ThresholdResult& t);
Json to_json(const PeriodicSolution& s);
Json config_json(const RunConfig& cfg);
/// Final boundaries, record count and bound of a run.
Json trajectory_summary(const Trajectory& traj);

}  // namespace pulsefront
