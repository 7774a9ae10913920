#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "hetcycle/conjugacy.hpp"
#include "hetcycle/estimator.hpp"
#include "hetcycle/model.hpp"
#include "hetcycle/ode.hpp"
#include "hetcycle/piecewise.hpp"

namespace hetcycle {

using Json = nlohmann::json;

struct BowenConfig {
  BowenParams params;
  SectionConfig sections;
  IntegrateControl control;
};

struct StartPoint {
  double rho = 0.0;
  double theta = 0.0;
};

/// Contents of a configuration file:
///   {"cycle": {...}, "transition": {...}, "bowen": {...}, "start": {"rho", "theta"}}
/// Every section is optional and missing fields keep their defaults.
struct FileConfig {
  System system;
  std::optional<BowenConfig> bowen;
  std::optional<StartPoint> start;
};

/// Throws ConfigError naming the offending field on unknown fields, wrong
/// types or non-finite numbers.
FileConfig parse_config(const Json& j);
FileConfig load_config(const std::string& path);

/// "{:.17g}" formatting used for every number written to CSV.
std::string num(double v);

std::string record_csv(const HittingRecord& rec);
Json record_json(const HittingRecord& rec);

Json point_json(const CylPoint& p);
Json sequence_json(const LimitSequence& s);
Json ratios_json(const RatioEstimates& r);
Json estimates_json(const InvariantEstimates& e);
Json named_json(const NamedValues& values);
Json report_json(const ConjugacyReport& r);
Json floquet_json(const FloquetEstimate& f);

std::string birkhoff_csv(const BirkhoffSeries& s);
/// `t,x,r1,r2` for lifted trajectories, `t,x,y` (or `t,x,r`) for planar ones.
std::string trajectory_csv(const Trajectory& traj, Variant v);
std::string events_csv(const Trajectory& traj);

/// Writes text to a file, throwing Error when the file cannot be written.
void write_text(const std::string& path, const std::string& text);
/// Pretty-printed JSON with sorted keys and a trailing newline.
void write_json(const std::string& path, const Json& j);

}  // namespace hetcycle
