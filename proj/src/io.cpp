#include "hetcycle/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "hetcycle/error.hpp"

namespace hetcycle {

namespace {

using FieldMap = std::map<std::string, double*>;

void read_fields(const Json& j, const std::string& section, const FieldMap& fields) {
  if (!j.is_object()) throw ConfigError("'" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string name = section + "." + key;
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown field '" + name + "'");
    if (!value.is_number()) throw ConfigError("field '" + name + "' must be a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) throw ConfigError("field '" + name + "' must be finite");
    *it->second = v;
  }
}

}  // namespace

FileConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  FileConfig cfg;
  CycleParams& cy = cfg.system.cycle;
  TransitionParams& tr = cfg.system.trans;
  for (const auto& [key, value] : j.items()) {
    if (key == "cycle") {
      read_fields(value, key,
                  {{"E1", &cy.E1}, {"C1", &cy.C1}, {"E2", &cy.E2}, {"C2", &cy.C2},
                   {"omega1", &cy.omega1}, {"omega2", &cy.omega2}, {"period1", &cy.period1},
                   {"period2", &cy.period2}, {"eps", &cy.eps}});
    } else if (key == "transition") {
      read_fields(value, key,
                  {{"a", &tr.a}, {"b", &tr.b}, {"c", &tr.c}, {"d", &tr.d}, {"s1", &tr.s1},
                   {"s2", &tr.s2}});
    } else if (key == "bowen") {
      BowenConfig b;
      read_fields(value, key,
                  {{"epsilon_pert", &b.params.epsilon_pert}, {"omega", &b.params.omega},
                   {"eps_hat", &b.sections.eps_hat}, {"K", &b.sections.K},
                   {"rel_tol", &b.control.rel_tol}, {"abs_tol", &b.control.abs_tol}});
      if (b.params.epsilon_pert < 0.0) throw ConfigError("field 'bowen.epsilon_pert' must be >= 0");
      if (!(b.params.omega > 0.0)) throw ConfigError("field 'bowen.omega' must be > 0");
      if (!(b.sections.eps_hat > 0.0) || !(b.sections.eps_hat <= 1.0)) {
        throw ConfigError("field 'bowen.eps_hat' must lie in (0, 1]");
      }
      if (!(b.sections.K > 0.0)) throw ConfigError("field 'bowen.K' must be > 0");
      if (!(b.control.rel_tol > 0.0)) throw ConfigError("field 'bowen.rel_tol' must be > 0");
      if (!(b.control.abs_tol > 0.0)) throw ConfigError("field 'bowen.abs_tol' must be > 0");
      cfg.bowen = b;
    } else if (key == "start") {
      StartPoint s;
      read_fields(value, key, {{"rho", &s.rho}, {"theta", &s.theta}});
      cfg.start = s;
    } else {
      throw ConfigError("unknown field '" + key + "'");
    }
  }
  const std::vector<std::string> problems = validate(cy, tr, false);
  if (!problems.empty()) {
    std::string msg = "invalid parameters:";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw ConfigError(msg);
  }
  return cfg;
}

FileConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string record_csv(const HittingRecord& rec) {
  std::string out = "i,t,rho,theta_unwrapped,z,block,leg_time,branch\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const CylPoint& p = rec.points[i];
    out += fmt::format("{},{},{},{},{},{},{},{}\n", i, num(rec.t[i]), num(p.rho), num(p.theta),
                       num(p.z), p.block, num(rec.legs[i]), rec.branch[i]);
  }
  return out;
}

Json record_json(const HittingRecord& rec) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const CylPoint& p = rec.points[i];
    rows.push_back({{"i", i},
                    {"t", rec.t[i]},
                    {"rho", p.rho},
                    {"theta_unwrapped", p.theta},
                    {"z", p.z},
                    {"block", p.block},
                    {"leg_time", rec.legs[i]},
                    {"branch", rec.branch[i]}});
  }
  return {{"hits", rows}, {"truncated", rec.truncated}};
}

Json point_json(const CylPoint& p) {
  return {{"rho", p.rho}, {"theta", p.theta}, {"z", p.z}, {"block", p.block}};
}

Json sequence_json(const LimitSequence& s) {
  Json j = {{"first_index", s.first_index}, {"values", s.values}};
  if (!s.empty()) {
    j["final"] = s.final_value();
    const double g = s.gap();
    j["gap"] = std::isfinite(g) ? Json(g) : Json(nullptr);
  }
  return j;
}

Json ratios_json(const RatioEstimates& r) {
  Json j = Json::object();
  auto put = [&j](const char* name, const LimitSequence& s) {
    if (s.empty()) return;
    j[name] = s.final_value();
    const double g = s.gap();
    j[std::string(name) + "_gap"] = std::isfinite(g) ? Json(g) : Json(nullptr);
    j["sequences"][name] = s.values;
  };
  put("gamma1_hat", r.gamma1_hat);
  put("gamma2_hat", r.gamma2_hat);
  put("delta_hat", r.delta_hat);
  put("angular1_hat", r.angular1_hat);
  put("angular2_hat", r.angular2_hat);
  return j;
}

Json estimates_json(const InvariantEstimates& e) {
  return {{"odd_leg_hat", e.odd_leg_hat},
          {"even_leg_hat", e.even_leg_hat},
          {"full_return_hat", e.full_return_hat},
          {"gamma1_used", e.gamma1_used},
          {"gamma2_used", e.gamma2_used},
          {"odd_leg", sequence_json(e.odd_leg)},
          {"even_leg", sequence_json(e.even_leg)},
          {"full_return", sequence_json(e.full_return)},
          {"ratios", ratios_json(e.ratios)}};
}

Json named_json(const NamedValues& values) {
  Json j = Json::object();
  for (const auto& [name, v] : values) j[name] = v;
  return j;
}

Json report_json(const ConjugacyReport& r) {
  return {{"Q", point_json(r.Q)},
          {"discrepancies", r.discrepancies},
          {"max", r.max},
          {"pass", r.pass},
          {"tolerance", r.tolerance}};
}

Json floquet_json(const FloquetEstimate& f) {
  return {{"expansion", f.expansion},
          {"contraction", f.contraction},
          {"trivial_log", f.trivial_log},
          {"period", f.period},
          {"mu_unstable", f.mu_unstable}};
}

std::string birkhoff_csv(const BirkhoffSeries& s) {
  std::string out = "t,average\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out += num(s.times[k]) + "," + num(s.averages[k]) + "\n";
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj, Variant v) {
  std::string out;
  switch (v) {
    case Variant::Lifted: out = "t,x,r1,r2\n"; break;
    case Variant::HalfPlane: out = "t,x,r\n"; break;
    default: out = "t,x,y\n"; break;
  }
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += num(traj.times[k]);
    for (double c : traj.states[k]) out += "," + num(c);
    out += "\n";
  }
  return out;
}

std::string events_csv(const Trajectory& traj) {
  std::string out = "t,section,x,r1,r2,direction\n";
  for (const Event& e : traj.events) {
    const double r1 = e.state.size() > 1 ? e.state[1] : 0.0;
    const double r2 = e.state.size() > 2 ? e.state[2] : 0.0;
    out += fmt::format("{},{},{},{},{},{}\n", num(e.t), e.section, num(e.state[0]), num(r1),
                       num(r2), e.direction);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace hetcycle
