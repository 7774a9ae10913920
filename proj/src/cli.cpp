#include "hetcycle/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "hetcycle/conjugacy.hpp"
#include "hetcycle/error.hpp"
#include "hetcycle/estimator.hpp"
#include "hetcycle/io.hpp"
#include "hetcycle/model.hpp"
#include "hetcycle/ode.hpp"
#include "hetcycle/piecewise.hpp"

namespace hetcycle {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kModes = {"simulate", "invariants", "conjugacy", "bowen",
                                         "historic"};

// Uniform double in [0, 1) from the top 53 bits; spelled out so the stream
// does not depend on the standard library's distribution implementation.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

std::string path_in(const RunConfig& cfg, const char* name) {
  return (fs::path(cfg.out) / name).string();
}

int hits(const RunConfig& cfg) { return cfg.n > 0 ? cfg.n : default_hits(cfg.mode); }
double tolerance(const RunConfig& cfg) {
  return cfg.tol > 0.0 ? cfg.tol : default_tolerance(cfg.mode);
}

FileConfig config_or_default(const std::string& path) {
  return path.empty() ? FileConfig{} : load_config(path);
}

// Start on Out+(C2): the configured one, or an offset in (0.05, 0.95) eps and
// an angle in [0, 2 pi) drawn from the seed.
CylPoint start_point(const FileConfig& fc, Uniform& uni) {
  const DerivedConstants k = derive_constants(fc.system.cycle);
  const double eps = fc.system.cycle.eps;
  if (fc.start) return {fc.start->rho, fc.start->theta, eps, 2};
  const double u = 0.05 + 0.9 * uni();
  const double theta = 2.0 * M_PI * uni();
  return {k.R2 + u * eps, theta, eps, 2};
}

void warn_strict(const System& sys, const std::string& label) {
  for (const auto& msg : validate(sys.cycle, sys.trans, true)) {
    spdlog::warn("{}: {}", label, msg);
  }
}

int run_simulate(const RunConfig& cfg) {
  const FileConfig fc = load_config(cfg.config);
  warn_strict(fc.system, cfg.config);
  Uniform uni(cfg.seed);
  const HittingRecord rec = hitting_sequence(start_point(fc, uni), hits(cfg), fc.system);
  if (rec.truncated) spdlog::warn("record truncated after {} hits", rec.hits());
  write_text(path_in(cfg, "record.csv"), record_csv(rec));
  write_json(path_in(cfg, "record.json"), record_json(rec));
  spdlog::info("simulated {} hits", rec.hits());
  return kExitOk;
}

int run_invariants(const RunConfig& cfg) {
  const FileConfig fc = load_config(cfg.config);
  const System& sys = fc.system;
  warn_strict(sys, cfg.config);
  Uniform uni(cfg.seed);
  const HittingRecord rec = hitting_sequence(start_point(fc, uni), hits(cfg), sys);
  const RatioEstimates ratios = all_limits(rec, sys.trans);
  const InvariantEstimates est = invariant_estimates(rec, ratios);

  const DerivedConstants k = derive_constants(sys.cycle);
  const InvariantSet inv = invariants_closed_form(sys.cycle, sys.trans);
  const AsymptoticConstants lim = asymptotic_constants(sys.cycle, sys.trans);

  const double g1 = ratios.gamma1_hat.final_value();
  const double g2 = ratios.gamma2_hat.final_value();
  NamedValues closed = {{"gamma1", inv.gamma1},       {"gamma2", inv.gamma2},
                        {"delta", k.delta},           {"odd_leg", lim.odd_leg},
                        {"even_leg", lim.even_leg},   {"full_return", lim.full_return},
                        {"logcomb1", inv.logcomb1},   {"logcomb2", inv.logcomb2}};
  NamedValues estimated = {
      {"gamma1", g1},
      {"gamma2", g2},
      {"delta", ratios.delta_hat.final_value()},
      {"odd_leg", est.odd_leg_hat},
      {"even_leg", est.even_leg_hat},
      {"full_return", est.full_return_hat},
      // The invariant log combinations differ from the balance constants by
      // (gamma2 - gamma1) s2 and (gamma1 - gamma2) s1.
      {"logcomb1", est.odd_leg_hat + (g2 - g1) * sys.trans.s2},
      {"logcomb2", est.even_leg_hat + (g1 - g2) * sys.trans.s1}};
  // The angular limits only settle when the transition maps do not rescale angles.
  const bool angular = std::abs(sys.trans.a - 1.0) <= 1e-12 && std::abs(sys.trans.c - 1.0) <= 1e-12;
  if (angular) {
    closed.emplace_back("mix1", inv.mix1);
    closed.emplace_back("mix2", inv.mix2);
    estimated.emplace_back("mix1", ratios.angular1_hat.final_value() * (1.0 + g1));
    estimated.emplace_back("mix2", ratios.angular2_hat.final_value() * (1.0 + g2));
  }

  const double tol = tolerance(cfg);
  Json gaps = Json::object();
  double max_gap = 0.0;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const double gap = std::abs(estimated[i].second - closed[i].second);
    gaps[closed[i].first] = gap;
    max_gap = std::max(max_gap, std::isfinite(gap) ? gap : INFINITY);
  }
  const bool pass = max_gap <= tol;
  Json report = {{"closed_form", named_json(closed)},
                 {"estimated", named_json(estimated)},
                 {"gaps", gaps},
                 {"max_gap", max_gap},
                 {"tolerance", tol},
                 {"pass", pass},
                 {"angular_compared", angular},
                 {"periods", {{"period1", inv.period1}, {"period2", inv.period2}}},
                 {"hits", rec.hits()},
                 {"estimates", estimates_json(est)}};
  write_json(path_in(cfg, "invariants.json"), report);
  if (!pass) {
    spdlog::error("invariant estimates deviate from closed form by {}", max_gap);
    return kExitMismatch;
  }
  return kExitOk;
}

int run_conjugacy(const RunConfig& cfg) {
  const FileConfig f = load_config(cfg.config);
  const FileConfig g = load_config(cfg.config2);
  Uniform uni(cfg.seed);
  ConjugacyOptions opt;
  opt.tolerance = tolerance(cfg);
  opt.allow_angular_mismatch = cfg.experimental_ac;
  if (opt.allow_angular_mismatch) spdlog::warn("a, c may differ between systems (experimental)");
  const ConjugacyReport report =
      build_conjugacy(f.system, g.system, start_point(f, uni), hits(cfg), opt);
  write_json(path_in(cfg, "conjugacy.json"), report_json(report));
  if (!report.pass) {
    spdlog::error("conjugacy check failed: max discrepancy {}", report.max);
    return kExitNumeric;
  }
  return kExitOk;
}

int run_bowen(const RunConfig& cfg) {
  const FileConfig fc = config_or_default(cfg.config);
  const BowenConfig bc = fc.bowen.value_or(BowenConfig{});
  Uniform uni(cfg.seed);

  const FloquetEstimate c1 = floquet_estimate(1, bc.params);
  const FloquetEstimate c2 = floquet_estimate(2, bc.params);
  write_json(path_in(cfg, "floquet.json"), {{"C1", floquet_json(c1)}, {"C2", floquet_json(c2)}});

  const LiftState start = bowen_start(1e-3, 2.0 * M_PI * uni());
  const BowenRecord br =
      bowen_hitting_record(bc.params, bc.sections, start, hits(cfg), bc.control);
  write_text(path_in(cfg, "trajectory.csv"), trajectory_csv(br.trajectory, Variant::Lifted));
  write_text(path_in(cfg, "events.csv"), events_csv(br.trajectory));
  write_text(path_in(cfg, "record.csv"), record_csv(br.record));

  // The lift transports angles unchanged across the connections.
  const TransitionParams unit{};
  const RatioEstimates ratios = all_limits(br.record, unit);
  const InvariantEstimates est = invariant_estimates(br.record, ratios);
  Json report = estimates_json(est);
  report["t_first"] = br.t_first;
  report["omega"] = bc.params.omega;
  write_json(path_in(cfg, "estimates.json"), report);
  spdlog::info("Floquet exponents C1: {:.6f} {:.6f}", c1.expansion, c1.contraction);
  return kExitOk;
}

int run_historic(const RunConfig& cfg) {
  const FileConfig fc = load_config(cfg.config);
  const System& sys = fc.system;
  warn_strict(sys, cfg.config);
  Uniform uni(cfg.seed);
  const HittingRecord rec = hitting_sequence(start_point(fc, uni), hits(cfg), sys);
  const PiecewiseOrbit orbit(rec, sys);
  const DerivedConstants k = derive_constants(sys.cycle);
  const Block1Bump bump(k.R1, sys.cycle.eps);
  const double horizon = orbit.horizon();
  const BirkhoffSeries series = birkhoff_series([&orbit](double t) { return orbit.state_at(t); },
                                                bump, horizon, horizon / 2e5, 20);
  write_text(path_in(cfg, "birkhoff.csv"), birkhoff_csv(series));
  const double burn_in = horizon / 100.0;
  write_json(path_in(cfg, "historic.json"), {{"horizon", horizon},
                                             {"hits", rec.hits()},
                                             {"burn_in", burn_in},
                                             {"oscillation", series.oscillation(burn_in)}});
  return kExitOk;
}

spdlog::level::level_enum log_level() {
  const char* env = std::getenv("HETCYCLE_LOG");
  if (env == nullptr || *env == '\0') return spdlog::level::warn;
  const auto level = spdlog::level::from_str(env);
  // from_str maps unknown names to "off"; keep that only when asked for.
  if (level == spdlog::level::off && std::string(env) != "off") return spdlog::level::warn;
  return level;
}

}  // namespace

int default_hits(const std::string& mode) {
  if (mode == "conjugacy") return 15;
  if (mode == "bowen") return 40;
  if (mode == "historic") return 30;
  return 60;
}

double default_tolerance(const std::string& mode) {
  if (mode == "invariants") return 1e-9;
  return 1e-6;
}

void check_run_config(const RunConfig& cfg) {
  if (std::find(kModes.begin(), kModes.end(), cfg.mode) == kModes.end()) {
    throw ConfigError("unknown mode '" + cfg.mode + "'");
  }
  if (cfg.n < 0) throw ConfigError("--n must be >= 1");
  if (cfg.tol < 0.0 || !std::isfinite(cfg.tol)) throw ConfigError("--tol must be > 0");
  if (cfg.mode != "bowen" && cfg.config.empty()) {
    throw ConfigError("mode '" + cfg.mode + "' needs --config");
  }
  if (cfg.mode == "conjugacy" && cfg.config2.empty()) {
    throw ConfigError("mode 'conjugacy' needs --config2");
  }
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) {
    throw ConfigError("output directory '" + cfg.out + "' cannot be created");
  }
  const fs::path probe = fs::path(cfg.out) / ".hetcycle-write-test";
  {
    std::ofstream test(probe);
    if (!test) throw ConfigError("output directory '" + cfg.out + "' is not writable");
  }
  fs::remove(probe, ec);
}

int run(const RunConfig& cfg) {
  check_run_config(cfg);
  if (cfg.mode == "simulate") return run_simulate(cfg);
  if (cfg.mode == "invariants") return run_invariants(cfg);
  if (cfg.mode == "conjugacy") return run_conjugacy(cfg);
  if (cfg.mode == "bowen") return run_bowen(cfg);
  return run_historic(cfg);
}

int main_entry(int argc, char** argv) {
  auto sink = std::make_shared<spdlog::sinks::stderr_sink_st>();
  spdlog::set_default_logger(std::make_shared<spdlog::logger>("hetcycle", sink));
  spdlog::set_level(log_level());

  RunConfig cfg;
  CLI::App app{"Simulation and invariant extraction for heteroclinic cycles between periodic orbits"};
  app.add_option("--mode", cfg.mode, "simulate | invariants | conjugacy | bowen | historic")
      ->required();
  app.add_option("--config", cfg.config, "JSON parameter file");
  app.add_option("--config2", cfg.config2, "second parameter file (conjugacy)");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--n", cfg.n, "number of hits (default depends on mode)");
  app.add_option("--tol", cfg.tol, "tolerance (default depends on mode)");
  app.add_option("--seed", cfg.seed, "seed for randomized initial conditions");
  app.add_flag("--experimental-ac", cfg.experimental_ac,
               "conjugacy: allow the systems to differ in a and c");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.count("--n") > 0 && cfg.n < 1) throw ConfigError("--n must be >= 1");
    if (app.count("--tol") > 0 && !(cfg.tol > 0.0)) throw ConfigError("--tol must be > 0");
    return run(cfg);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const InvariantMismatch& e) {
    spdlog::error("{}", e.what());
    return kExitMismatch;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitNumeric;
  }
}

}  // namespace hetcycle
