#include "hetcycle/ode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "hetcycle/error.hpp"

namespace hetcycle {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double potential(double x) { return 0.5 * x * x * (1.0 - 0.5 * x * x); }

void check_dimension(Variant v, const State& s) {
  if (s.size() != dimension(v)) {
    throw DomainError(std::string("state dimension ") + std::to_string(s.size()) +
                      " does not match variant " + variant_name(v) + " (expects " +
                      std::to_string(dimension(v)) + ")");
  }
}

bool all_finite(const State& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

int crossing(double g0, double g1) {
  if (g0 < 0.0 && g1 >= 0.0) return 1;
  if (g0 > 0.0 && g1 <= 0.0) return -1;
  return 0;
}

// Illinois variant of regula falsi on the dense-output interpolant.
template <class Dense>
Event locate(const Dense& dense, const SectionSpec& sec, double ta, double ga, double tb,
             double gb, double tol, std::size_t dim) {
  State x(dim);
  double t = tb;
  double g = gb;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    t = (ta * gb - tb * ga) / (gb - ga);
    if (!(t > ta && t < tb)) t = 0.5 * (ta + tb);
    dense.calc_state(t, x);
    g = sec.g(x);
    if (std::abs(g) <= tol) break;
    if ((g < 0.0) == (ga < 0.0)) {
      ta = t;
      ga = g;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      tb = t;
      gb = g;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
    if (tb - ta <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      break;
    }
  }
  Event ev;
  ev.t = t;
  dense.calc_state(t, x);
  ev.state = x;
  ev.section = sec.id;
  ev.in_window = !sec.window || sec.window(x);
  return ev;
}

SectionSpec make_section(std::string id, double level, int direction,
                         std::function<bool(const State&)> window) {
  SectionSpec s;
  s.id = std::move(id);
  s.g = [level](const State& x) { return x[0] - level; };
  s.direction = direction;
  s.window = std::move(window);
  return s;
}

double radius_sq(const State& s) { return s[1] * s[1] + s[2] * s[2]; }

}  // namespace

double LiftState::r() const { return std::hypot(r1, r2); }

std::size_t dimension(Variant v) { return v == Variant::Lifted ? 3 : 2; }

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Conservative: return "conservative";
    case Variant::Perturbed: return "perturbed";
    case Variant::HalfPlane: return "half-plane";
    case Variant::Lifted: return "lifted";
  }
  return "unknown";
}

void rhs_into(Variant v, const State& s, State& dsdt, const BowenParams& p) {
  dsdt.resize(s.size());
  const double x = s[0];
  const double cubic = x - x * x * x;
  switch (v) {
    case Variant::Conservative:
      dsdt[0] = -s[1];
      dsdt[1] = cubic;
      return;
    case Variant::Perturbed: {
      const double y = s[1];
      dsdt[0] = -y;
      dsdt[1] = cubic - p.epsilon_pert * y * (first_integral(x, y) - 0.25);
      return;
    }
    case Variant::HalfPlane: {
      const double r = s[1];
      const double q = r * r - 1.0;
      dsdt[0] = -2.0 * r * r * q;
      dsdt[1] = r * (cubic - p.epsilon_pert * (potential(x) + 0.5 * q * q - 0.25) * q);
      return;
    }
    case Variant::Lifted: {
      const double q = radius_sq(s) - 1.0;
      const double F = cubic - p.epsilon_pert * q * (potential(x) + 0.5 * q * q - 0.25);
      dsdt[0] = -2.0 * (q + 1.0) * q;
      dsdt[1] = s[1] * F - p.omega * s[2];
      dsdt[2] = s[2] * F + p.omega * s[1];
      return;
    }
  }
}

State rhs(Variant v, const State& s, const BowenParams& p) {
  check_dimension(v, s);
  State out;
  rhs_into(v, s, out, p);
  return out;
}

std::vector<double> lifted_jacobian(const State& s, const BowenParams& p) {
  check_dimension(Variant::Lifted, s);
  const double x = s[0];
  const double r1 = s[1];
  const double r2 = s[2];
  const double rsq = radius_sq(s);
  const double q = rsq - 1.0;
  const double h = potential(x) + 0.5 * q * q - 0.25;
  const double eps = p.epsilon_pert;
  const double F = x - x * x * x - eps * q * h;
  const double Fx = 1.0 - 3.0 * x * x - eps * q * (x - x * x * x);
  // d(q h)/dq = h + q^2 and dq/dr_k = 2 r_k.
  const double Fq = -eps * (h + q * q);
  const double Fr1 = 2.0 * r1 * Fq;
  const double Fr2 = 2.0 * r2 * Fq;
  const double xq = 4.0 * (1.0 - 2.0 * rsq);
  return {0.0,     xq * r1,            xq * r2,
          r1 * Fx, F + r1 * Fr1,       r1 * Fr2 - p.omega,
          r2 * Fx, r2 * Fr1 + p.omega, F + r2 * Fr2};
}

double first_integral(double x, double y) { return potential(x) + 0.5 * y * y; }

LiftState lift_state(double x, double r, double theta) {
  if (r < 0.0) throw DomainError("lift_state needs r >= 0");
  return {x, r * std::cos(theta), r * std::sin(theta)};
}

Projection project_state(const LiftState& s) {
  Projection out;
  out.x = s.x;
  out.r = s.r();
  if (s.r1 == 0.0 && s.r2 == 0.0) {
    out.theta_defined = false;
    return out;
  }
  out.theta = std::atan2(s.r2, s.r1);
  return out;
}

Trajectory integrate(Variant v, const State& s0, double t_end, const IntegrateControl& control,
                     const BowenParams& p, const std::vector<SectionSpec>& sections,
                     const StopPredicate& stop) {
  check_dimension(v, s0);
  if (!(t_end > 0.0)) throw DomainError("integrate needs t_end > 0");
  if (!(control.rel_tol > 0.0) || !(control.abs_tol > 0.0) || !(control.max_step > 0.0) ||
      !(control.event_tol > 0.0)) {
    throw DomainError("integrate needs positive tolerances and max_step");
  }
  const std::size_t dim = s0.size();
  auto system = [&](const State& x, State& dxdt, double) { rhs_into(v, x, dxdt, p); };

  auto dense = odeint::make_dense_output(control.abs_tol, control.rel_tol, control.max_step,
                                         odeint::runge_kutta_dopri5<State>());
  dense.initialize(s0, 0.0, std::min(control.max_step, 1e-3));

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(s0);

  std::vector<double> g_prev(sections.size());
  for (std::size_t k = 0; k < sections.size(); ++k) g_prev[k] = sections[k].g(s0);

  State x(dim);
  std::vector<Event> found;
  while (true) {
    try {
      dense.do_step(system);
    } catch (const std::exception& e) {
      traj.failed = true;
      traj.failure = std::string("step-size underflow: ") + e.what();
      break;
    }
    const double t0 = dense.previous_time();
    double t1 = dense.current_time();
    const bool last = t1 >= t_end;
    if (last) {
      t1 = t_end;
      dense.calc_state(t_end, x);
    } else {
      x = dense.current_state();
    }
    if (!all_finite(x)) {
      traj.failed = true;
      traj.failure = "non-finite state at t = " + std::to_string(t1);
      break;
    }
    if (!last && dense.current_time_step() <= 1e-14 * std::max(1.0, std::abs(t1))) {
      traj.failed = true;
      traj.failure = "step-size underflow at t = " + std::to_string(t1);
      break;
    }

    found.clear();
    for (std::size_t k = 0; k < sections.size(); ++k) {
      const double g1 = sections[k].g(x);
      const int dir = crossing(g_prev[k], g1);
      if (dir != 0 && (sections[k].direction == 0 || sections[k].direction == dir)) {
        Event ev = locate(dense, sections[k], t0, g_prev[k], t1, g1, control.event_tol, dim);
        ev.direction = dir;
        found.push_back(std::move(ev));
      }
      g_prev[k] = g1;
    }
    std::stable_sort(found.begin(), found.end(),
              [](const Event& a, const Event& b) { return a.t < b.t; });
    for (auto& ev : found) traj.events.push_back(std::move(ev));

    traj.times.push_back(t1);
    traj.states.push_back(x);
    if (last) break;
    if (stop && stop(traj)) break;
  }
  return traj;
}

SectionSpec out_p_plus(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("out_p_plus", 1.0 - c.eps_hat, -1,
                      [w](const State& s) { return s[1] >= 0.0 && s[1] <= w; });
}

SectionSpec in_p_minus(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("in_p_minus", -1.0 + c.eps_hat, -1,
                      [w](const State& s) { return s[1] >= 0.0 && s[1] <= w; });
}

SectionSpec out_p_minus(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("out_p_minus", -1.0 + c.eps_hat, 1,
                      [w](const State& s) { return s[1] <= 0.0 && s[1] >= -w; });
}

SectionSpec in_p_plus(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("in_p_plus", 1.0 - c.eps_hat, 1,
                      [w](const State& s) { return s[1] <= 0.0 && s[1] >= -w; });
}

SectionSpec out_c1(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("out_c1", 1.0 - c.eps_hat, -1, [w](const State& s) {
    const double q = radius_sq(s) - 1.0;
    return q >= 0.0 && q <= w;
  });
}

SectionSpec in_c2(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("in_c2", -1.0 + c.eps_hat, -1, [w](const State& s) {
    const double q = radius_sq(s) - 1.0;
    return q >= 0.0 && q <= w;
  });
}

SectionSpec out_c2(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("out_c2", -1.0 + c.eps_hat, 1, [w](const State& s) {
    const double q = radius_sq(s) - 1.0;
    return q <= 0.0 && q >= -w;
  });
}

SectionSpec in_c1(const SectionConfig& c) {
  const double w = c.K * c.eps_hat;
  return make_section("in_c1", 1.0 - c.eps_hat, 1, [w](const State& s) {
    const double q = radius_sq(s) - 1.0;
    return q <= 0.0 && q >= -w;
  });
}

std::vector<SectionSpec> lifted_sections(const SectionConfig& c) {
  return {out_c1(c), in_c2(c), out_c2(c), in_c1(c)};
}

std::vector<double> unwrap_angles(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const State& s : traj.states) {
    if (s.size() != 3) throw DomainError("unwrap_angles needs a lifted trajectory");
    const double raw = std::atan2(s[2], s[1]);
    out.push_back(out.empty() ? raw : out.back() + std::remainder(raw - out.back(), kTwoPi));
  }
  return out;
}

FloquetEstimate floquet_estimate(int orbit, const BowenParams& p, double rel_tol) {
  if (orbit != 1 && orbit != 2) throw DomainError("orbit must be 1 (C1) or 2 (C2)");
  if (!(p.omega > 0.0)) throw DomainError("floquet_estimate needs omega > 0");
  const double period = kTwoPi / p.omega;
  const State x0 = {orbit == 1 ? 1.0 : -1.0, 1.0, 0.0};

  // C1 and C2 are known in closed form, (+-1, cos wt, sin wt). The variational
  // equations are driven by that exact orbit: a numerically integrated base
  // point would drift off the saddle orbit by ~1e-6 within one period.
  // Layout: fundamental matrix row-major (9), integral of tr J (1).
  State y(10, 0.0);
  y[0] = y[4] = y[8] = 1.0;
  const double x_orbit = x0[0];
  auto variational = [&p, x_orbit](const State& u, State& du, double t) {
    du.assign(10, 0.0);
    const State s = {x_orbit, std::cos(p.omega * t), std::sin(p.omega * t)};
    const std::vector<double> J = lifted_jacobian(s, p);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += J[3 * i + k] * u[3 * k + j];
        du[3 * i + j] = acc;
      }
    }
    du[9] = J[0] + J[4] + J[8];
  };
  odeint::integrate_adaptive(
      odeint::make_controlled(rel_tol * 1e-2, rel_tol, odeint::runge_kutta_dopri5<State>()),
      variational, y, 0.0, period, period / 1000.0);

  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M(i, j) = y[3 * i + j];
  }
  if (!M.allFinite() || !std::isfinite(y[9])) {
    throw NumericError("monodromy matrix is not finite");
  }

  State f0;
  rhs_into(Variant::Lifted, x0, f0, p);
  const Eigen::Vector3d f(f0[0], f0[1], f0[2]);
  const double trivial = (M * f).norm() / f.norm();

  Eigen::EigenSolver<Eigen::Matrix3d> es(M, false);
  double mu_u = 0.0;
  for (int i = 0; i < 3; ++i) mu_u = std::max(mu_u, std::abs(es.eigenvalues()(i)));

  // The contracting multiplier is tiny next to the others; take it from
  // det M = exp(int tr J) instead of the eigen-decomposition.
  const double log_mu_s = y[9] - std::log(mu_u) - std::log(trivial);
  const double clock = 2.0;  // 2 R^2 with R = 1

  FloquetEstimate out;
  out.period = period;
  out.mu_unstable = mu_u;
  out.trivial_log = std::log(trivial);
  out.expansion = std::log(mu_u) / period / clock;
  out.contraction = log_mu_s / period / clock;
  return out;
}

LiftState bowen_start(double deficit, double theta) {
  if (!(deficit > 0.0) || !(deficit <= 0.25)) {
    throw DomainError("energy deficit must lie in (0, 1/4]");
  }
  // On x = 0 the energy is y^2 / 2; the upper connection has y > 0, i.e. r > 1.
  const double y = std::sqrt(2.0 * (0.25 - deficit));
  return lift_state(0.0, std::sqrt(1.0 + y), theta);
}

BowenRecord bowen_hitting_record(const BowenParams& p, const SectionConfig& sections,
                                 const LiftState& start, int n, const IntegrateControl& control,
                                 double t_max) {
  if (n < 1) throw DomainError("bowen_hitting_record needs n >= 1");
  if (!(p.omega > 0.0)) throw DomainError("lifted field needs omega > 0");
  const Projection proj = project_state(start);
  if (!proj.theta_defined || proj.r <= 0.0) {
    throw DomainError("start must lie off the axis r = 0");
  }

  IntegrateControl ctl = control;
  ctl.max_step = std::min(ctl.max_step, 0.5 * M_PI / p.omega);

  // Stop once n + 1 Out crossings from the first Out(C2) on are available.
  std::size_t scanned = 0;
  int outs = -1;
  auto stop = [&](const Trajectory& tr) {
    for (; scanned < tr.events.size(); ++scanned) {
      const std::string& id = tr.events[scanned].section;
      if (outs < 0 && id == "out_c2") outs = 0;
      if (outs >= 0 && (id == "out_c1" || id == "out_c2")) ++outs;
    }
    return outs >= n + 1;
  };

  BowenRecord out;
  out.trajectory = integrate(Variant::Lifted, start.as_state(), t_max, ctl, p,
                             lifted_sections(sections), stop);
  const Trajectory& traj = out.trajectory;
  if (traj.failed) throw NumericError("lifted integration failed: " + traj.failure);

  const std::vector<double> angles = unwrap_angles(traj);
  auto angle_at = [&](const Event& ev) {
    auto it = std::upper_bound(traj.times.begin(), traj.times.end(), ev.t);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        std::distance(traj.times.begin(), it) - 1, 0));
    const double raw = std::atan2(ev.state[2], ev.state[1]);
    return angles[k] + std::remainder(raw - angles[k], kTwoPi);
  };

  auto first = std::find_if(traj.events.begin(), traj.events.end(),
                            [](const Event& e) { return e.section == "out_c2"; });
  if (first == traj.events.end()) {
    throw NumericError("no Out(C2) crossing before t = " + std::to_string(t_max));
  }
  out.t_first = first->t;

  HittingRecord& rec = out.record;
  const char* expected[] = {"in_c1", "out_c1", "in_c2", "out_c2"};
  std::size_t phase = 0;
  double t_in = 0.0;
  for (auto it = first; it != traj.events.end() && rec.t.size() < static_cast<std::size_t>(n) + 1;
       ++it) {
    const Event& ev = *it;
    if (!ev.in_window) {
      throw DomainError("trajectory left the window of section " + ev.section + " at t = " +
                        std::to_string(ev.t));
    }
    const bool is_out = ev.section == "out_c1" || ev.section == "out_c2";
    if (it != first) {
      if (ev.section != expected[phase]) {
        throw DomainError("section crossings out of order: expected " +
                          std::string(expected[phase]) + ", got " + ev.section + " at t = " +
                          std::to_string(ev.t));
      }
      phase = (phase + 1) % 4;
    }
    if (!is_out) {
      t_in = ev.t;
      continue;
    }
    const double r = std::sqrt(radius_sq(ev.state));
    CylPoint pt{r, angle_at(ev), ev.state[0], ev.section == "out_c1" ? 1 : 2};
    rec.t.push_back(ev.t - out.t_first);
    rec.points.push_back(pt);
    rec.log_offset.push_back(std::log(std::abs(r - 1.0)));
    rec.legs.push_back(rec.t.size() == 1 ? 0.0 : t_in - (out.t_first + rec.t[rec.t.size() - 2]));
    rec.branch.push_back(r < 1.0 ? -1 : 1);
  }
  if (rec.t.size() < static_cast<std::size_t>(n) + 1) {
    throw NumericError("only " + std::to_string(rec.hits()) + " hits collected before t = " +
                       std::to_string(t_max));
  }
  return out;
}

}  // namespace hetcycle
