#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hetcycle/piecewise.hpp"

namespace hetcycle {

// Bowen's planar system, its dissipative perturbation, the rescaled half-plane
// form in (x, r) with y + 1 = r^2, and its lift by rotation to (x, r1, r2).
enum class Variant { Conservative, Perturbed, HalfPlane, Lifted };

using State = std::vector<double>;

struct BowenParams {
  double epsilon_pert = 0.1;
  double omega = 1.0;
};

struct PlanarState {
  double x = 0.0;
  double y = 0.0;
};

struct LiftState {
  double x = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;

  [[nodiscard]] double r() const;
  [[nodiscard]] State as_state() const { return {x, r1, r2}; }
};

/// 2 for the planar variants, 3 for the lifted one.
std::size_t dimension(Variant v);
const char* variant_name(Variant v);

/// Vector field. Throws DomainError on a state of the wrong dimension.
State rhs(Variant v, const State& s, const BowenParams& p);
void rhs_into(Variant v, const State& s, State& dsdt, const BowenParams& p);

/// Jacobian of the lifted field, row-major 3x3.
std::vector<double> lifted_jacobian(const State& s, const BowenParams& p);

/// v(x, y) = (x^2/2)(1 - x^2/2) + y^2/2.
double first_integral(double x, double y);

/// Lift (x, r) at angle theta. Throws DomainError for r < 0.
LiftState lift_state(double x, double r, double theta);

struct Projection {
  double x = 0.0;
  double r = 0.0;
  double theta = 0.0;
  bool theta_defined = true;  // false on the axis r1 = r2 = 0
};

Projection project_state(const LiftState& s);

/// Scalar event function with sign-change semantics. `direction` selects
/// crossings where g increases (+1), decreases (-1) or either (0). `window`,
/// when set, marks whether a located crossing lies inside the section proper.
struct SectionSpec {
  std::string id;
  std::function<double(const State&)> g;
  int direction = 0;
  std::function<bool(const State&)> window;
};

struct Event {
  double t = 0.0;
  State state;
  std::string section;
  int direction = 0;
  bool in_window = true;
};

struct IntegrateControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.05;
  double event_tol = 1e-10;
};

/// Accepted steps of the integrator plus located section crossings.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Event> events;
  bool failed = false;
  std::string failure;
};

using StopPredicate = std::function<bool(const Trajectory&)>;

/// Dormand-Prince 5(4) dense-output integration on [0, t_end]. Crossings are
/// located on the interpolant to |g| <= event_tol. On step-size underflow or
/// a non-finite state the partial trajectory is returned with `failed` set.
/// Integration also stops once `stop` (checked after every step) returns true.
/// Throws DomainError on non-positive t_end or tolerances.
Trajectory integrate(Variant v, const State& s0, double t_end, const IntegrateControl& control,
                     const BowenParams& p, const std::vector<SectionSpec>& sections = {},
                     const StopPredicate& stop = {});

/// Section geometry of the example: offset eps_hat from the saddles, window K eps_hat.
struct SectionConfig {
  double eps_hat = 0.05;
  double K = 2.0;
};

// Planar sections of the perturbed system.
SectionSpec out_p_plus(const SectionConfig& c);   // x = 1 - eps_hat, 0 <= y <= K eps_hat
SectionSpec in_p_minus(const SectionConfig& c);   // x = -1 + eps_hat, 0 <= y <= K eps_hat
SectionSpec out_p_minus(const SectionConfig& c);  // x = -1 + eps_hat, -K eps_hat <= y <= 0
SectionSpec in_p_plus(const SectionConfig& c);    // x = 1 - eps_hat, -K eps_hat <= y <= 0

// Their lifts: r^2 in [1, 1 + K eps_hat] on the upper connection, [1 - K eps_hat, 1] on the lower.
SectionSpec out_c1(const SectionConfig& c);
SectionSpec in_c2(const SectionConfig& c);
SectionSpec out_c2(const SectionConfig& c);
SectionSpec in_c1(const SectionConfig& c);
std::vector<SectionSpec> lifted_sections(const SectionConfig& c);

/// Unwrapped atan2(r2, r1) along the stored samples of a lifted trajectory.
std::vector<double> unwrap_angles(const Trajectory& traj);

struct FloquetEstimate {
  double expansion = 0.0;    // log|mu_u| / period, per unit of the planar clock
  double contraction = 0.0;  // log|mu_s| / period, same normalisation
  double trivial_log = 0.0;  // log of the multiplier along the flow direction
  double period = 0.0;
  double mu_unstable = 0.0;
};

/// Integrates the variational equations of the lifted field once around C1
/// (orbit = 1, x = 1) or C2 (orbit = 2, x = -1). The rescaled field runs 2r^2
/// times faster than the planar one, so rates are divided by 2 R^2 = 2.
/// Throws NumericError when the monodromy matrix is not finite.
FloquetEstimate floquet_estimate(int orbit, const BowenParams& p, double rel_tol = 1e-12);

/// Lifted start on the line x = 0 at energy 1/4 - deficit, on the upper
/// connection (heading for C2), at angle theta.
LiftState bowen_start(double deficit, double theta = 0.0);

struct BowenRecord {
  HittingRecord record;
  Trajectory trajectory;
  double t_first = 0.0;  // absolute time of the first Out(C2) crossing
};

/// Integrates the lifted field from `start` and collects n Out crossings after
/// the first Out(C2) one. Times are shifted so that t_0 = 0; legs are measured
/// Out-to-In transit times; points are (rho, theta, z) = (r, unwrapped angle, x).
/// Throws DomainError if the crossings stop alternating or leave their
/// windows, NumericError if the integration fails or runs out of time.
BowenRecord bowen_hitting_record(const BowenParams& p, const SectionConfig& sections,
                                 const LiftState& start, int n,
                                 const IntegrateControl& control = {}, double t_max = 1e5);

}  // namespace hetcycle
