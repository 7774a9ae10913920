#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hetcycle {

/// Data of the two hyperbolic periodic orbits C1, C2 and their isolating blocks.
///
/// E and C are the expansion and contraction Floquet exponents, omega the
/// angular speeds, period the minimal periods. `eps` is the half-width of the
/// isolating blocks; every section formula in the library carries it
/// explicitly, and with the default eps = 1 they reduce to the rescaled form.
struct CycleParams {
  double E1 = 1.0;
  double C1 = 2.0;
  double E2 = 1.0;
  double C2 = 2.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double period1 = 6.283185307179586;
  double period2 = 6.283185307179586;
  double eps = 1.0;
};

/// Linear global maps Out(C1) -> In(C2) (diag(a, b)) and Out(C2) -> In(C1)
/// (diag(c, d)), together with the constant transit times s1 (C2 -> C1) and
/// s2 (C1 -> C2).
struct TransitionParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// A complete piecewise system: both orbits plus the connecting maps.
struct System {
  CycleParams cycle;
  TransitionParams trans;
};

struct DerivedConstants {
  double R1 = 0.0;
  double R2 = 0.0;
  double gamma1 = 0.0;  // C1 / E2
  double gamma2 = 0.0;  // C2 / E1
  double delta1 = 0.0;  // C1 / E1
  double delta2 = 0.0;  // C2 / E2
  double delta = 0.0;   // delta1 * delta2 == gamma1 * gamma2
  double tau1 = 0.0;    // (1 + gamma1) / E1
  double tau2 = 0.0;    // (1 + gamma2) / E2
};

using NamedValues = std::vector<std::pair<std::string, double>>;

/// The eight conjugacy invariants in closed form.
struct InvariantSet {
  double period1 = 0.0;
  double period2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double mix1 = 0.0;       // omega1 + gamma1 * omega2
  double mix2 = 0.0;       // omega2 + gamma2 * omega1
  double logcomb1 = 0.0;   // -(1/E1) log d + (s1 - gamma1 s2)
  double logcomb2 = 0.0;   // -(1/E2) log b + (s2 - gamma2 s1)

  [[nodiscard]] NamedValues fields() const;
};

/// Constants that the hitting-time balance identities converge to.
///
/// These are the limits read off the time sequences:
///   odd_leg     = -(1/E1) log d + (s1 - gamma2 s2)
///   even_leg    = -(1/E2) log b + (s2 - gamma1 s1)
///   full_return = -tau1 log d - tau2 log b + (s1 + s2)(1 - delta)
/// and full_return == (1 + gamma1) odd_leg + (1 + gamma2) even_leg.
struct AsymptoticConstants {
  double odd_leg = 0.0;
  double even_leg = 0.0;
  double full_return = 0.0;

  [[nodiscard]] NamedValues fields() const;
};

/// Invariants of an attracting homoclinic cycle to a single periodic orbit.
struct HomoclinicInvariantSet {
  double period1 = 0.0;
  double gamma1 = 0.0;
  double omega1 = 0.0;
  double logcomb = 0.0;  // -(1/E1) log b + s1 (1 - gamma1)
};

struct HomoclinicParams {
  double E1 = 1.0;
  double C1 = 2.0;
  double omega1 = 1.0;
  double period1 = 6.283185307179586;
  double b = 1.0;
  double s1 = 0.0;
};

/// Lists every violated hypothesis; an empty list means the parameters are
/// admissible. With `strict`, the contraction dominance C_j > E_j is checked
/// as well (the lifted Bowen example is the standard case that needs it off).
std::vector<std::string> validate(const CycleParams& cycle, const TransitionParams& trans,
                                  bool strict = true);

DerivedConstants derive_constants(const CycleParams& cycle);

InvariantSet invariants_closed_form(const CycleParams& cycle, const TransitionParams& trans);

AsymptoticConstants asymptotic_constants(const CycleParams& cycle, const TransitionParams& trans);

HomoclinicInvariantSet homoclinic_invariants(const HomoclinicParams& params);

}  // namespace hetcycle
