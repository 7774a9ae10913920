#include "hetcycle/model.hpp"

#include <cmath>

namespace hetcycle {

namespace {

void require_positive(std::vector<std::string>& out, const char* name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    out.push_back(std::string(name) + " must be > 0");
  }
}

}  // namespace

NamedValues InvariantSet::fields() const {
  return {{"period1", period1}, {"period2", period2}, {"gamma1", gamma1},
          {"gamma2", gamma2},   {"mix1", mix1},       {"mix2", mix2},
          {"logcomb1", logcomb1}, {"logcomb2", logcomb2}};
}

NamedValues AsymptoticConstants::fields() const {
  return {{"odd_leg", odd_leg}, {"even_leg", even_leg}, {"full_return", full_return}};
}

std::vector<std::string> validate(const CycleParams& cycle, const TransitionParams& trans,
                                  bool strict) {
  std::vector<std::string> out;
  require_positive(out, "E1", cycle.E1);
  require_positive(out, "E2", cycle.E2);
  require_positive(out, "C1", cycle.C1);
  require_positive(out, "C2", cycle.C2);
  require_positive(out, "omega1", cycle.omega1);
  require_positive(out, "omega2", cycle.omega2);
  require_positive(out, "period1", cycle.period1);
  require_positive(out, "period2", cycle.period2);
  require_positive(out, "eps", cycle.eps);

  require_positive(out, "a", trans.a);
  require_positive(out, "c", trans.c);
  if (!(trans.b > 0.0 && trans.b <= 1.0)) out.emplace_back("b must lie in (0,1]");
  if (!(trans.d > 0.0 && trans.d <= 1.0)) out.emplace_back("d must lie in (0,1]");
  if (!(trans.s1 >= 0.0) || !std::isfinite(trans.s1)) out.emplace_back("s1 must be >= 0");
  if (!(trans.s2 >= 0.0) || !std::isfinite(trans.s2)) out.emplace_back("s2 must be >= 0");

  if (strict) {
    if (!(cycle.C1 > cycle.E1)) out.emplace_back("C1>E1 fails");
    if (!(cycle.C2 > cycle.E2)) out.emplace_back("C2>E2 fails");
  }
  return out;
}

DerivedConstants derive_constants(const CycleParams& cycle) {
  constexpr double two_pi = 2.0 * M_PI;
  DerivedConstants k;
  k.R1 = cycle.omega1 * cycle.period1 / two_pi;
  k.R2 = cycle.omega2 * cycle.period2 / two_pi;
  k.gamma1 = cycle.C1 / cycle.E2;
  k.gamma2 = cycle.C2 / cycle.E1;
  k.delta1 = cycle.C1 / cycle.E1;
  k.delta2 = cycle.C2 / cycle.E2;
  k.delta = k.gamma1 * k.gamma2;
  k.tau1 = (1.0 + k.gamma1) / cycle.E1;
  k.tau2 = (1.0 + k.gamma2) / cycle.E2;
  return k;
}

InvariantSet invariants_closed_form(const CycleParams& cycle, const TransitionParams& trans) {
  const DerivedConstants k = derive_constants(cycle);
  InvariantSet inv;
  inv.period1 = cycle.period1;
  inv.period2 = cycle.period2;
  inv.gamma1 = k.gamma1;
  inv.gamma2 = k.gamma2;
  inv.mix1 = cycle.omega1 + k.gamma1 * cycle.omega2;
  inv.mix2 = cycle.omega2 + k.gamma2 * cycle.omega1;
  inv.logcomb1 = -std::log(trans.d) / cycle.E1 + (trans.s1 - k.gamma1 * trans.s2);
  inv.logcomb2 = -std::log(trans.b) / cycle.E2 + (trans.s2 - k.gamma2 * trans.s1);
  return inv;
}

AsymptoticConstants asymptotic_constants(const CycleParams& cycle, const TransitionParams& trans) {
  const DerivedConstants k = derive_constants(cycle);
  const double log_b = std::log(trans.b);
  const double log_d = std::log(trans.d);
  AsymptoticConstants out;
  out.odd_leg = -log_d / cycle.E1 + (trans.s1 - k.gamma2 * trans.s2);
  out.even_leg = -log_b / cycle.E2 + (trans.s2 - k.gamma1 * trans.s1);
  out.full_return = -k.tau1 * log_d - k.tau2 * log_b + (trans.s1 + trans.s2) * (1.0 - k.delta);
  return out;
}

HomoclinicInvariantSet homoclinic_invariants(const HomoclinicParams& p) {
  HomoclinicInvariantSet inv;
  inv.period1 = p.period1;
  inv.gamma1 = p.C1 / p.E1;
  inv.omega1 = p.omega1;
  inv.logcomb = -std::log(p.b) / p.E1 + p.s1 * (1.0 - inv.gamma1);
  return inv;
}

}  // namespace hetcycle
