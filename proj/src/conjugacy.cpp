#include "hetcycle/conjugacy.hpp"

#include <cmath>
#include <string>

#include "hetcycle/error.hpp"

namespace hetcycle {

namespace {

double return_constant(const CycleParams& cycle, const TransitionParams& trans) {
  return asymptotic_constants(cycle, trans).full_return;
}

std::vector<double> return_times(const std::vector<double>& t) {
  std::vector<double> T;
  for (std::size_t i = 0; 2 * i + 2 < t.size(); ++i) T.push_back(t[2 * i + 2] - t[2 * i]);
  return T;
}

bool differs(double x, double y, double tol) {
  return std::abs(x - y) > tol * std::max(1.0, std::abs(x));
}

}  // namespace

JTerms j_terms(const HittingRecord& rec, const CycleParams& cycle, const TransitionParams& trans) {
  if (rec.hits() < 6) throw DomainError("j_terms: record too short (needs 6 hits)");
  const DerivedConstants k = derive_constants(cycle);
  const std::vector<double> T = return_times(rec.t);

  JTerms out;
  out.K = return_constant(cycle, trans);
  out.degenerate = !(k.delta > 1.0);
  out.J.first_index = 1;
  double scale = 1.0;
  for (std::size_t i = 1; i < T.size(); ++i) {
    const double J = T[i] - k.delta * T[i - 1] - out.K;
    out.J.values.push_back(J);
    scale *= k.delta;
    out.weighted_sum += static_cast<double>(i) * std::abs(J);
    out.scaled_sum += std::abs(J) / scale;
  }
  return out;
}

AdjustedTimes adjusted_times(const HittingRecord& rec, const CycleParams& cycle,
                             const TransitionParams& trans) {
  const DerivedConstants k = derive_constants(cycle);
  if (!(k.delta > 1.0)) {
    throw DomainError("adjusted-time construction requires delta > 1");
  }
  if (rec.hits() < 4) throw DomainError("adjusted_times: record too short (needs 4 hits)");

  const double K = return_constant(cycle, trans);
  const std::vector<double> T = return_times(rec.t);

  AdjustedTimes at;
  at.J.first_index = 1;
  at.T0_partial.first_index = 0;

  // Back-solving T_i = delta^i T0 + K (1 + ... + delta^{i-1}) gives the partial
  // limits T0^{(i)}; consecutive ones differ by J_i / delta^i.
  double power = 1.0;
  double geometric = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (i > 0) {
      at.J.values.push_back(T[i] - k.delta * T[i - 1] - K);
      geometric += power;
      power *= k.delta;
    }
    at.T0_partial.values.push_back((T[i] - K * geometric) / power);
  }

  const double threshold = 1e-14 * std::max(1.0, std::abs(T[0]));
  double T0 = T[0];
  power = 1.0;
  for (double J : at.J.values) {
    power *= k.delta;
    const double term = J / power;
    if (std::abs(term) < threshold) continue;
    T0 += term;
  }
  at.T0tilde = T0;

  // Even entries from the exact recursion, odd entries from the even-leg balance.
  const std::size_t count = rec.t.size();
  const std::size_t returns = count / 2 + 1;
  at.Ttilde.reserve(returns);
  at.Ttilde.push_back(T0);
  for (std::size_t i = 1; i < returns; ++i) at.Ttilde.push_back(k.delta * at.Ttilde.back() + K);

  std::vector<double> even(returns + 1, 0.0);
  for (std::size_t i = 0; i < returns; ++i) even[i + 1] = even[i] + at.Ttilde[i];

  const double even_leg_const =
      std::log(trans.b) / cycle.E2 - (trans.s2 - k.gamma1 * trans.s1);
  at.ttilde.resize(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const std::size_t i = idx / 2;
    if (idx % 2 == 0) {
      at.ttilde[idx] = even[i];
    } else {
      at.ttilde[idx] = (even[i + 1] + k.gamma1 * even[i] + even_leg_const) / (1.0 + k.gamma1);
    }
  }

  const std::size_t last_even = (count - 1) & ~static_cast<std::size_t>(1);
  at.even_offset = rec.t[last_even] - at.ttilde[last_even];
  return at;
}

OutSeed recover_seed(const AdjustedTimes& at, const System& g, int branch,
                     double theta_fallback) {
  if (at.ttilde.size() < 4) throw DomainError("recover_point needs at least three adjusted hits");
  const CycleParams& cy = g.cycle;
  const TransitionParams& tr = g.trans;
  const DerivedConstants k = derive_constants(cy);
  const auto& tt = at.ttilde;
  const double d1 = tt[1] - tt[0];
  const double d2 = tt[2] - tt[1];
  const double d3 = tt[3] - tt[2];

  if (!(d1 > tr.s1)) throw DomainError("recovered offset exceeds section width");
  OutSeed seed;
  seed.branch = branch < 0 ? -1 : 1;
  seed.log_offset = -cy.E1 * (d1 - tr.s1) - std::log(tr.d);
  if (seed.log_offset > 1e-12) throw DomainError("recovered offset exceeds section width");

  // Dwell times inside the blocks are the leg times minus the transits.
  const double dwell1 = d1 - tr.s1;
  const double dwell2 = d2 - tr.s2;
  const double dwell3 = d3 - tr.s1;
  const double spin1 = (cy.omega1 + k.gamma1 * cy.omega2) / (k.gamma1 + 1.0);
  const double spin2 = (cy.omega2 + k.gamma2 * cy.omega1) / (k.gamma2 + 1.0);
  constexpr double unit_tol = 1e-12;

  if (std::abs(tr.a - 1.0) > unit_tol) {
    // theta_2 - c theta_0 = spin1 (t2 - t0), with theta_2 = a (c theta_0 + w1 dwell1) + w2 dwell2.
    seed.theta = (spin1 * (d1 + d2) - tr.a * cy.omega1 * dwell1 - cy.omega2 * dwell2) /
                 (tr.c * (tr.a - 1.0));
  } else if (std::abs(tr.c - 1.0) > unit_tol) {
    // theta_3 - a theta_1 = spin2 (t3 - t1), with theta_3 = c (a theta_1 + w2 dwell2) + w1 dwell3.
    const double theta1 = (spin2 * (d2 + d3) - tr.c * cy.omega2 * dwell2 - cy.omega1 * dwell3) /
                          (tr.a * (tr.c - 1.0));
    seed.theta = (theta1 - cy.omega1 * dwell1) / tr.c;
  } else {
    seed.theta = theta_fallback;
  }
  return seed;
}

CylPoint recover_point(const AdjustedTimes& at, const System& g, int branch,
                       double theta_fallback) {
  const OutSeed seed = recover_seed(at, g, branch, theta_fallback);
  const DerivedConstants k = derive_constants(g.cycle);
  return {k.R2 + seed.branch * g.cycle.eps * std::exp(seed.log_offset), seed.theta, g.cycle.eps, 2};
}

std::vector<std::string> invariant_mismatches(const System& f, const System& g, double tolerance) {
  std::vector<std::string> out;
  const NamedValues inv_f = invariants_closed_form(f.cycle, f.trans).fields();
  const NamedValues inv_g = invariants_closed_form(g.cycle, g.trans).fields();
  for (std::size_t i = 0; i < inv_f.size(); ++i) {
    if (differs(inv_f[i].second, inv_g[i].second, tolerance)) out.push_back(inv_f[i].first);
  }
  const NamedValues lim_f = asymptotic_constants(f.cycle, f.trans).fields();
  const NamedValues lim_g = asymptotic_constants(g.cycle, g.trans).fields();
  for (std::size_t i = 0; i < lim_f.size(); ++i) {
    if (differs(lim_f[i].second, lim_g[i].second, tolerance)) out.push_back(lim_f[i].first);
  }
  return out;
}

namespace {

void require_compatible(const System& f, const System& g, const ConjugacyOptions& options) {
  std::vector<std::string> bad = invariant_mismatches(f, g, options.invariant_tolerance);
  if (!options.allow_angular_mismatch) {
    if (differs(f.trans.a, g.trans.a, options.invariant_tolerance)) bad.emplace_back("a");
    if (differs(f.trans.c, g.trans.c, options.invariant_tolerance)) bad.emplace_back("c");
  }
  if (!bad.empty()) {
    std::string msg = "invariant mismatch between systems:";
    for (const auto& name : bad) msg += " " + name;
    throw InvariantMismatch(msg);
  }
}

}  // namespace

ConjugacyReport conjugate_record(const HittingRecord& record_f, const System& f, const System& g,
                                 const ConjugacyOptions& options) {
  require_compatible(f, g, options);
  const AdjustedTimes at = adjusted_times(record_f, f.cycle, f.trans);
  const int branch = record_f.branch.front();
  const OutSeed seed = recover_seed(at, g, branch, record_f.points.front().theta);
  const int n = static_cast<int>(record_f.hits());
  const HittingRecord record_g = hitting_sequence(seed, n, g);

  ConjugacyReport report;
  report.Q = record_g.points.front();
  report.tolerance = options.tolerance;
  const std::size_t count = std::min(record_g.t.size(), at.ttilde.size());
  report.discrepancies.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double gap = std::abs(record_g.t[i] - at.ttilde[i]);
    report.discrepancies.push_back(gap);
    report.max = std::max(report.max, gap);
  }
  report.pass = count == at.ttilde.size() && report.max <= options.tolerance;
  return report;
}

ConjugacyReport build_conjugacy(const System& f, const System& g, const CylPoint& P, int n,
                                const ConjugacyOptions& options) {
  require_compatible(f, g, options);
  const HittingRecord record_f = hitting_sequence(P, n, f);
  return conjugate_record(record_f, f, g, options);
}

}  // namespace hetcycle
