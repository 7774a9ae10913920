#pragma once

#include <vector>

#include "hetcycle/estimator.hpp"
#include "hetcycle/model.hpp"
#include "hetcycle/piecewise.hpp"

namespace hetcycle {

/// Deviations of a record from the exact return recursion
///   J_i = (t_{2i+2} - t_{2i}) - delta (t_{2i} - t_{2i-2}) - K,   i >= 1,
/// with K = -tau1 log d - tau2 log b + (1 - delta)(s1 + s2).
struct JTerms {
  LimitSequence J;             // first_index == 1
  double K = 0.0;
  double weighted_sum = 0.0;   // sum_i i |J_i|
  double scaled_sum = 0.0;     // sum_i |J_i| / delta^i (meaningful only if delta > 1)
  bool degenerate = false;     // delta <= 1: the scaled series need not converge
};

JTerms j_terms(const HittingRecord& rec, const CycleParams& cycle, const TransitionParams& trans);

/// Idealized hitting times satisfying the return recursion exactly.
///
/// Ttilde[i] = ttilde[2i+2] - ttilde[2i] obeys Ttilde[i] = delta Ttilde[i-1] + K,
/// ttilde[0] = 0, and the odd entries are fixed by the even-leg balance.
/// `T0tilde` is the limit of the back-solved initial return time and
/// `even_offset` the observed t_{2m} - ttilde_{2m} at the last even index.
struct AdjustedTimes {
  std::vector<double> ttilde;
  std::vector<double> Ttilde;
  double T0tilde = 0.0;
  LimitSequence J;
  LimitSequence T0_partial;  // back-solved Ttilde_0^{(i)}, i >= 0
  double even_offset = 0.0;
};

/// Throws DomainError when delta <= 1 or the record has fewer than four hits.
AdjustedTimes adjusted_times(const HittingRecord& rec, const CycleParams& cycle,
                             const TransitionParams& trans);

/// Point of Out+(C2) of system g whose hits reproduce the adjusted times.
///
/// The radial offset inverts the first-leg time. Hitting times carry no
/// angular information, so the angle is the one for which the average
/// spinning over the first return (or over the first odd return when a == 1)
/// equals its asymptotic value exactly; with a == c == 1 every angle
/// qualifies and `theta_fallback` is used.
/// Throws DomainError when the recovered offset exceeds the section width.
OutSeed recover_seed(const AdjustedTimes& at, const System& g, int branch, double theta_fallback);
CylPoint recover_point(const AdjustedTimes& at, const System& g, int branch,
                       double theta_fallback);

struct ConjugacyReport {
  CylPoint Q;
  std::vector<double> discrepancies;  // |t_i(Q; g) - ttilde_i(P; f)|
  double max = 0.0;
  bool pass = false;
  double tolerance = 0.0;
};

struct ConjugacyOptions {
  double tolerance = 1e-6;
  /// Invariant comparison threshold (relative, floored at 1).
  double invariant_tolerance = 1e-12;
  /// Allows f and g to differ in the angle multipliers a, c. Experimental:
  /// a and c are not among the invariants and nothing is asserted then.
  bool allow_angular_mismatch = false;
};

/// Lists the invariant fields on which f and g differ (empty when they agree).
std::vector<std::string> invariant_mismatches(const System& f, const System& g,
                                              double tolerance = 1e-12);

/// Maps the f-orbit recorded in `record_f` to a point Q_P of g and compares
/// g's hitting times from Q_P with the adjusted times of the record.
/// Throws InvariantMismatch listing the differing fields.
ConjugacyReport conjugate_record(const HittingRecord& record_f, const System& f, const System& g,
                                 const ConjugacyOptions& options = {});

/// Simulates n hits of P under f, then runs conjugate_record.
ConjugacyReport build_conjugacy(const System& f, const System& g, const CylPoint& P, int n,
                                const ConjugacyOptions& options = {});

}  // namespace hetcycle
