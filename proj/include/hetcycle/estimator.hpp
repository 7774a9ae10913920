#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hetcycle/error.hpp"
#include "hetcycle/model.hpp"
#include "hetcycle/piecewise.hpp"

namespace hetcycle {

/// A sequence a_i, i = first_index, first_index + 1, ..., with its last value
/// and the Cauchy gap |a_last - a_{last-1}| as convergence diagnostic.
struct LimitSequence {
  int first_index = 0;
  std::vector<double> values;
  /// Optional rounding scale of each entry (same length as values, or empty).
  std::vector<double> noise;

  [[nodiscard]] bool empty() const { return values.empty(); }
  [[nodiscard]] int last_index() const { return first_index + static_cast<int>(values.size()) - 1; }
  [[nodiscard]] double at(int i) const;
  [[nodiscard]] double final_value() const;
  [[nodiscard]] double gap() const;
  /// Index i >= first_index + 1 minimising |a_i - a_{i-1}| plus the rounding
  /// scale of both entries (first_index for sequences of length one), and the
  /// value there.
  [[nodiscard]] int plateau_index() const;
  [[nodiscard]] double plateau_value() const { return at(plateau_index()); }
};

/// Residuals (LHS - RHS) of the three hitting-time balance identities at one
/// return index i >= 1, plus the magnitude of the LHS terms so callers can
/// judge them in relative terms.
struct LemmaResidual {
  int i = 0;
  double odd = 0.0;
  double even = 0.0;
  double full = 0.0;
  double scale = 1.0;
};

struct RatioEstimates {
  LimitSequence gamma1_hat;    // (t_{2i+2}-t_{2i+1}) / (t_{2i+1}-t_{2i}),   i >= 0
  LimitSequence gamma2_hat;    // (t_{2i+1}-t_{2i})   / (t_{2i}-t_{2i-1}),   i >= 1
  LimitSequence delta_hat;     // (t_{2i+2}-t_{2i})   / (t_{2i}-t_{2i-2}),   i >= 1
  LimitSequence angular1_hat;  // (theta_{2i+2} - c theta_{2i})   / (t_{2i+2}-t_{2i}),   i >= 0
  LimitSequence angular2_hat;  // (theta_{2i+1} - a theta_{2i-1}) / (t_{2i+1}-t_{2i-1}), i >= 1
};

/// Estimates of the constants the balance identities converge to, with the
/// full sequences kept for inspection. They estimate the fields of
/// AsymptoticConstants. The scalar estimates are plateau values: with gamma
/// taken from the ratio at the last index, the last balance entry collapses
/// to zero, while rounding grows with the size of the times, so the most
/// settled entry is reported instead.
struct InvariantEstimates {
  double odd_leg_hat = 0.0;
  double even_leg_hat = 0.0;
  double full_return_hat = 0.0;
  LimitSequence odd_leg;       // (t_{2i+1}-t_{2i}) - gamma2 (t_{2i}-t_{2i-1}),   i >= 1
  LimitSequence even_leg;      // (t_{2i+2}-t_{2i+1}) - gamma1 (t_{2i+1}-t_{2i}), i >= 0
  LimitSequence full_return;   // (t_{2i+2}-t_{2i}) - delta (t_{2i}-t_{2i-2}),     i >= 1
  RatioEstimates ratios;
  double gamma1_used = 0.0;
  double gamma2_used = 0.0;
};

/// Residuals of the balance identities for every i >= 1 with t_{2i+2} in the
/// record. Transit times are taken per leg from the record. Throws
/// DomainError when the record has fewer than four hits.
std::vector<LemmaResidual> lemma_residuals(const HittingRecord& rec, const CycleParams& cycle,
                                           const TransitionParams& trans);

/// The three time-ratio sequences. Needs at least six hits; throws
/// DomainError on a non-positive time difference.
RatioEstimates ratio_limits(const HittingRecord& rec);

/// Fills the angular parts of `into` from the unwrapped angles; a and c are
/// the transition angle multipliers.
void angular_limits(const HittingRecord& rec, const TransitionParams& trans, RatioEstimates& into);

/// Convenience: ratio_limits followed by angular_limits.
RatioEstimates all_limits(const HittingRecord& rec, const TransitionParams& trans);

/// Balance-identity estimates using the given gamma values.
InvariantEstimates invariant_estimates(const HittingRecord& rec, double gamma1, double gamma2);

/// Balance-identity estimates using the final values of estimated ratios.
InvariantEstimates invariant_estimates(const HittingRecord& rec, const RatioEstimates& ratios);

/// Running time averages (1/T) int_0^T G dt sampled every `stride` steps.
struct BirkhoffSeries {
  std::vector<double> times;
  std::vector<double> averages;

  /// max - min of the averages over samples with time >= from_time.
  [[nodiscard]] double oscillation(double from_time = 0.0) const;
};

/// Trapezoid-rule running averages of `observable(sampler(t))` on [0, horizon].
template <class Sampler, class Observable>
BirkhoffSeries birkhoff_series(Sampler&& sampler, Observable&& observable, double horizon,
                               double step, std::size_t stride = 1) {
  if (!(step > 0.0) || !(horizon > 0.0)) {
    throw DomainError("birkhoff_series needs positive step and horizon");
  }
  if (stride == 0) stride = 1;
  BirkhoffSeries out;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
  out.times.reserve(steps / stride + 1);
  out.averages.reserve(steps / stride + 1);

  double integral = 0.0;
  double t_prev = 0.0;
  double g_prev = observable(sampler(0.0));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * step, horizon);
    const double g = observable(sampler(t));
    integral += 0.5 * (g + g_prev) * (t - t_prev);
    g_prev = g;
    t_prev = t;
    if (k % stride == 0 || k == steps) {
      out.times.push_back(t);
      out.averages.push_back(integral / t);
    }
  }
  return out;
}

/// Smooth bump supported in the eps-neighbourhood of C1 inside block 1:
/// exp(1 - 1/(1 - u^2)) with u^2 = ((rho - R1)^2 + z^2) / eps^2, zero elsewhere.
/// Takes values in [0, 1] and equals 1 on C1.
class Block1Bump {
 public:
  Block1Bump(double R1, double eps) : R1_(R1), eps_(eps) {}
  double operator()(const FlowState& s) const;

 private:
  double R1_;
  double eps_;
};

}  // namespace hetcycle
