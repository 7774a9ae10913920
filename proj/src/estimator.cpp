#include "hetcycle/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hetcycle {

namespace {

double checked_ratio(double num, double den, const char* what) {
  if (!(den > 0.0)) {
    throw DomainError(std::string("non-positive time difference in ") + what +
                      " (malformed record)");
  }
  return num / den;
}

void require_hits(const HittingRecord& rec, std::size_t hits, const char* what) {
  if (rec.hits() < hits) {
    throw DomainError(std::string(what) + ": record too short (needs " + std::to_string(hits) +
                      " hits, has " + std::to_string(rec.hits()) + ")");
  }
}

}  // namespace

double LimitSequence::at(int i) const {
  if (i < first_index || i > last_index()) {
    throw DomainError("limit sequence index " + std::to_string(i) + " out of range");
  }
  return values[static_cast<std::size_t>(i - first_index)];
}

double LimitSequence::final_value() const {
  if (values.empty()) throw DomainError("empty limit sequence");
  return values.back();
}

double LimitSequence::gap() const {
  if (values.size() < 2) return std::numeric_limits<double>::infinity();
  return std::abs(values.back() - values[values.size() - 2]);
}

int LimitSequence::plateau_index() const {
  if (values.empty()) throw DomainError("empty limit sequence");
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < values.size(); ++k) {
    double g = std::abs(values[k] - values[k - 1]);
    if (noise.size() == values.size()) g += noise[k] + noise[k - 1];
    if (g < best_gap) {
      best_gap = g;
      best = k;
    }
  }
  return first_index + static_cast<int>(best);
}

std::vector<LemmaResidual> lemma_residuals(const HittingRecord& rec, const CycleParams& cycle,
                                           const TransitionParams& trans) {
  require_hits(rec, 4, "lemma_residuals");
  const DerivedConstants k = derive_constants(cycle);
  const auto& t = rec.t;
  const auto& s = rec.legs;
  const double log_b = std::log(trans.b);
  const double log_d = std::log(trans.d);

  std::vector<LemmaResidual> out;
  for (std::size_t i = 1; 2 * i + 2 < t.size(); ++i) {
    const double odd_now = t[2 * i + 1] - t[2 * i];
    const double even_prev = t[2 * i] - t[2 * i - 1];
    const double even_now = t[2 * i + 2] - t[2 * i + 1];
    const double ret_now = t[2 * i + 2] - t[2 * i];
    const double ret_prev = t[2 * i] - t[2 * i - 2];

    LemmaResidual r;
    r.i = static_cast<int>(i);
    r.odd = (odd_now - k.gamma2 * even_prev) -
            (-log_d / cycle.E1 + (s[2 * i + 1] - k.gamma2 * s[2 * i]));
    r.even = (even_now - k.gamma1 * odd_now) -
             (-log_b / cycle.E2 + (s[2 * i + 2] - k.gamma1 * s[2 * i + 1]));
    r.full = (ret_now - k.delta * ret_prev) -
             (-k.tau1 * log_d - k.tau2 * log_b + (s[2 * i + 2] + s[2 * i + 1]) -
              k.delta * (s[2 * i] + s[2 * i - 1]));
    r.scale = std::max({std::abs(ret_now), k.delta * std::abs(ret_prev),
                        k.gamma2 * std::abs(even_prev), k.gamma1 * std::abs(odd_now)});
    out.push_back(r);
  }
  return out;
}

RatioEstimates ratio_limits(const HittingRecord& rec) {
  require_hits(rec, 6, "ratio_limits");
  const auto& t = rec.t;
  RatioEstimates est;
  est.gamma1_hat.first_index = 0;
  est.gamma2_hat.first_index = 1;
  est.delta_hat.first_index = 1;
  for (std::size_t i = 0; 2 * i + 2 < t.size(); ++i) {
    est.gamma1_hat.values.push_back(
        checked_ratio(t[2 * i + 2] - t[2 * i + 1], t[2 * i + 1] - t[2 * i], "gamma1 ratio"));
  }
  for (std::size_t i = 1; 2 * i + 1 < t.size(); ++i) {
    est.gamma2_hat.values.push_back(
        checked_ratio(t[2 * i + 1] - t[2 * i], t[2 * i] - t[2 * i - 1], "gamma2 ratio"));
  }
  for (std::size_t i = 1; 2 * i + 2 < t.size(); ++i) {
    est.delta_hat.values.push_back(
        checked_ratio(t[2 * i + 2] - t[2 * i], t[2 * i] - t[2 * i - 2], "delta ratio"));
  }
  return est;
}

void angular_limits(const HittingRecord& rec, const TransitionParams& trans,
                    RatioEstimates& into) {
  require_hits(rec, 3, "angular_limits");
  const auto& t = rec.t;
  const auto& p = rec.points;
  into.angular1_hat = {};
  into.angular2_hat = {};
  into.angular1_hat.first_index = 0;
  into.angular2_hat.first_index = 1;
  for (std::size_t i = 0; 2 * i + 2 < t.size(); ++i) {
    into.angular1_hat.values.push_back(
        checked_ratio(p[2 * i + 2].theta - trans.c * p[2 * i].theta, t[2 * i + 2] - t[2 * i],
                      "angular1"));
  }
  for (std::size_t i = 1; 2 * i + 1 < t.size(); ++i) {
    into.angular2_hat.values.push_back(
        checked_ratio(p[2 * i + 1].theta - trans.a * p[2 * i - 1].theta,
                      t[2 * i + 1] - t[2 * i - 1], "angular2"));
  }
}

RatioEstimates all_limits(const HittingRecord& rec, const TransitionParams& trans) {
  RatioEstimates est = ratio_limits(rec);
  angular_limits(rec, trans, est);
  return est;
}

InvariantEstimates invariant_estimates(const HittingRecord& rec, double gamma1, double gamma2) {
  require_hits(rec, 4, "invariant_estimates");
  const auto& t = rec.t;
  const double delta = gamma1 * gamma2;
  InvariantEstimates est;
  est.gamma1_used = gamma1;
  est.gamma2_used = gamma2;
  est.odd_leg.first_index = 1;
  est.even_leg.first_index = 0;
  est.full_return.first_index = 1;
  // Each entry is a difference of times of size ~t, so it carries a rounding
  // error of a few ulp(t) times the weights.
  constexpr double ulp = std::numeric_limits<double>::epsilon();
  auto noise = [&](std::size_t last, double weight) {
    return 4.0 * ulp * (1.0 + weight) * std::abs(t[last]);
  };
  for (std::size_t i = 1; 2 * i + 1 < t.size(); ++i) {
    est.odd_leg.values.push_back((t[2 * i + 1] - t[2 * i]) - gamma2 * (t[2 * i] - t[2 * i - 1]));
    est.odd_leg.noise.push_back(noise(2 * i + 1, gamma2));
  }
  for (std::size_t i = 0; 2 * i + 2 < t.size(); ++i) {
    est.even_leg.values.push_back((t[2 * i + 2] - t[2 * i + 1]) -
                                  gamma1 * (t[2 * i + 1] - t[2 * i]));
    est.even_leg.noise.push_back(noise(2 * i + 2, gamma1));
  }
  for (std::size_t i = 1; 2 * i + 2 < t.size(); ++i) {
    est.full_return.values.push_back((t[2 * i + 2] - t[2 * i]) -
                                     delta * (t[2 * i] - t[2 * i - 2]));
    est.full_return.noise.push_back(noise(2 * i + 2, delta));
  }
  est.odd_leg_hat = est.odd_leg.plateau_value();
  est.even_leg_hat = est.even_leg.plateau_value();
  est.full_return_hat = est.full_return.plateau_value();
  return est;
}

InvariantEstimates invariant_estimates(const HittingRecord& rec, const RatioEstimates& ratios) {
  InvariantEstimates est =
      invariant_estimates(rec, ratios.gamma1_hat.final_value(), ratios.gamma2_hat.final_value());
  est.ratios = ratios;
  return est;
}

double BirkhoffSeries::oscillation(double from_time) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < from_time) continue;
    lo = std::min(lo, averages[k]);
    hi = std::max(hi, averages[k]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

double Block1Bump::operator()(const FlowState& s) const {
  if (s.phase != Phase::Block1) return 0.0;
  const double dr = (s.point.rho - R1_) / eps_;
  const double dz = s.point.z / eps_;
  const double u2 = dr * dr + dz * dz;
  if (u2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u2));
}

}  // namespace hetcycle
