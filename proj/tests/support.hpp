#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hetcycle/model.hpp"
#include "hetcycle/piecewise.hpp"

namespace testing {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int sign() { return uniform(0.0, 1.0) < 0.5 ? -1 : 1; }

 private:
  std::mt19937_64 gen_;
};

// Strict contraction (C_j > E_j) with every parameter away from degenerate values.
inline hetcycle::System random_strict_system(Rng& rng) {
  hetcycle::System s;
  auto& cy = s.cycle;
  cy.E1 = rng.uniform(0.5, 2.0);
  cy.E2 = rng.uniform(0.5, 2.0);
  cy.C1 = cy.E1 * rng.uniform(1.3, 3.0);
  cy.C2 = cy.E2 * rng.uniform(1.3, 3.0);
  cy.omega1 = rng.uniform(0.5, 3.0);
  cy.omega2 = rng.uniform(0.5, 3.0);
  cy.period1 = rng.uniform(1.0, 10.0);
  cy.period2 = rng.uniform(1.0, 10.0);
  cy.eps = rng.uniform(0.5, 1.5);
  auto& tr = s.trans;
  tr.a = rng.uniform(0.5, 2.0);
  tr.c = rng.uniform(0.5, 2.0);
  tr.b = rng.uniform(0.1, 1.0);
  tr.d = rng.uniform(0.1, 1.0);
  tr.s1 = rng.uniform(0.0, 2.0);
  tr.s2 = rng.uniform(0.0, 2.0);
  return s;
}

// A point on Out+(C2), off the unstable manifold.
inline hetcycle::CylPoint random_out_point(const hetcycle::System& s, Rng& rng) {
  const auto k = hetcycle::derive_constants(s.cycle);
  const double eps = s.cycle.eps;
  return {k.R2 + rng.sign() * rng.uniform(0.05, 0.95) * eps, rng.uniform(0.0, kTwoPi), eps, 2};
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Classical RK4 on the linearized block field
//   rho' = -C (rho - R),  theta' = omega,  z' = E z.
// Written directly from the ODE, independent of the closed forms under test.
struct BlockOde {
  double R, C, omega, E;

  void deriv(const double* s, double* d) const {
    d[0] = -C * (s[0] - R);
    d[1] = omega;
    d[2] = E * s[2];
  }

  void step(double* s, double h) const {
    double k1[3], k2[3], k3[3], k4[3], tmp[3];
    deriv(s, k1);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    deriv(tmp, k2);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    deriv(tmp, k3);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + h * k3[i];
    deriv(tmp, k4);
    for (int i = 0; i < 3; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  // Fixed steps of size h up to time t.
  void advance(double* s, double t, double h) const {
    const int n = static_cast<int>(std::ceil(t / h));
    for (int i = 0; i < n; ++i) step(s, t / n);
  }

  // Marches until z reaches z_exit, then bisects the last partial step.
  // Returns the exit time; s holds the exit state.
  double exit_time(double* s, double z_exit, double h) const {
    double t = 0.0;
    while (true) {
      double trial[3] = {s[0], s[1], s[2]};
      step(trial, h);
      if (trial[2] >= z_exit) break;
      std::copy(trial, trial + 3, s);
      t += h;
    }
    double lo = 0.0, hi = h;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      double trial[3] = {s[0], s[1], s[2]};
      step(trial, mid);
      (trial[2] < z_exit ? lo : hi) = mid;
    }
    step(s, hi);
    return t + hi;
  }
};

inline BlockOde block_ode(int block, const hetcycle::CycleParams& cy) {
  const auto k = hetcycle::derive_constants(cy);
  if (block == 1) return {k.R1, cy.C1, cy.omega1, cy.E1};
  return {k.R2, cy.C2, cy.omega2, cy.E2};
}

}  // namespace testing
