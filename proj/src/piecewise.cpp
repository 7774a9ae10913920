#include "hetcycle/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hetcycle/error.hpp"

namespace hetcycle {

namespace {

struct BlockData {
  double E, C, omega, R, delta_j;
};

BlockData block_data(int block, const CycleParams& cycle, const DerivedConstants& k) {
  if (block == 1) return {cycle.E1, cycle.C1, cycle.omega1, k.R1, k.delta1};
  if (block == 2) return {cycle.E2, cycle.C2, cycle.omega2, k.R2, k.delta2};
  throw DomainError("block label must be 1 or 2, got " + std::to_string(block));
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

bool near(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

SectionGeometry SectionGeometry::of(int block, const CycleParams& cycle,
                                    const DerivedConstants& derived) {
  SectionGeometry g;
  g.R = block_data(block, cycle, derived).R;
  g.eps = cycle.eps;
  return g;
}

bool SectionGeometry::in_block(const CylPoint& p) const {
  const double slack = tol * std::max(1.0, eps);
  return std::abs(p.rho - R) <= eps + slack && std::abs(p.z) <= eps + slack;
}

bool SectionGeometry::on_in(const CylPoint& p) const {
  return near(std::abs(p.rho - R), eps, tol) && std::abs(p.z) <= eps * (1.0 + tol);
}

bool SectionGeometry::on_in_plus(const CylPoint& p) const {
  return on_in(p) && p.rho > R;
}

bool SectionGeometry::on_out(const CylPoint& p) const {
  return near(std::abs(p.z), eps, tol) && std::abs(p.rho - R) <= eps * (1.0 + tol);
}

bool SectionGeometry::on_out_plus(const CylPoint& p) const {
  return on_out(p) && p.z > 0.0;
}

bool SectionGeometry::on_corner(const CylPoint& p) const {
  return on_in(p) && on_out(p);
}

bool SectionGeometry::on_unstable_trace(const CylPoint& p) const {
  return on_out_plus(p) && near(p.rho, R, tol);
}

CylPoint local_flow(int block, const CylPoint& p, double t, const CycleParams& cycle,
                    const DerivedConstants& derived) {
  const BlockData b = block_data(block, cycle, derived);
  const double k = p.rho - b.R;
  return {b.R + k * std::exp(-b.C * t), p.theta + b.omega * t, p.z * std::exp(b.E * t), block};
}

LocalExit local_map(int block, const CylPoint& p, const CycleParams& cycle,
                    const DerivedConstants& derived) {
  const BlockData b = block_data(block, cycle, derived);
  const double eps = cycle.eps;
  if (!(p.z > 0.0)) {
    throw DomainError("point on or below local stable manifold: never exits upward");
  }
  if (!near(std::abs(p.rho - b.R), eps, 1e-9)) {
    throw DomainError("local_map expects a point on the inflow wall rho = R +- eps");
  }
  if (p.z > eps * (1.0 + 1e-12)) {
    throw DomainError("point above the isolating block (z > eps)");
  }
  const double log_u = std::log(p.z / eps);
  LocalExit out;
  out.dwell = -log_u / b.E;
  out.exit.block = block;
  out.exit.rho = b.R + sign_of(p.rho - b.R) * eps * std::exp(b.delta_j * log_u);
  out.exit.theta = p.theta - (b.omega / b.E) * log_u;
  out.exit.z = eps;
  return out;
}

CylPoint transition(int from, const CylPoint& p, const TransitionParams& trans,
                    const CycleParams& cycle, const DerivedConstants& derived) {
  const double eps = cycle.eps;
  if (from == 1) {
    return {derived.R2 + eps, trans.a * p.theta, trans.b * (p.rho - derived.R1), 2};
  }
  if (from == 2) {
    return {derived.R1 + eps, trans.c * p.theta, trans.d * (p.rho - derived.R2), 1};
  }
  throw DomainError("block label must be 1 or 2, got " + std::to_string(from));
}

CylPoint first_return(const CylPoint& p, const System& sys, const DerivedConstants& k) {
  const CycleParams& cy = sys.cycle;
  const TransitionParams& tr = sys.trans;
  const double eps = cy.eps;
  if (!(p.z > 0.0)) {
    throw DomainError("point on or below local stable manifold: never exits upward");
  }
  const double log_u = std::log(p.z / eps);
  // Coefficients obtained by composing the four maps Psi12 o Phi1 o Psi21 o Phi2.
  const double angle_log_coeff =
      (tr.a * tr.c * cy.omega2 * cy.E1 + tr.a * cy.omega1 * cy.C2) / (cy.E1 * cy.E2);
  CylPoint out;
  out.block = 2;
  out.rho = p.rho;
  out.theta = tr.a * tr.c * p.theta - angle_log_coeff * log_u - (tr.a * cy.omega1 / cy.E1) * std::log(tr.d);
  out.z = tr.b * eps * std::pow(tr.d, k.delta1) * std::exp(k.delta * log_u);
  return out;
}

HittingRecord hitting_sequence(const CylPoint& p0, int n, const System& sys) {
  const DerivedConstants k = derive_constants(sys.cycle);
  const SectionGeometry g2 = SectionGeometry::of(2, sys.cycle, k);
  if (p0.block != 2 || !g2.on_out_plus(p0)) {
    throw DomainError("initial point must lie on Out+(C2): z = eps, |rho - R2| <= eps");
  }
  const double offset = p0.rho - k.R2;
  if (offset == 0.0) {
    throw DomainError("initial point on unstable manifold of C2: infinite dwell");
  }
  OutSeed seed;
  seed.log_offset = std::log(std::abs(offset) / sys.cycle.eps);
  seed.branch = sign_of(offset);
  seed.theta = p0.theta;
  return hitting_sequence(seed, n, sys);
}

HittingRecord hitting_sequence(const OutSeed& seed, int n, const System& sys) {
  if (n < 1) throw DomainError("hitting_sequence needs n >= 1");
  if (!std::isfinite(seed.log_offset)) {
    throw DomainError("initial point on unstable manifold of C2: infinite dwell");
  }
  if (seed.log_offset > 1e-12) {
    throw DomainError("initial radial offset exceeds the section half-width");
  }
  const CycleParams& cy = sys.cycle;
  const TransitionParams& tr = sys.trans;
  const DerivedConstants k = derive_constants(cy);
  const double eps = cy.eps;
  const int sigma = seed.branch < 0 ? -1 : 1;

  HittingRecord rec;
  const auto reserve = static_cast<std::size_t>(n) + 1;
  rec.t.reserve(reserve);
  rec.points.reserve(reserve);
  rec.log_offset.reserve(reserve);
  rec.legs.reserve(reserve);
  rec.branch.reserve(reserve);

  auto push = [&](double t, int block, double log_offset, double theta, double leg) {
    const double R = block == 1 ? k.R1 : k.R2;
    rec.t.push_back(t);
    rec.points.push_back({R + sigma * eps * std::exp(log_offset), theta, eps, block});
    rec.log_offset.push_back(log_offset);
    rec.legs.push_back(leg);
    rec.branch.push_back(sigma);
  };

  push(0.0, 2, std::min(seed.log_offset, 0.0), seed.theta, 0.0);

  for (int step = 0; step < n; ++step) {
    const int from = rec.points.back().block;
    const bool from2 = from == 2;
    const double coeff = from2 ? tr.d : tr.b;
    const double mult = from2 ? tr.c : tr.a;
    const double leg = from2 ? tr.s1 : tr.s2;
    const double E = from2 ? cy.E1 : cy.E2;
    const double omega = from2 ? cy.omega1 : cy.omega2;
    const double delta_j = from2 ? k.delta1 : k.delta2;

    // Height at which the orbit enters the next block, relative to eps.
    const double log_u = std::log(coeff) + rec.log_offset.back();
    const double dwell = -log_u / E;
    const double t_next = rec.t.back() + leg + dwell;
    const double theta_next = mult * rec.points.back().theta + omega * dwell;
    const double log_offset_next = delta_j * log_u;

    if (!std::isfinite(t_next) || !std::isfinite(theta_next) || !std::isfinite(log_offset_next)) {
      rec.truncated = true;
      break;
    }
    push(t_next, from2 ? 1 : 2, log_offset_next, theta_next, leg);
  }
  return rec;
}

PiecewiseOrbit::PiecewiseOrbit(HittingRecord record, System sys)
    : record_(std::move(record)), sys_(sys), derived_(derive_constants(sys_.cycle)) {
  if (record_.t.size() < 2) throw DomainError("PiecewiseOrbit needs at least one hit");
}

FlowState PiecewiseOrbit::state_at(double t) const {
  const auto& times = record_.t;
  if (t < 0.0 || t > times.back()) {
    throw DomainError("time outside the recorded horizon");
  }
  // Index of the last hit at or before t.
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
  if (k + 1 >= times.size()) {
    FlowState last;
    last.phase = Phase::Transit;
    last.point = record_.points.back();
    return last;
  }

  const CylPoint& hit = record_.points[k];
  const double tau = t - times[k];
  const double leg = record_.legs[k + 1];
  FlowState st;
  if (tau < leg) {
    st.phase = Phase::Transit;
    st.point = hit;
    return st;
  }

  const bool from2 = hit.block == 2;
  const int to = from2 ? 1 : 2;
  const CycleParams& cy = sys_.cycle;
  const TransitionParams& tr = sys_.trans;
  const double coeff = from2 ? tr.d : tr.b;
  const double mult = from2 ? tr.c : tr.a;
  const double E = from2 ? cy.E1 : cy.E2;
  const double C = from2 ? cy.C1 : cy.C2;
  const double omega = from2 ? cy.omega1 : cy.omega2;
  const double R = from2 ? derived_.R1 : derived_.R2;
  const double eps = cy.eps;
  const double inside = tau - leg;
  const double log_height = std::min(std::log(coeff) + record_.log_offset[k] + E * inside, 0.0);

  st.phase = to == 1 ? Phase::Block1 : Phase::Block2;
  st.point.block = to;
  st.point.rho = R + record_.branch[k] * eps * std::exp(-C * inside);
  st.point.theta = mult * hit.theta + omega * inside;
  st.point.z = eps * std::exp(log_height);
  return st;
}

}  // namespace hetcycle
