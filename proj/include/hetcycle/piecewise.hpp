#pragma once

#include <cstddef>
#include <vector>

#include "hetcycle/model.hpp"

namespace hetcycle {

/// A point in the cylindrical chart (rho, theta, z) of one isolating block.
///
/// theta is stored unwrapped; reduction mod 2*pi is left to presentation.
/// The radial offset from the periodic orbit is k = rho - R_block.
struct CylPoint {
  double rho = 0.0;
  double theta = 0.0;
  double z = 0.0;
  int block = 2;
};

/// Boundary pieces of the isolating block V_j around C_j:
///   In   = walls  {rho = R +- eps, |z| <= eps}
///   Out  = annuli {|rho - R| <= eps, z = +- eps}
///   Delta = corner circles where the two meet.
/// In+ is the outer wall rho = R + eps and Out+ the top annulus z = eps.
/// W^u(C_j) crosses Out+ on the circle rho = R.
struct SectionGeometry {
  double R = 0.0;
  double eps = 1.0;
  double tol = 1e-9;

  static SectionGeometry of(int block, const CycleParams& cycle, const DerivedConstants& derived);

  [[nodiscard]] bool in_block(const CylPoint& p) const;
  [[nodiscard]] bool on_in(const CylPoint& p) const;
  [[nodiscard]] bool on_in_plus(const CylPoint& p) const;
  [[nodiscard]] bool on_out(const CylPoint& p) const;
  [[nodiscard]] bool on_out_plus(const CylPoint& p) const;
  [[nodiscard]] bool on_corner(const CylPoint& p) const;
  [[nodiscard]] bool on_unstable_trace(const CylPoint& p) const;
};

/// Linearized flow inside block j: rho relaxes to R_j at rate C_j, theta
/// advances at omega_j, z grows at rate E_j. Valid for every real t.
CylPoint local_flow(int block, const CylPoint& p, double t, const CycleParams& cycle,
                    const DerivedConstants& derived);

struct LocalExit {
  CylPoint exit;
  double dwell = 0.0;
};

/// Local map from the wall rho = R_j +- eps to the top annulus z = eps.
/// The exit radial offset keeps the sign of the entry wall.
/// Throws DomainError when z <= 0 (the point never leaves upwards).
LocalExit local_map(int block, const CylPoint& p, const CycleParams& cycle,
                    const DerivedConstants& derived);

/// Linear global map from Out+ of `from` to In+ of the other block.
/// The returned z is b (rho - R1) or d (rho - R2) and may be <= 0.
CylPoint transition(int from, const CylPoint& p, const TransitionParams& trans,
                    const CycleParams& cycle, const DerivedConstants& derived);

/// First return map to In+(C2), in closed form.
CylPoint first_return(const CylPoint& p, const System& sys, const DerivedConstants& derived);

/// Hits of one trajectory on the alternating sections Out+(C2), Out+(C1), ...
///
/// legs[k] is the transit time consumed on the way to hit k (legs[0] = 0),
/// branch[k] the side of the unstable manifold (+1: rho > R, -1: rho < R),
/// log_offset[k] = log(|rho_k - R| / eps). Offsets are propagated in log
/// form, so `points[k].rho` may round to R long before the record ends.
/// `truncated` is set when a time or offset stops being representable.
struct HittingRecord {
  std::vector<double> t;
  std::vector<CylPoint> points;
  std::vector<double> log_offset;
  std::vector<double> legs;
  std::vector<int> branch;
  bool truncated = false;

  [[nodiscard]] std::size_t size() const { return t.size(); }
  /// Number of hits after t_0.
  [[nodiscard]] std::size_t hits() const { return t.empty() ? 0 : t.size() - 1; }
};

/// Starting data on Out+(C2) given directly by its log radial offset.
struct OutSeed {
  double log_offset = 0.0;
  int branch = 1;
  double theta = 0.0;
};

/// Simulates n hits starting from p0 on Out+(C2).
/// Throws DomainError if p0 is not on Out+(C2) or lies on W^u(C2) (rho0 == R2).
HittingRecord hitting_sequence(const CylPoint& p0, int n, const System& sys);
HittingRecord hitting_sequence(const OutSeed& seed, int n, const System& sys);

/// Continuous-time state of the piecewise flow reconstructed from a record.
enum class Phase { Transit, Block1, Block2 };

struct FlowState {
  Phase phase = Phase::Transit;
  CylPoint point;
};

/// Samples the piecewise trajectory at arbitrary times in [0, t_n].
///
/// Between hit k and hit k+1 the orbit first spends legs[k+1] in transit,
/// then follows the linearized flow inside the next block.
class PiecewiseOrbit {
 public:
  PiecewiseOrbit(HittingRecord record, System sys);

  [[nodiscard]] FlowState state_at(double t) const;
  [[nodiscard]] double horizon() const { return record_.t.back(); }
  [[nodiscard]] const HittingRecord& record() const { return record_; }

 private:
  HittingRecord record_;
  System sys_;
  DerivedConstants derived_;
};

}  // namespace hetcycle
