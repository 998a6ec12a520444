// Physical fields and the conservation and monotonicity checks run on
// converged waves.

#ifndef EHDWAVE_DIAGNOSTICS_HPP
#define EHDWAVE_DIAGNOSTICS_HPP

#include "ehdwave/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ehdwave {

/// |grad eta|^2 vanished somewhere, so the conformal map degenerates.
class DegenerateJacobian : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Velocity (u, v) and electric field (e1, e2) at a surface point.
struct FieldSample {
  double x, u, v, e1, e2;
};

std::vector<FieldSample> fields_on_gamma(const WaveSolution& sol);

/// Pointwise residuals of the field-level surface conditions.
struct FieldChecks {
  double kinematic = 0;    // max |u eta_x - v eta_y|
  double electric = 0;     // max |e1 eta_y + e2 eta_x|
  double bernoulli = 0;    // max |u^2 + v^2 + eps1 |e|^2 + 2 alpha (eta - 1) - (1 + eps1)|
  double far_field = 0;    // max over |x| >= 0.9 L of |u - 1| + |v| + |e1| + |e2 - 1|
};

FieldChecks field_checks(const WaveSolution& sol);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct FlowForce {
  double value = 0;
  /// |S(2n nodes) - S(n nodes)|; above 1e-8 the quadrature is not converged.
  double doubling_change = 0;
  bool converged = true;
};

FlowForce flow_force(const WaveSolution& sol, double x, int nodes = 32);

/// The flow force of the laminar state t1 = 0.
double trivial_flow_force(const ParamsD& p);

struct FlowForceSpread {
  std::vector<double> stations, values;
  double relative_spread = 0;  // max |S(x) - S(0)| / |S(0)|
  bool quadrature_converged = true;
};

/// S at 9 equispaced stations in [-0.8 L, 0.8 L].
FlowForceSpread flow_force_spread(const WaveSolution& sol, int nodes = 32);

struct IdentityReport {
  double lhs = 0, rhs = 0;
  double relative_gap = 0;
  double tail = 0;
  /// integral of w1 w1y dx; positive for nontrivial waves.
  double w1_w1y = 0;
  bool balanced = false;  // relative_gap < max(1e-4, 10 tail)
};

IdentityReport flux_identity_check(const WaveSolution& sol);

struct NodalViolation {
  double y, x, value;
};

struct NodalReport {
  bool passed = true;
  double x_tail = 0;
  std::vector<NodalViolation> violations;
  std::string summary() const;
};

/// t1 strictly decreasing for 0 < x < x_tail on the surface and w1x < 0 at the
/// interior levels, where x_tail is where |t1| first drops to 10 tail_tol.
NodalReport nodal_check(const WaveSolution& sol, double tail_tol = 1e-9);

struct ProfilePoint {
  double X, Y, xi_prime;
};

struct PhysicalProfile {
  std::vector<ProfilePoint> points;
  bool overhang = false;
  double min_xi_prime = 0;
  /// Pairs of non-adjacent crossing segments; reported, not fatal.
  int self_intersections = 0;
  double dropped_mean = 0;
};

PhysicalProfile physical_profile(const WaveSolution& sol);

enum class BoundStatus { kPass, kFail, kDegenerateEquality, kNotApplicable };

const char* to_string(BoundStatus s);

struct BoundCheck {
  std::string name;
  BoundStatus status = BoundStatus::kNotApplicable;
  /// Smallest slack of the inequality over the surface (negative on failure).
  double margin = 0;
};

struct BoundsReport {
  std::vector<BoundCheck> checks;
  bool passed() const;
};

BoundsReport stream_bounds_check(const WaveSolution& sol, double tol = 1e-9);

/// Everything `diagnose` reports, with the hard invariants flagged.
struct DiagnosticsSummary {
  double residual_norm = 0;
  double lambda_min = 0;
  FieldChecks fields;
  FlowForceSpread flow_force;
  IdentityReport flux;
  NodalReport nodal;
  BoundsReport bounds;
  PhysicalProfile profile;
  bool nontrivial = false;
  bool froude_bound_ok = true;
  /// Names of failed hard invariants; empty when the wave is sound.
  std::vector<std::string> failures;
};

DiagnosticsSummary run_diagnostics(const WaveSolution& sol, double tail_tol = 1e-9);

}  // namespace ehdwave

#endif  // EHDWAVE_DIAGNOSTICS_HPP
