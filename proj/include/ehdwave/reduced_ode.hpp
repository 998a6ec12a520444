// The planar ODE q'' = f(q, q', eps) governing small solitary waves, truncated
// at second order, and its explicit homoclinic orbit.
//
// In scaled variables (eps = 0) the system is Q' = P, P' = 3Q - c2 Q^2 with
// c2 = (3/2)(3 - 3 gamma + gamma^2 + eps1) and first integral
//   E = P^2/2 - (3/2) Q^2 + (c2/3) Q^3.

#ifndef EHDWAVE_REDUCED_ODE_HPP
#define EHDWAVE_REDUCED_ODE_HPP

#include <vector>

namespace ehdwave {

struct OdeParams {
  double gamma{0};
  double eps1{0};
  double eps{0};

  /// 3 - 3 gamma + gamma^2 + eps1; positive for every real gamma and eps1 >= 0.
  double denominator() const { return 3.0 - 3.0 * gamma + gamma * gamma + eps1; }
  double c2() const { return 1.5 * denominator(); }
  /// Crest of the homoclinic orbit.
  double q0() const { return 3.0 / denominator(); }
};

OdeParams make_ode_params(double gamma, double eps1, double eps = 0.0);

/// Truncated right-hand side 3 eps a - c2 a^2; the b-dependence enters only
/// at third order and is dropped.
double f_reduced(double a, double b, double eps, const OdeParams& p);

/// Q(x) = q0 sech^2(sqrt(3) x / 2).
double homoclinic_exact(double x, const OdeParams& p);
/// dQ/dx along the homoclinic.
double homoclinic_slope(double x, const OdeParams& p);

double ode_energy(double q, double p, const OdeParams& prm);

enum class OrbitKind { kOpen, kPeriodic, kSeparatrix, kEscaped };

const char* to_string(OrbitKind k);

struct Orbit {
  std::vector<double> x, q, p;
  /// max |E - E(0)| along the orbit.
  double energy_drift = 0;
  /// Set when energy_drift > 1e-6: the step is too large for the orbit.
  bool step_too_large = false;
  bool escaped = false;  // |Q| > 10 q0 stopped the integration
  OrbitKind kind = OrbitKind::kOpen;
  /// Periodic: distance from the launch point at first return.
  /// Separatrix: sup |Q - Q_homoclinic| over the integrated range.
  double closure_error = 0;
};

/// Classical RK4 on the scaled system from (q_init, p_init).
Orbit integrate_orbit(double q_init, double p_init, const OdeParams& p, double dt, long n_steps);

/// Orbits launched from (Q0, 0), classified as periodic, separatrix or escaped.
std::vector<Orbit> phase_portrait(const OdeParams& p, const std::vector<double>& q0_list,
                                  double dt = 1e-3, double x_max = 10.0);

}  // namespace ehdwave

#endif  // EHDWAVE_REDUCED_ODE_HPP
