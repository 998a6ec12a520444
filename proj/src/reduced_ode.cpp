#include "ehdwave/reduced_ode.hpp"

#include "ehdwave/core.hpp"

#include <algorithm>
#include <cmath>

namespace ehdwave {

OdeParams make_ode_params(double gamma, double eps1, double eps) {
  if (!std::isfinite(gamma)) throw ValidationError("gamma", "must be finite");
  if (!(eps1 >= 0) || !std::isfinite(eps1)) throw ValidationError("eps1", "must be finite and >= 0");
  if (!(eps >= 0) || !std::isfinite(eps)) throw ValidationError("eps", "must be finite and >= 0");
  return {gamma, eps1, eps};
}

double f_reduced(double a, double /*b*/, double eps, const OdeParams& p) {
  return 3.0 * eps * a - p.c2() * a * a;
}

double homoclinic_exact(double x, const OdeParams& p) {
  const double c = std::cosh(0.5 * std::sqrt(3.0) * x);
  return p.q0() / (c * c);
}

double homoclinic_slope(double x, const OdeParams& p) {
  const double k = 0.5 * std::sqrt(3.0);
  return -2.0 * k * homoclinic_exact(x, p) * std::tanh(k * x);
}

double ode_energy(double q, double p, const OdeParams& prm) {
  return 0.5 * p * p - 1.5 * q * q + prm.c2() / 3.0 * q * q * q;
}

const char* to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::kOpen:
      return "open";
    case OrbitKind::kPeriodic:
      return "periodic";
    case OrbitKind::kSeparatrix:
      return "separatrix";
    case OrbitKind::kEscaped:
      return "escaped";
  }
  return "unknown";
}

Orbit integrate_orbit(double q_init, double p_init, const OdeParams& prm, double dt, long n_steps) {
  if (!(dt > 0)) throw ValidationError("dt", "must be > 0");
  if (n_steps < 0) throw ValidationError("n_steps", "must be >= 0");
  const double c2 = prm.c2();
  const double cap = 10.0 * prm.q0();
  auto acc = [c2](double q) { return 3.0 * q - c2 * q * q; };
  Orbit o;
  o.x.reserve(static_cast<std::size_t>(n_steps) + 1);
  o.q.reserve(o.x.capacity());
  o.p.reserve(o.x.capacity());
  double q = q_init, p = p_init, x = 0.0;
  const double e0 = ode_energy(q, p, prm);
  o.x.push_back(x);
  o.q.push_back(q);
  o.p.push_back(p);
  for (long i = 0; i < n_steps; ++i) {
    const double k1q = p, k1p = acc(q);
    const double k2q = p + 0.5 * dt * k1p, k2p = acc(q + 0.5 * dt * k1q);
    const double k3q = p + 0.5 * dt * k2p, k3p = acc(q + 0.5 * dt * k2q);
    const double k4q = p + dt * k3p, k4p = acc(q + dt * k3q);
    q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    x = dt * static_cast<double>(i + 1);
    o.x.push_back(x);
    o.q.push_back(q);
    o.p.push_back(p);
    if (!(std::abs(q) <= cap)) {
      o.escaped = true;
      o.kind = OrbitKind::kEscaped;
      break;
    }
    o.energy_drift = std::max(o.energy_drift, std::abs(ode_energy(q, p, prm) - e0));
  }
  o.step_too_large = o.energy_drift > 1e-6;
  return o;
}

std::vector<Orbit> phase_portrait(const OdeParams& prm, const std::vector<double>& q0_list, double dt,
                                  double x_max) {
  std::vector<Orbit> out;
  const double crest = prm.q0();
  const long steps = static_cast<long>(std::ceil(x_max / dt));
  for (double q0 : q0_list) {
    Orbit o = integrate_orbit(q0, 0.0, prm, dt, steps);
    if (o.escaped) {
      out.push_back(std::move(o));
      continue;
    }
    if (std::abs(q0 - crest) <= 1e-12 * crest) {
      o.kind = OrbitKind::kSeparatrix;
      for (std::size_t i = 0; i < o.q.size(); ++i)
        o.closure_error = std::max(o.closure_error, std::abs(o.q[i] - homoclinic_exact(o.x[i], prm)));
      out.push_back(std::move(o));
      continue;
    }
    // First return: the second sign change of P, located by linear interpolation.
    int crossings = 0;
    for (std::size_t i = 1; i < o.p.size(); ++i) {
      if ((o.p[i - 1] < 0) != (o.p[i] < 0) && o.p[i - 1] != 0) {
        if (++crossings == 2) {
          const double s = o.p[i - 1] / (o.p[i - 1] - o.p[i]);
          const double q_ret = o.q[i - 1] + s * (o.q[i] - o.q[i - 1]);
          o.kind = OrbitKind::kPeriodic;
          o.closure_error = std::abs(q_ret - q0);
          break;
        }
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace ehdwave
