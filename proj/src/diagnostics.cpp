#include "ehdwave/diagnostics.hpp"

#include "ehdwave/strip_harmonic.hpp"
#include "ehdwave/wave_system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace ehdwave {

namespace {

using Arr = Eigen::ArrayXd;

// Harmonic extension of a trace evaluated at single points (x, y).
class PointField {
 public:
  PointField(const TraceD& t, const GridD& g) : g_(g), c_(to_spectral(t, g)) {}

  struct Value {
    double w, wx, wy;
  };

  Value at(double x, double y) const {
    const auto& k = g_.wavenumbers();
    const Eigen::Index nyq = c_.size() - 1;
    const double shift = x + g_.half_length();
    double w = c_[0].real() * y, wx = 0.0, wy = c_[0].real();
    {
      const double c = (c_[nyq] * std::cos(k[nyq] * shift)).real();
      w += c * extension_symbol(k[nyq], y);
      wy += c * extension_dy_symbol(k[nyq], y);
    }
    for (Eigen::Index n = 1; n < nyq; ++n) {
      const std::complex<double> a = c_[n] * std::polar(1.0, k[n] * shift);
      const double s = extension_symbol(k[n], y);
      w += 2.0 * a.real() * s;
      wx += -2.0 * k[n] * a.imag() * s;
      wy += 2.0 * a.real() * extension_dy_symbol(k[n], y);
    }
    const double inv = 1.0 / static_cast<double>(g_.size());
    return {w * inv, wx * inv, wy * inv};
  }

 private:
  GridD g_;
  SpectralCoeffs<double> c_;
};

double sup(const Arr& a) { return a.size() ? a.abs().maxCoeff() : 0.0; }

double trapezoid(const Arr& f, const GridD& g) { return g.spacing() * f.sum(); }

}  // namespace

std::vector<FieldSample> fields_on_gamma(const WaveSolution& sol) {
  const GridD& g = sol.grid;
  const ParamsD& p = sol.params;
  const auto b = assemble_traces(sol.t1, p, g);
  const Arr ex = b.w1x.array();
  const Arr ey = 1.0 + b.w1y.array();
  const Arr zx = ddx(b.t2, g).array();
  const Arr zy = (1.0 - p.gamma) + b.w2y.array();
  const Arr g2 = ex.square() + ey.square();
  if (g2.minCoeff() < 1e-14) throw DegenerateJacobian("|grad eta|^2 < 1e-14 on the surface");
  const Arr eta = 1.0 + sol.t1.array();
  std::vector<FieldSample> out(static_cast<std::size_t>(g.size()));
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    FieldSample& f = out[static_cast<std::size_t>(j)];
    f.x = g.x()[j];
    f.u = (ex[j] * zx[j] + ey[j] * zy[j]) / g2[j] + p.gamma * eta[j];
    f.v = (ex[j] * zy[j] - ey[j] * zx[j]) / g2[j];
    f.e1 = -ex[j] / g2[j];
    f.e2 = ey[j] / g2[j];
  }
  return out;
}

FieldChecks field_checks(const WaveSolution& sol) {
  const GridD& g = sol.grid;
  const ParamsD& p = sol.params;
  const std::vector<FieldSample> f = fields_on_gamma(sol);
  const TraceD ex = ddx(sol.t1, g);
  const TraceD ey = (1.0 + dtn(sol.t1, g).array()).matrix();
  FieldChecks c;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const FieldSample& s = f[static_cast<std::size_t>(j)];
    c.kinematic = std::max(c.kinematic, std::abs(s.u * ex[j] - s.v * ey[j]));
    c.electric = std::max(c.electric, std::abs(s.e1 * ey[j] + s.e2 * ex[j]));
    const double bern = s.u * s.u + s.v * s.v + p.eps1 * (s.e1 * s.e1 + s.e2 * s.e2) +
                        2.0 * p.alpha * sol.t1[j] - (1.0 + p.eps1);
    c.bernoulli = std::max(c.bernoulli, std::abs(bern));
    if (std::abs(s.x) >= 0.9 * g.half_length())
      c.far_field = std::max(c.far_field, std::abs(s.u - 1.0) + std::abs(s.v) + std::abs(s.e1) +
                                              std::abs(s.e2 - 1.0));
  }
  return c;
}

void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ValidationError("nodes", "must be >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

double trivial_flow_force(const ParamsD& p) {
  return p.gamma * p.gamma / 3.0 - p.gamma + 0.5 * p.alpha + 1.0 + p.eps1;
}

namespace {

double flow_force_with(const ParamsD& p, const PointField& w1, const PointField& w2, double eta_top,
                       double x, int nodes) {
  std::vector<double> y, wt;
  gauss_legendre01(nodes, y, wt);
  double integral = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const PointField::Value a = w1.at(x, y[i]);
    const PointField::Value b = w2.at(x, y[i]);
    const double ex = a.wx, ey = 1.0 + a.wy;
    const double zx = b.wx, zy = 1.0 - p.gamma + b.wy;
    const double g2 = ex * ex + ey * ey;
    const double hydro = ey * (zy * zy - zx * zx) + 2.0 * ex * zx * zy;
    // vartheta = y: vartheta_x = 0, vartheta_y = 1
    integral += wt[i] * (hydro + p.eps1 * ey) / g2;
  }
  const double e = eta_top;
  return 0.5 * integral -
         (p.gamma * p.gamma * e * e * e / 6.0 + 0.5 * p.alpha * e * e -
          0.5 * (2.0 * p.alpha + 1.0 + p.eps1) * e);
}

}  // namespace

FlowForce flow_force(const WaveSolution& sol, double x, int nodes) {
  const GridD& g = sol.grid;
  if (!(std::abs(x) <= g.half_length())) throw ValidationError("x", "station outside the box");
  const PointField w1(sol.t1, g);
  const PointField w2(stream_trace(sol.t1, sol.params), g);
  const double eta = 1.0 + interpolate(sol.t1, g, x);
  FlowForce f;
  f.value = flow_force_with(sol.params, w1, w2, eta, x, nodes);
  const double fine = flow_force_with(sol.params, w1, w2, eta, x, 2 * nodes);
  f.doubling_change = std::abs(fine - f.value);
  f.converged = f.doubling_change <= 1e-8;
  return f;
}

FlowForceSpread flow_force_spread(const WaveSolution& sol, int nodes) {
  FlowForceSpread s;
  const double L = sol.grid.half_length();
  double s0 = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double x = -0.8 * L + 0.2 * L * i;
    const FlowForce f = flow_force(sol, x, nodes);
    s.stations.push_back(x);
    s.values.push_back(f.value);
    s.quadrature_converged = s.quadrature_converged && f.converged;
    if (i == 4) s0 = f.value;
  }
  for (double v : s.values) s.relative_spread = std::max(s.relative_spread, std::abs(v - s0) / std::abs(s0));
  return s;
}

IdentityReport flux_identity_check(const WaveSolution& sol) {
  const GridD& g = sol.grid;
  const ParamsD& p = sol.params;
  const Arr t = sol.t1.array();
  const Arr ty = dtn(sol.t1, g).array();
  IdentityReport r;
  r.w1_w1y = trapezoid(t * ty, g);
  r.lhs = (1.0 - p.gamma + p.eps1 - p.alpha) * trapezoid(t, g);
  r.rhs = p.alpha * r.w1_w1y + 0.5 * (p.alpha + p.gamma * p.gamma) * trapezoid(t.square(), g) +
          p.gamma * p.gamma / 6.0 * trapezoid(t.cube(), g);
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.relative_gap = scale > 0 ? std::abs(r.lhs - r.rhs) / scale : 0.0;
  r.tail = tail_of(sol.t1, g);
  r.balanced = r.relative_gap < std::max(1e-4, 10.0 * r.tail);
  return r;
}

std::string NodalReport::summary() const {
  std::ostringstream s;
  if (passed) {
    s << "monotone for 0 < x < " << x_tail;
    return s.str();
  }
  s << violations.size() << " violation(s)";
  const NodalViolation& v = violations.front();
  s << ", first at y = " << v.y << ", x = " << v.x << " (slope " << v.value << ")";
  return s.str();
}

NodalReport nodal_check(const WaveSolution& sol, double tail_tol) {
  const GridD& g = sol.grid;
  const TraceD& t = sol.t1;
  const Eigen::Index c = g.center();
  NodalReport rep;
  Eigen::Index end = c + 1;
  while (end < g.size() && std::abs(t[end]) > 10.0 * tail_tol) ++end;
  rep.x_tail = end < g.size() ? g.x()[end] : g.half_length();
  for (Eigen::Index j = c; j + 1 <= end && j + 1 < g.size(); ++j)
    if (!(t[j + 1] < t[j])) rep.violations.push_back({1.0, g.x()[j], (t[j + 1] - t[j]) / g.spacing()});
  const TraceD tx = ddx(t, g);
  for (double y : kInteriorLevels) {
    const TraceD wx = eval_interior(tx, g, y);
    for (Eigen::Index j = c + 1; j < end; ++j)
      if (!(wx[j] < 0)) rep.violations.push_back({y, g.x()[j], wx[j]});
  }
  rep.passed = rep.violations.empty();
  return rep;
}

namespace {

bool segments_cross(const ProfilePoint& a, const ProfilePoint& b, const ProfilePoint& c,
                    const ProfilePoint& d) {
  auto orient = [](const ProfilePoint& p, const ProfilePoint& q, const ProfilePoint& r) {
    return (q.X - p.X) * (r.Y - p.Y) - (q.Y - p.Y) * (r.X - p.X);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

PhysicalProfile physical_profile(const WaveSolution& sol) {
  const GridD& g = sol.grid;
  const TraceD w1y = dtn(sol.t1, g);
  const ConjugatePrimitive<double> prim = conjugate_primitive(w1y, g);
  PhysicalProfile out;
  out.dropped_mean = prim.dropped_mean;
  // The mean of eta_y - 1 stretches the physical period; keep it as a linear term.
  const Eigen::Index n = g.size();
  out.points.resize(static_cast<std::size_t>(n));
  out.min_xi_prime = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = g.x()[j];
    ProfilePoint& pt = out.points[static_cast<std::size_t>(j)];
    pt.X = x + prim.dropped_mean * x + prim.values[j];
    pt.Y = 1.0 + sol.t1[j];
    pt.xi_prime = 1.0 + w1y[j];
    out.min_xi_prime = std::min(out.min_xi_prime, pt.xi_prime);
  }
  out.overhang = out.min_xi_prime < 0;
  if (out.overhang) {
    const auto& p = out.points;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      for (std::size_t j = i + 2; j + 1 < p.size(); ++j)
        if (segments_cross(p[i], p[i + 1], p[j], p[j + 1])) ++out.self_intersections;
  }
  return out;
}

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::kPass:
      return "pass";
    case BoundStatus::kFail:
      return "fail";
    case BoundStatus::kDegenerateEquality:
      return "degenerate-equality";
    case BoundStatus::kNotApplicable:
      return "not-applicable";
  }
  return "unknown";
}

bool BoundsReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const BoundCheck& c) { return c.status == BoundStatus::kFail; });
}

BoundsReport stream_bounds_check(const WaveSolution& sol, double tol) {
  const GridD& g = sol.grid;
  const ParamsD& p = sol.params;
  const auto b = assemble_traces(sol.t1, p, g);
  const Arr psi_y = detail::stream_gradient(b, p).array();
  const Arr theta_y = 1.0 + b.w3y.array();
  BoundsReport rep;

  // Strict inequality f > 0 pointwise; equality everywhere is reported as degenerate.
  auto classify = [tol](const std::string& name, const Arr& slack) {
    BoundCheck c{name, BoundStatus::kPass, slack.minCoeff()};
    if (sup(slack) <= tol)
      c.status = BoundStatus::kDegenerateEquality;
    else if (c.margin <= -tol)
      c.status = BoundStatus::kFail;
    return c;
  };

  rep.checks.push_back(classify("theta_y vs 1", 1.0 - theta_y));
  if (p.gamma <= 0)
    rep.checks.push_back(classify("psi_y < 1 - gamma/2", (1.0 - 0.5 * p.gamma) - psi_y));
  else
    rep.checks.push_back({"psi_y < 1 - gamma/2", BoundStatus::kNotApplicable, 0});
  if (p.gamma >= 0) {
    const double inf_grad = detail::grad_eta_sq(b).minCoeff();
    const double lower = std::min(2.0 - p.gamma + 2.0 * p.eps1, p.gamma * inf_grad);
    rep.checks.push_back(classify("psi_y > min(2 - gamma + 2 eps1, gamma inf|grad eta|^2)", psi_y - lower));
  } else {
    rep.checks.push_back(
        {"psi_y > min(2 - gamma + 2 eps1, gamma inf|grad eta|^2)", BoundStatus::kNotApplicable, 0});
  }
  return rep;
}

DiagnosticsSummary run_diagnostics(const WaveSolution& sol, double tail_tol) {
  DiagnosticsSummary d;
  const ParamsD& p = sol.params;
  const GridD& g = sol.grid;
  d.residual_norm = residual(sol.t1, p, g).cwiseAbs().maxCoeff();
  d.lambda_min = lambda_min(sol.t1, p, g);
  d.nontrivial = sol.t1.cwiseAbs().maxCoeff() > 1e-8;
  if (!(d.lambda_min > 0)) d.failures.push_back("lambda_min <= 0");
  try {
    d.fields = field_checks(sol);
  } catch (const DegenerateJacobian& e) {
    d.failures.push_back(e.what());
    return d;
  }
  if (d.residual_norm > 1e-8 || d.fields.bernoulli > 1e-8) d.failures.push_back("Bernoulli residual");
  if (d.fields.kinematic > 1e-9) d.failures.push_back("kinematic orthogonality");
  d.flow_force = flow_force_spread(sol);
  if (d.flow_force.relative_spread > 1e-6) d.failures.push_back("flow force spread");
  d.flux = flux_identity_check(sol);
  d.nodal = nodal_check(sol, tail_tol);
  d.bounds = stream_bounds_check(sol);
  d.profile = physical_profile(sol);
  if (d.nontrivial) {
    d.froude_bound_ok = p.alpha < p.alpha_cr();
    if (!d.froude_bound_ok) d.failures.push_back("Froude bound");
    if (!d.flux.balanced) d.failures.push_back("flux identity");
    if (!(d.flux.w1_w1y > 0)) d.failures.push_back("sign of integral w1 w1y");
    if (!d.nodal.passed) d.failures.push_back("nodal property: " + d.nodal.summary());
  }
  if (!d.bounds.passed()) d.failures.push_back("psi_y bounds");
  return d;
}

}  // namespace ehdwave
