#include "ehdwave/conjugate_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehdwave {

namespace {

void require_depth_positive(double d) {
  if (!(d > 0) || !std::isfinite(d)) throw ValidationError("d", "depth must be finite and > 0");
}

constexpr double kBracketCap = 1e3;

// Bisection for a sign change of f on [lo, hi].
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double qhat(double d, const ParamsD& p) {
  require_depth_positive(d);
  const double g = p.gamma;
  const double a = 0.5 * (2.0 - g) + 0.5 * g * d * d;
  return a * a / (d * d) + p.eps1 / (d * d) + 2.0 * p.alpha * (d - 1.0);
}

double qhat_d(double d, const ParamsD& p) {
  require_depth_positive(d);
  // Q = (2-g)^2/(4 d^2) + (2-g) g/2 + g^2 d^2/4 + e1/d^2 + 2 alpha (d - 1)
  const double g = p.gamma;
  return -(2.0 - g) * (2.0 - g) / (2.0 * d * d * d) + 0.5 * g * g * d - 2.0 * p.eps1 / (d * d * d) +
         2.0 * p.alpha;
}

double qhat_dd(double d, const ParamsD& p) {
  require_depth_positive(d);
  const double g = p.gamma;
  const double d4 = d * d * d * d;
  return 3.0 * (2.0 - g) * (2.0 - g) / (2.0 * d4) + 0.5 * g * g + 6.0 * p.eps1 / d4;
}

double shat(double d, const ParamsD& p) {
  require_depth_positive(d);
  const double g = p.gamma, a = p.alpha, e = p.eps1;
  return (2.0 - g) * (2.0 - g) / (8.0 * d) - g * g * d * d * d / 24.0 - (2.0 - g) * g * d / 4.0 -
         0.5 * a * d * d + 0.5 * (2.0 * a + 1.0 + e) * d + e / (2.0 * d);
}

double find_dcr(const ParamsD& p) {
  // qhat' -> -inf at 0 and is increasing (qhat'' > 0), so bracket from d = 1.
  double lo = 1.0, hi = 1.0;
  while (qhat_d(lo, p) > 0) {
    lo *= 0.5;
    if (lo < 1.0 / kBracketCap) throw std::runtime_error("find_dcr: bracket search failed");
  }
  while (qhat_d(hi, p) < 0) {
    hi *= 2.0;
    if (hi > kBracketCap) throw std::runtime_error("find_dcr: bracket search failed");
  }
  double d = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = qhat_d(d, p);
    if (std::abs(f) < 1e-14) return d;
    if (f < 0) lo = d; else hi = d;
    double next = d - f / qhat_dd(d, p);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
    if (next == d) return d;
    d = next;
  }
  return d;
}

std::optional<double> find_dstar(const ParamsD& p) {
  const double gap = p.alpha - p.alpha_cr();
  if (std::abs(gap) <= 1e-12) return std::nullopt;
  const double dcr = find_dcr(p);
  const double target = qhat(1.0, p);
  auto f = [&](double d) { return qhat(d, p) - target; };
  if (gap < 0) {
    double hi = std::max(2.0 * dcr, 2.0);
    while (f(hi) < 0) {
      hi *= 2.0;
      if (hi > kBracketCap) throw std::runtime_error("find_dstar: bracket exceeded 1e3");
    }
    return bisect(f, dcr, hi);
  }
  double lo = 0.5 * dcr;
  while (f(lo) < 0) {
    lo *= 0.5;
    if (lo < 1.0 / kBracketCap) throw std::runtime_error("find_dstar: bracket fell below 1e-3");
  }
  return bisect(f, lo, dcr);
}

ConjugateFlowReport bore_verdict(const ParamsD& p) {
  ConjugateFlowReport r;
  r.d_cr = find_dcr(p);
  r.qhat_at_1 = qhat(1.0, p);
  r.shat_at_1 = shat(1.0, p);
  r.d_star = find_dstar(p);
  if (!r.d_star) {
    r.bore_excluded = true;
    r.reason = "unique depth: qhat(d) = qhat(1) only at d = 1";
    return r;
  }
  r.shat_at_star = shat(*r.d_star, p);
  const double diff = *r.shat_at_star - r.shat_at_1;
  r.bore_excluded = std::abs(diff) > 1e-10;
  const double side = p.alpha_cr() - p.alpha;
  r.sign_consistent = (diff > 0) == (side > 0);
  r.reason = r.bore_excluded ? "flow force differs between conjugate depths"
                             : "conjugate depths share the flow force";
  return r;
}

}  // namespace ehdwave
