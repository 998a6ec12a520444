// The surface equation for t1 = w1|_{y=1}.
//
// Unknowns of the conformal problem are the harmonic perturbations
//   w1 = eta - y,  w2 = zeta - (1 - gamma) y,  w3 = vartheta - y.
// The kinematic condition is explicit in the traces,
//   w2 = -gamma t1 - (gamma/2) t1^2   on y = 1,
// and the electric potential is exactly vartheta = y, so w3 = 0. What is
// left is a single Bernoulli equation R(t1; alpha) = 0 on the surface:
//   R = (gamma (t1 + w1y + t1 w1y) + w2y + 1)^2 + eps1
//       - (1 + eps1 - 2 alpha t1) (w1x^2 + (1 + w1y)^2).

#ifndef EHDWAVE_WAVE_SYSTEM_HPP
#define EHDWAVE_WAVE_SYSTEM_HPP

#include "ehdwave/core.hpp"
#include "ehdwave/strip_harmonic.hpp"

#include <array>
#include <limits>

namespace ehdwave {

template <typename Scalar>
struct TraceBundle {
  Trace<Scalar> t1, w1x, w1y;
  Trace<Scalar> t2, w2y;
  Trace<Scalar> w3, w3y;
};

template <typename Scalar>
Trace<Scalar> stream_trace(const Trace<Scalar>& t1, const Params<Scalar>& p) {
  return (-p.gamma * t1.array() - Scalar(0.5) * p.gamma * t1.array().square()).matrix();
}

template <typename Scalar>
TraceBundle<Scalar> assemble_traces(const Trace<Scalar>& t1, const Params<Scalar>& p,
                                    const Grid<Scalar>& g) {
  require_on_grid(t1, g);
  TraceBundle<Scalar> b;
  b.t1 = t1;
  b.w1x = ddx(t1, g);
  b.w1y = dtn(t1, g);
  b.t2 = stream_trace(t1, p);
  b.w2y = dtn(b.t2, g);
  b.w3 = Trace<Scalar>::Zero(g.size());
  b.w3y = Trace<Scalar>::Zero(g.size());
  return b;
}

namespace detail {

template <typename Scalar>
void require_finite(const Trace<Scalar>& t, const char* what) {
  if (!t.allFinite())
    throw std::overflow_error(std::string("non-finite values in ") + what);
}

// gamma (t1 + w1y + t1 w1y) + w2y + 1, which equals zeta_y + gamma eta eta_y on y = 1.
template <typename Scalar>
Trace<Scalar> stream_gradient(const TraceBundle<Scalar>& b, const Params<Scalar>& p) {
  return (p.gamma * (b.t1.array() + b.w1y.array() + b.t1.array() * b.w1y.array()) +
          b.w2y.array() + Scalar(1))
      .matrix();
}

// |grad eta|^2 = w1x^2 + (1 + w1y)^2.
template <typename Scalar>
Trace<Scalar> grad_eta_sq(const TraceBundle<Scalar>& b) {
  return (b.w1x.array().square() + (Scalar(1) + b.w1y.array()).square()).matrix();
}

}  // namespace detail

template <typename Scalar>
Trace<Scalar> residual_from(const TraceBundle<Scalar>& b, const Params<Scalar>& p) {
  const Trace<Scalar> a = detail::stream_gradient(b, p);
  const Trace<Scalar> c = detail::grad_eta_sq(b);
  Trace<Scalar> r =
      (a.array().square() + p.eps1 * (Scalar(2) * b.w3y.array() + b.w3y.array().square() + Scalar(1)) -
       (Scalar(1) + p.eps1 - Scalar(2) * p.alpha * b.t1.array()) * c.array())
          .matrix();
  detail::require_finite(r, "Bernoulli residual");
  return r;
}

/// Pointwise Bernoulli residual on the surface.
template <typename Scalar>
Trace<Scalar> residual(const Trace<Scalar>& t1, const Params<Scalar>& p, const Grid<Scalar>& g) {
  detail::require_finite(t1, "t1");
  return residual_from(assemble_traces(t1, p, g), p);
}

/// dR/dalpha = 2 t1 |grad eta|^2.
template <typename Scalar>
Trace<Scalar> residual_dalpha(const Trace<Scalar>& t1, const Params<Scalar>& p,
                              const Grid<Scalar>& g) {
  const auto b = assemble_traces(t1, p, g);
  return (Scalar(2) * t1.array() * detail::grad_eta_sq(b).array()).matrix();
}

/// Fourier symbol of the linearization at t1 = 0: 2((gamma + alpha) - (1 + eps1) k coth k).
template <typename Scalar>
Scalar linear_multiplier(Scalar k, const Params<Scalar>& p) {
  return Scalar(2) * ((p.gamma + p.alpha) - (Scalar(1) + p.eps1) * dtn_symbol(k));
}

/// Positive root of linear_multiplier, i.e. (gamma + alpha) = (1 + eps1) k coth k.
/// Exists exactly when alpha > alpha_cr; returns a negative value otherwise.
template <typename Scalar>
Scalar dispersion_root(const Params<Scalar>& p) {
  const Scalar ratio = (p.gamma + p.alpha) / (Scalar(1) + p.eps1);
  if (!(ratio > Scalar(1))) return Scalar(-1);
  // k coth k is increasing from 1 and exceeds k, so the root lies in (0, ratio].
  Scalar lo(0), hi = ratio;
  for (int it = 0; it < 200 && hi - lo > std::numeric_limits<Scalar>::epsilon() * hi; ++it) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    (dtn_symbol(mid) < ratio ? lo : hi) = mid;
  }
  return Scalar(0.5) * (lo + hi);
}

/// Frozen coefficients of dR at a base trace, reusable across many directions.
template <typename Scalar>
class Linearization {
 public:
  Linearization(const Trace<Scalar>& t1, const Params<Scalar>& p, const Grid<Scalar>& g)
      : p_(p), g_(g) {
    const auto b = assemble_traces(t1, p, g);
    t1_ = t1;
    w1x_ = b.w1x;
    w1y_ = b.w1y;
    stream_ = detail::stream_gradient(b, p);
    grad_sq_ = detail::grad_eta_sq(b);
    bern_ = (Scalar(1) + p.eps1 - Scalar(2) * p.alpha * t1.array()).matrix();
  }

  Trace<Scalar> apply(const Trace<Scalar>& dt) const {
    require_on_grid(dt, g_);
    const Trace<Scalar> dx = ddx(dt, g_);
    const Trace<Scalar> dy = dtn(dt, g_);
    const Trace<Scalar> dw2 = (-p_.gamma * dt.array() * (Scalar(1) + t1_.array())).matrix();
    const Trace<Scalar> dw2y = dtn(dw2, g_);
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> da = p_.gamma * (dt.array() + dy.array() + dt.array() * w1y_.array() +
                                t1_.array() * dy.array()) +
                    dw2y.array();
    return (Scalar(2) * stream_.array() * da + Scalar(2) * p_.alpha * grad_sq_.array() * dt.array() -
            Scalar(2) * bern_.array() *
                (w1x_.array() * dx.array() + (Scalar(1) + w1y_.array()) * dy.array()))
        .matrix();
  }

  const Grid<Scalar>& grid() const { return g_; }
  const Params<Scalar>& params() const { return p_; }

 private:
  Params<Scalar> p_;
  Grid<Scalar> g_;
  Trace<Scalar> t1_, w1x_, w1y_, stream_, grad_sq_, bern_;
};

/// Directional derivative of `residual` at t1 in the direction dt.
template <typename Scalar>
Trace<Scalar> jacobian_apply(const Trace<Scalar>& t1, const Trace<Scalar>& dt,
                             const Params<Scalar>& p, const Grid<Scalar>& g) {
  return Linearization<Scalar>(t1, p, g).apply(dt);
}

/// Interior heights at which infima over the strip are sampled, besides y = 1.
inline constexpr std::array<double, 3> kInteriorLevels{0.25, 0.5, 0.75};

/// lambda(w, alpha) = inf 4 (1 + eps1 - 2 alpha w1)^2 (w1x^2 + (1 + w1y)^2),
/// over the surface and the interior levels.
template <typename Scalar>
Scalar lambda_min(const Trace<Scalar>& t1, const Params<Scalar>& p, const Grid<Scalar>& g) {
  require_on_grid(t1, g);
  const Trace<Scalar> w1x_top = ddx(t1, g);
  auto level = [&](const Trace<Scalar>& w1, const Trace<Scalar>& w1x, const Trace<Scalar>& w1y) {
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> f = Scalar(4) * (Scalar(1) + p.eps1 - Scalar(2) * p.alpha * w1.array()).square() *
                   (w1x.array().square() + (Scalar(1) + w1y.array()).square());
    return f.minCoeff();
  };
  Scalar lo = level(t1, w1x_top, dtn(t1, g));
  for (double yd : kInteriorLevels) {
    const Scalar y(yd);
    lo = std::min(lo, level(eval_interior(t1, g, y), eval_interior(w1x_top, g, y),
                            eval_interior_dy(t1, g, y)));
  }
  return lo;
}

// Unreduced three-trace system (w1, w2, w3 on y = 1 all unknown); kept as
// an oracle for the elimination above.

template <typename Scalar>
struct FullTraces {
  Trace<Scalar> t1, t2, t3;
};

/// (F1, F2, F3) with F1 = t2 + gamma t1 + (gamma/2) t1^2 and F3 = t3.
template <typename Scalar>
FullTraces<Scalar> full_residual(const FullTraces<Scalar>& w, const Params<Scalar>& p,
                                 const Grid<Scalar>& g) {
  TraceBundle<Scalar> b;
  b.t1 = w.t1;
  b.w1x = ddx(w.t1, g);
  b.w1y = dtn(w.t1, g);
  b.t2 = w.t2;
  b.w2y = dtn(w.t2, g);
  b.w3 = w.t3;
  b.w3y = dtn(w.t3, g);
  FullTraces<Scalar> f;
  f.t1 = (w.t2.array() + p.gamma * w.t1.array() + Scalar(0.5) * p.gamma * w.t1.array().square())
             .matrix();
  f.t2 = residual_from(b, p);
  f.t3 = w.t3;
  return f;
}

/// Directional derivative of full_residual.
template <typename Scalar>
FullTraces<Scalar> full_jacobian_apply(const FullTraces<Scalar>& w, const FullTraces<Scalar>& dw,
                                       const Params<Scalar>& p, const Grid<Scalar>& g) {
  const Trace<Scalar> w1x = ddx(w.t1, g), w1y = dtn(w.t1, g), w2y = dtn(w.t2, g),
                      w3y = dtn(w.t3, g);
  const Trace<Scalar> d1x = ddx(dw.t1, g), d1y = dtn(dw.t1, g), d2y = dtn(dw.t2, g),
                      d3y = dtn(dw.t3, g);
  using Arr = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  const Arr a = p.gamma * (w.t1.array() + w1y.array() + w.t1.array() * w1y.array()) +
                 w2y.array() + Scalar(1);
  const Arr da = p.gamma * (dw.t1.array() + d1y.array() + dw.t1.array() * w1y.array() +
                             w.t1.array() * d1y.array()) +
                  d2y.array();
  const Arr c = w1x.array().square() + (Scalar(1) + w1y.array()).square();
  const Arr bern = Scalar(1) + p.eps1 - Scalar(2) * p.alpha * w.t1.array();
  FullTraces<Scalar> f;
  f.t1 = (dw.t2.array() + p.gamma * (Scalar(1) + w.t1.array()) * dw.t1.array()).matrix();
  f.t2 = (Scalar(2) * a * da + p.eps1 * Scalar(2) * (Scalar(1) + w3y.array()) * d3y.array() +
          Scalar(2) * p.alpha * c * dw.t1.array() -
          Scalar(2) * bern * (w1x.array() * d1x.array() + (Scalar(1) + w1y.array()) * d1y.array()))
             .matrix();
  f.t3 = dw.t3;
  return f;
}

}  // namespace ehdwave

#endif  // EHDWAVE_WAVE_SYSTEM_HPP
