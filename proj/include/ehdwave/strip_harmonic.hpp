// Fourier-multiplier operators for functions harmonic in the strip
// 0 < y < 1 that vanish on the bottom y = 0.
//
// A trace t on y = 1 with real-FFT coefficients c_n extends uniquely to
//   u(x, y) = sum_n c_n sinh(k_n y) / sinh(k_n) e^{i k_n (x + L)}
// (the n = 0 mode extends linearly, c_0 y). Every operator here is a
// diagonal multiplier on the c_n.

#ifndef EHDWAVE_STRIP_HARMONIC_HPP
#define EHDWAVE_STRIP_HARMONIC_HPP

#include "ehdwave/core.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>

namespace ehdwave {

template <typename Scalar>
using SpectralCoeffs = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  // kissfft caches twiddles per size; one engine per thread keeps calls pure.
  thread_local Eigen::FFT<Scalar> engine = [] {
    Eigen::FFT<Scalar> f;
    f.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    return f;
  }();
  return engine;
}

}  // namespace detail

/// Real-FFT coefficients c_n, n = 0..N/2 (unnormalized forward transform).
template <typename Scalar>
SpectralCoeffs<Scalar> to_spectral(const Trace<Scalar>& t, const Grid<Scalar>& g) {
  require_on_grid(t, g);
  SpectralCoeffs<Scalar> c(g.modes());
  Trace<Scalar> src = t;
  detail::fft_engine<Scalar>().fwd(c.data(), src.data(), g.size());
  c[0] = std::complex<Scalar>(c[0].real(), 0);
  c[g.modes() - 1] = std::complex<Scalar>(c[g.modes() - 1].real(), 0);
  return c;
}

template <typename Scalar>
Trace<Scalar> from_spectral(const SpectralCoeffs<Scalar>& c, const Grid<Scalar>& g) {
  if (c.size() != g.modes()) throw ValidationError("coeffs", "mode count does not match grid");
  Trace<Scalar> out(g.size());
  SpectralCoeffs<Scalar> src = c;
  detail::fft_engine<Scalar>().inv(out.data(), src.data(), g.size());
  return out;
}

/// Applies c_n -> m(k_n, n) c_n. `m` returns a real or complex multiplier.
template <typename Scalar, typename Multiplier>
Trace<Scalar> apply_multiplier(const Trace<Scalar>& t, const Grid<Scalar>& g, Multiplier&& m) {
  SpectralCoeffs<Scalar> c = to_spectral(t, g);
  const auto& k = g.wavenumbers();
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= m(k[n], n);
  return from_spectral(c, g);
}

/// k coth k, with the k -> 0 limit 1. Written with exp(-2k) so large k
/// neither overflows nor loses digits.
template <typename Scalar>
Scalar dtn_symbol(Scalar k) {
  if (k == Scalar(0)) return Scalar(1);
  const Scalar e = std::exp(Scalar(-2) * k);
  return k * (Scalar(1) + e) / -std::expm1(Scalar(-2) * k);
}

/// sinh(k y) / sinh(k); the k = 0 limit is y.
template <typename Scalar>
Scalar extension_symbol(Scalar k, Scalar y) {
  if (k == Scalar(0)) return y;
  return std::exp(-k * (Scalar(1) - y)) * std::expm1(Scalar(-2) * k * y) / std::expm1(Scalar(-2) * k);
}

/// k cosh(k y) / sinh(k); the k = 0 limit is 1. Equals dtn_symbol at y = 1.
template <typename Scalar>
Scalar extension_dy_symbol(Scalar k, Scalar y) {
  if (k == Scalar(0)) return Scalar(1);
  return k * std::exp(-k * (Scalar(1) - y)) * (Scalar(1) + std::exp(Scalar(-2) * k * y)) /
         -std::expm1(Scalar(-2) * k);
}

/// Spectral x-derivative; the Nyquist mode's derivative is zeroed.
template <typename Scalar>
Trace<Scalar> ddx(const Trace<Scalar>& t, const Grid<Scalar>& g) {
  const Eigen::Index nyq = g.modes() - 1;
  return apply_multiplier(t, g, [nyq](Scalar k, Eigen::Index n) {
    return n == nyq ? std::complex<Scalar>(0) : std::complex<Scalar>(0, k);
  });
}

/// Dirichlet-to-Neumann map of the strip: d/dy of the harmonic extension at y = 1.
template <typename Scalar>
Trace<Scalar> dtn(const Trace<Scalar>& t, const Grid<Scalar>& g) {
  return apply_multiplier(t, g, [](Scalar k, Eigen::Index) { return dtn_symbol(k); });
}

template <typename Scalar>
void require_depth(Scalar y) {
  if (!(y >= Scalar(0) && y <= Scalar(1)))
    throw ValidationError("y", "interior height must lie in [0, 1]");
}

/// Harmonic extension of t sampled at height y.
template <typename Scalar>
Trace<Scalar> eval_interior(const Trace<Scalar>& t, const Grid<Scalar>& g, Scalar y) {
  require_depth(y);
  return apply_multiplier(t, g, [y](Scalar k, Eigen::Index) { return extension_symbol(k, y); });
}

/// y-derivative of the harmonic extension of t at height y.
template <typename Scalar>
Trace<Scalar> eval_interior_dy(const Trace<Scalar>& t, const Grid<Scalar>& g, Scalar y) {
  require_depth(y);
  return apply_multiplier(t, g, [y](Scalar k, Eigen::Index) { return extension_dy_symbol(k, y); });
}

template <typename Scalar>
struct ConjugatePrimitive {
  Trace<Scalar> values;
  /// Mean of the input that was discarded; large values mean the box is
  /// too short for the input to have decayed.
  Scalar dropped_mean{0};
};

/// Zero-mean spectral antiderivative: c_n -> c_n / (i k_n), n >= 1.
///
/// With t = eta_y - 1 on the surface this returns xi(x, 1) - x, since
/// xi_x = eta_y for the holomorphic map xi + i eta.
template <typename Scalar>
ConjugatePrimitive<Scalar> conjugate_primitive(const Trace<Scalar>& t, const Grid<Scalar>& g) {
  SpectralCoeffs<Scalar> c = to_spectral(t, g);
  const auto& k = g.wavenumbers();
  ConjugatePrimitive<Scalar> out;
  out.dropped_mean = c[0].real() / Scalar(g.size());
  c[0] = 0;
  c[c.size() - 1] = 0;
  for (Eigen::Index n = 1; n + 1 < c.size(); ++n) c[n] /= std::complex<Scalar>(0, k[n]);
  out.values = from_spectral(c, g);
  return out;
}

/// Evaluates the trigonometric interpolant of t at an arbitrary abscissa.
template <typename Scalar>
Scalar interpolate(const Trace<Scalar>& t, const Grid<Scalar>& g, Scalar x) {
  const SpectralCoeffs<Scalar> c = to_spectral(t, g);
  const auto& k = g.wavenumbers();
  const Scalar shift = x + g.half_length();
  const Eigen::Index nyq = c.size() - 1;
  Scalar sum = c[0].real() + c[nyq].real() * std::cos(k[nyq] * shift);
  for (Eigen::Index n = 1; n < nyq; ++n)
    sum += Scalar(2) * (c[n] * std::polar(Scalar(1), k[n] * shift)).real();
  return sum / Scalar(g.size());
}

}  // namespace ehdwave

#endif  // EHDWAVE_STRIP_HARMONIC_HPP
