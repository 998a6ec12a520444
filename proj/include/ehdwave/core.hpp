// Shared value types: physical parameters, the periodic collocation grid,
// surface traces, converged solutions and branch records.
//
// All quantities are dimensionless with the undisturbed depth scaled to 1.
// The fluid occupies the conformal strip 0 < y < 1; the free surface is the
// line y = 1 and the bottom electrode is y = 0.

#ifndef EHDWAVE_CORE_HPP
#define EHDWAVE_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace ehdwave {

template <typename Scalar>
using Trace = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using TraceD = Trace<double>;

/// Invalid user-supplied value; `field()` names the offending input.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Vorticity gamma, relative permittivity eps1 and alpha = 1/F^2.
///
/// The critical value alpha_cr = 1 - gamma + eps1 and the Froude number are
/// always recomputed from the three stored fields.
template <typename Scalar = double>
struct Params {
  Scalar gamma{0};
  Scalar eps1{0};
  Scalar alpha{1};

  Scalar alpha_cr() const { return Scalar(1) - gamma + eps1; }
  Scalar froude() const { return Scalar(1) / std::sqrt(alpha); }
  /// alpha_cr - alpha; positive in the solitary-wave regime.
  Scalar eps() const { return alpha_cr() - alpha; }

  Params with_alpha(Scalar a) const { return Params{gamma, eps1, a}; }
};

using ParamsD = Params<double>;

template <typename Scalar = double>
Params<Scalar> make_params(Scalar gamma, Scalar eps1, Scalar alpha) {
  if (!std::isfinite(gamma)) throw ValidationError("gamma", "must be finite");
  if (!(eps1 >= Scalar(0)) || !std::isfinite(eps1))
    throw ValidationError("eps1", "must be finite and >= 0");
  if (!(alpha > Scalar(0)) || !std::isfinite(alpha))
    throw ValidationError("alpha", "must be finite and > 0");
  return Params<Scalar>{gamma, eps1, alpha};
}

/// Uniform periodic grid x_j = -L + 2Lj/N on [-L, L) with the real-FFT
/// wavenumbers k_n = pi n / L, n = 0..N/2.
template <typename Scalar = double>
class Grid {
 public:
  Grid(Scalar half_length, Eigen::Index n_points)
      : half_length_(half_length), n_(n_points) {
    if (!(half_length > Scalar(0)) || !std::isfinite(half_length))
      throw ValidationError("half_length", "must be finite and > 0");
    if (n_points < 16) throw ValidationError("n_points", "must be >= 16");
    if (n_points % 2 != 0) throw ValidationError("n_points", "must be even");
    const Scalar h = spacing();
    x_.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) x_[j] = -half_length_ + h * Scalar(j);
    k_.resize(n_ / 2 + 1);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    for (Eigen::Index n = 0; n <= n_ / 2; ++n) k_[n] = pi * Scalar(n) / half_length_;
  }

  Scalar half_length() const { return half_length_; }
  Eigen::Index size() const { return n_; }
  Eigen::Index modes() const { return n_ / 2 + 1; }
  Scalar spacing() const { return Scalar(2) * half_length_ / Scalar(n_); }
  const Trace<Scalar>& x() const { return x_; }
  const Trace<Scalar>& wavenumbers() const { return k_; }
  /// Index of the collocation point x = 0.
  Eigen::Index center() const { return n_ / 2; }
  /// Index of the point mirrored through x = 0 (x_{N-j} = -x_j).
  Eigen::Index mirror(Eigen::Index j) const { return (n_ - j) % n_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.half_length_ == b.half_length_ && a.n_ == b.n_;
  }

 private:
  Scalar half_length_;
  Eigen::Index n_;
  Trace<Scalar> x_;
  Trace<Scalar> k_;
};

using GridD = Grid<double>;

template <typename Scalar = double>
Grid<Scalar> make_grid(Scalar half_length, Eigen::Index n_points) {
  return Grid<Scalar>(half_length, n_points);
}

template <typename Scalar>
void require_on_grid(const Trace<Scalar>& t, const Grid<Scalar>& g) {
  if (t.size() != g.size())
    throw ValidationError("trace", "length " + std::to_string(t.size()) +
                                       " does not match grid size " + std::to_string(g.size()));
}

/// Even part of a trace: (t_j + t_{N-j}) / 2.
template <typename Derived>
auto symmetrize(const Eigen::MatrixBase<Derived>& t) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = t.size();
  Trace<Scalar> out(n);
  for (Eigen::Index j = 0; j < n; ++j) out[j] = Scalar(0.5) * (t[j] + t[(n - j) % n]);
  return out;
}

/// Largest |t_j - t_{N-j}| relative to max|t| (0 for the zero trace).
template <typename Derived>
typename Derived::Scalar symmetry_defect(const Eigen::MatrixBase<Derived>& t) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = t.size();
  const Scalar scale = t.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return Scalar(0);
  Scalar worst(0);
  for (Eigen::Index j = 0; j < n; ++j) worst = std::max(worst, std::abs(t[j] - t[(n - j) % n]));
  return worst / scale;
}

template <typename Derived>
bool is_even(const Eigen::MatrixBase<Derived>& t, typename Derived::Scalar rel_tol = 1e-12) {
  return symmetry_defect(t) <= rel_tol;
}

/// max |t| over the outer 10% of the box (|x| >= 0.9 L).
template <typename Scalar>
Scalar tail_of(const Trace<Scalar>& t, const Grid<Scalar>& g) {
  require_on_grid(t, g);
  Scalar worst(0);
  const Scalar edge = Scalar(0.9) * g.half_length();
  for (Eigen::Index j = 0; j < g.size(); ++j)
    if (std::abs(g.x()[j]) >= edge) worst = std::max(worst, std::abs(t[j]));
  return worst;
}

/// Converged surface trace t1 = w1 on y = 1 plus the scalars derived from it.
struct WaveSolution {
  ParamsD params;
  GridD grid{1.0, 16};
  TraceD t1;
  double residual_norm{0};
  double amplitude{0};
  double tail{0};
};

/// Packages a trace, recomputing amplitude and tail from it.
inline WaveSolution make_solution(const ParamsD& p, const GridD& g, TraceD t1, double residual_norm) {
  require_on_grid(t1, g);
  WaveSolution s{p, g, std::move(t1), residual_norm, 0.0, 0.0};
  s.amplitude = s.t1[g.center()];
  s.tail = tail_of(s.t1, g);
  return s;
}

/// One accepted continuation point and its monitors.
struct BranchPoint {
  double s{0};
  double alpha{0};
  double amplitude{0};
  double monitor_m1{0};  // inf (1 + eps1 - 2 alpha t1) on the surface
  double monitor_m2{0};  // inf |grad eta| on the surface
  double monitor_m3{0};  // sup |grad eta| on the surface
  double froude{0};
  double lambda_min{0};
  double residual_norm{0};
  double half_length{0};
  Eigen::Index n_points{0};
};

}  // namespace ehdwave

#endif  // EHDWAVE_CORE_HPP
