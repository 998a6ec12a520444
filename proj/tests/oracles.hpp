// Independent reference computations used by the unit and acceptance tests.
// None of these route through the spectral operators under test.

#ifndef EHDWAVE_TESTS_ORACLES_HPP
#define EHDWAVE_TESTS_ORACLES_HPP

#include "ehdwave/core.hpp"
#include "ehdwave/newton.hpp"
#include "ehdwave/wave_system.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using ehdwave::GridD;
using ehdwave::ParamsD;
using ehdwave::TraceD;

/// Sixth-order centered first derivative on the periodic grid.
inline TraceD fd6_derivative(const TraceD& t, double h) {
  const Eigen::Index n = t.size();
  TraceD d(n);
  auto at = [&](Eigen::Index j) { return t[((j % n) + n) % n]; };
  for (Eigen::Index j = 0; j < n; ++j)
    d[j] = (45.0 * (at(j + 1) - at(j - 1)) - 9.0 * (at(j + 2) - at(j - 2)) + (at(j + 3) - at(j - 3))) /
           (60.0 * h);
  return d;
}

/// du/dy at y = 1 for the harmonic u with u(x, 0) = 0 and u(x, 1) = t, from a
/// second-order five-point Laplace solve with M intervals in y on the trace's
/// own periodic x-grid. The boundary derivative uses a fourth-order one-sided
/// stencil so the error is dominated by the O(h^2) interior scheme.
inline TraceD laplace_fd_dtn(const TraceD& t, double half_length, int m) {
  const Eigen::Index n = t.size();
  const double hx = 2.0 * half_length / static_cast<double>(n);
  const double hy = 1.0 / m;
  const Eigen::Index rows = m - 1;
  auto idx = [&](Eigen::Index i, Eigen::Index j) { return ((i % n + n) % n) * rows + (j - 1); };
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n * rows);
  const double ax = 1.0 / (hx * hx), ay = 1.0 / (hy * hy);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 1; j < m; ++j) {
      const Eigen::Index r = idx(i, j);
      trip.emplace_back(r, r, -2.0 * ax - 2.0 * ay);
      trip.emplace_back(r, idx(i - 1, j), ax);
      trip.emplace_back(r, idx(i + 1, j), ax);
      if (j > 1) trip.emplace_back(r, idx(i, j - 1), ay);
      if (j < m - 1)
        trip.emplace_back(r, idx(i, j + 1), ay);
      else
        b[r] -= ay * t[i];
    }
  Eigen::SparseMatrix<double> a(n * rows, n * rows);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  const Eigen::VectorXd u = lu.solve(b);
  TraceD d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u1 = u[idx(i, m - 1)], u2 = u[idx(i, m - 2)], u3 = u[idx(i, m - 3)],
                 u4 = u[idx(i, m - 4)];
    d[i] = (25.0 * t[i] - 48.0 * u1 + 36.0 * u2 - 16.0 * u3 + 3.0 * u4) / (12.0 * hy);
  }
  return d;
}

/// Root of k coth k = r by the fixed point k = r tanh k, which contracts for r > 1.
inline double dispersion_root_fixed_point(double r) {
  double k = r;
  for (int i = 0; i < 100000; ++i) {
    const double next = r * std::tanh(k);
    if (std::abs(next - k) < 1e-15) return next;
    k = next;
  }
  return k;
}

/// Plain bisection for a sign change of f on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Even smooth trace: a sum of a few random sech^2 bumps centred at 0.
inline TraceD random_even_trace(const GridD& g, std::mt19937& rng, double max_amp = 0.1) {
  std::uniform_real_distribution<double> amp(-max_amp, max_amp), width(0.3, 1.0);
  TraceD t = TraceD::Zero(g.size());
  for (int b = 0; b < 3; ++b) {
    const double a = amp(rng), k = width(rng);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double c = std::cosh(k * g.x()[j]);
      t[j] += a / (c * c);
    }
  }
  return t;
}

/// Newton on the unreduced system (t1, t2, t3) with all three traces unknown,
/// Jacobian assembled densely from full_jacobian_apply in the even subspace.
struct FullSolve {
  ehdwave::FullTraces<double> w;
  double residual = 0;
  int iterations = 0;
};

inline FullSolve full_newton(ehdwave::FullTraces<double> w, const ParamsD& p, const GridD& g,
                             double tol, int max_iter = 30) {
  const ehdwave::EvenSpace space(g);
  const Eigen::Index m = space.size();
  auto sup = [](const ehdwave::FullTraces<double>& f) {
    return std::max({f.t1.cwiseAbs().maxCoeff(), f.t2.cwiseAbs().maxCoeff(), f.t3.cwiseAbs().maxCoeff()});
  };
  FullSolve out;
  for (int it = 0; it <= max_iter; ++it) {
    const ehdwave::FullTraces<double> f = ehdwave::full_residual(w, p, g);
    out.residual = sup(f);
    out.iterations = it;
    if (out.residual <= tol) break;
    Eigen::MatrixXd jac(3 * m, 3 * m);
    const TraceD zero = TraceD::Zero(g.size());
    for (Eigen::Index c = 0; c < 3 * m; ++c) {
      ehdwave::FullTraces<double> dw{zero, zero, zero};
      const TraceD e = space.basis(c % m);
      (c < m ? dw.t1 : c < 2 * m ? dw.t2 : dw.t3) = e;
      const ehdwave::FullTraces<double> col = ehdwave::full_jacobian_apply(w, dw, p, g);
      jac.col(c) << space.restrict(col.t1), space.restrict(col.t2), space.restrict(col.t3);
    }
    Eigen::VectorXd rhs(3 * m);
    rhs << space.restrict(f.t1), space.restrict(f.t2), space.restrict(f.t3);
    const Eigen::VectorXd dz = jac.fullPivLu().solve(-rhs);
    w.t1 += space.extend(dz.segment(0, m));
    w.t2 += space.extend(dz.segment(m, m));
    w.t3 += space.extend(dz.segment(2 * m, m));
  }
  out.w = w;
  return out;
}

}  // namespace oracle

#endif  // EHDWAVE_TESTS_ORACLES_HPP
