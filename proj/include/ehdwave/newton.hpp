// Damped Newton iteration for R(t1; alpha) = 0 at fixed parameters.

#ifndef EHDWAVE_NEWTON_HPP
#define EHDWAVE_NEWTON_HPP

#include "ehdwave/core.hpp"
#include "ehdwave/wave_system.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ehdwave {

enum class LinearSolver { kAuto, kDense, kKrylov };

struct NewtonConfig {
  double tol = 1e-11;
  int max_iter = 40;
  double backtrack = 0.5;
  double min_step = 1.0 / 1024.0;
  LinearSolver linear_solver = LinearSolver::kAuto;
  /// kAuto switches from dense LU to preconditioned GMRES above this size.
  Eigen::Index dense_limit = 1024;
  double krylov_tol = 1e-13;
  int krylov_restart = 60;
  int krylov_max_iter = 600;

  void validate() const;
};

/// Even traces on the N-point grid, stored by their values at x >= 0
/// (indices N/2, ..., N-1, 0 of the full grid).
class EvenSpace {
 public:
  explicit EvenSpace(const GridD& g) : n_(g.size()) {}

  Eigen::Index full_size() const { return n_; }
  Eigen::Index size() const { return n_ / 2 + 1; }
  Eigen::Index full_index(Eigen::Index r) const { return (n_ / 2 + r) % n_; }

  Eigen::VectorXd restrict(const TraceD& t) const;
  TraceD extend(const Eigen::VectorXd& h) const;
  /// Even trace whose reduced coordinates are the r-th unit vector.
  TraceD basis(Eigen::Index r) const;

 private:
  Eigen::Index n_;
};

/// Reduced even-space Jacobian, assembled column by column from `lin`.
Eigen::MatrixXd dense_jacobian(const Linearization<double>& lin, const EvenSpace& space);

/// Fourier preconditioner 1 / m(k) with |m| floored at 1e-3 (1 + eps1).
TraceD apply_symbol_preconditioner(const TraceD& t, const ParamsD& p, const GridD& g);

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0;
  bool converged = false;
};

/// Right-preconditioned restarted GMRES for op(x) = b.
template <typename Op, typename Prec>
GmresResult gmres(const Op& op, const Prec& prec, const Eigen::VectorXd& b, double tol, int restart,
                  int max_iter);

enum class SolveFailure { kNoConvergence, kLeftAdmissibleSet, kSingularLinearSolve, kNonFinite };

const char* to_string(SolveFailure f);

/// A failed solve; carries the best iterate seen and the residual history.
class SolveError : public std::runtime_error {
 public:
  SolveError(SolveFailure kind, const std::string& what, TraceD best, std::vector<double> history)
      : std::runtime_error(what), kind_(kind), best_(std::move(best)), history_(std::move(history)) {}
  SolveFailure kind() const noexcept { return kind_; }
  const TraceD& best_iterate() const noexcept { return best_; }
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  SolveFailure kind_;
  TraceD best_;
  std::vector<double> history_;
};

struct NewtonOutcome {
  WaveSolution solution;
  /// Residual sup-norm before each step and at the final iterate.
  std::vector<double> history;
  int iterations = 0;
  /// Converged to a nontrivial wave although alpha >= alpha_cr.
  bool froude_bound_violation = false;
};

/// Newton with backtracking; every iterate is re-symmetrized and must keep
/// lambda_min > 0.
NewtonOutcome newton_iterate(const TraceD& t1_init, const ParamsD& p, const GridD& g,
                             const NewtonConfig& cfg = {});

WaveSolution newton_solve(const TraceD& t1_init, const ParamsD& p, const GridD& g,
                          const NewtonConfig& cfg = {});

// ---------------------------------------------------------------------------

template <typename Op, typename Prec>
GmresResult gmres(const Op& op, const Prec& prec, const Eigen::VectorXd& b, double tol, int restart,
                  int max_iter) {
  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXd r = b;
  while (res.iterations < max_iter) {
    const double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    const int m = restart;
    Eigen::MatrixXd v(n, m + 1);
    Eigen::MatrixXd z(n, m);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd gvec = Eigen::VectorXd::Zero(m + 1);
    gvec[0] = beta;
    v.col(0) = r / beta;
    int k = 0;
    for (; k < m && res.iterations < max_iter; ++k, ++res.iterations) {
      z.col(k) = prec(v.col(k));
      Eigen::VectorXd w = op(z.col(k));
      for (int i = 0; i <= k; ++i) {  // modified Gram-Schmidt
        h(i, k) = w.dot(v.col(i));
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double tmp = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = tmp;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      if (denom == 0.0) break;
      cs[k] = h(k, k) / denom;
      sn[k] = h(k + 1, k) / denom;
      h(k, k) = denom;
      h(k + 1, k) = 0;
      gvec[k + 1] = -sn[k] * gvec[k];
      gvec[k] = cs[k] * gvec[k];
      if (std::abs(gvec[k + 1]) / bnorm <= tol) {
        ++k;
        ++res.iterations;
        break;
      }
    }
    const Eigen::VectorXd y =
        h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(gvec.head(k));
    res.x += z.leftCols(k) * y;
    r = b - op(res.x);
    if (!r.allFinite()) return res;
  }
  res.relative_residual = r.norm() / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

}  // namespace ehdwave

#endif  // EHDWAVE_NEWTON_HPP
