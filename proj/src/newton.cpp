#include "ehdwave/newton.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehdwave {

void NewtonConfig::validate() const {
  if (!(tol > 0)) throw ValidationError("tol", "must be > 0");
  if (max_iter < 1) throw ValidationError("max_iter", "must be >= 1");
  if (!(backtrack > 0 && backtrack < 1)) throw ValidationError("backtrack", "must lie in (0, 1)");
  if (!(min_step > 0 && min_step <= 1)) throw ValidationError("min_step", "must lie in (0, 1]");
}

Eigen::VectorXd EvenSpace::restrict(const TraceD& t) const {
  Eigen::VectorXd h(size());
  for (Eigen::Index r = 0; r < size(); ++r) h[r] = t[full_index(r)];
  return h;
}

TraceD EvenSpace::extend(const Eigen::VectorXd& h) const {
  TraceD t(n_);
  for (Eigen::Index r = 0; r < size(); ++r) {
    const Eigen::Index j = full_index(r);
    t[j] = h[r];
    t[(n_ - j) % n_] = h[r];
  }
  return t;
}

TraceD EvenSpace::basis(Eigen::Index r) const {
  TraceD t = TraceD::Zero(n_);
  const Eigen::Index j = full_index(r);
  t[j] = 1.0;
  t[(n_ - j) % n_] = 1.0;
  return t;
}

Eigen::MatrixXd dense_jacobian(const Linearization<double>& lin, const EvenSpace& space) {
  const Eigen::Index m = space.size();
  Eigen::MatrixXd jac(m, m);
  for (Eigen::Index r = 0; r < m; ++r) jac.col(r) = space.restrict(lin.apply(space.basis(r)));
  return jac;
}

TraceD apply_symbol_preconditioner(const TraceD& t, const ParamsD& p, const GridD& g) {
  const double floor = 1e-3 * (1.0 + p.eps1);
  return apply_multiplier(t, g, [&](double k, Eigen::Index) {
    const double m = linear_multiplier(k, p);
    // Keep the sign of the symbol so the preconditioned operator stays near +I.
    const double mag = std::max(std::abs(m), floor);
    return 1.0 / (m < 0 ? -mag : mag);
  });
}

const char* to_string(SolveFailure f) {
  switch (f) {
    case SolveFailure::kNoConvergence:
      return "NoConvergence";
    case SolveFailure::kLeftAdmissibleSet:
      return "LeftAdmissibleSet";
    case SolveFailure::kSingularLinearSolve:
      return "SingularLinearSolve";
    case SolveFailure::kNonFinite:
      return "NonFinite";
  }
  return "unknown";
}

namespace {

double sup_norm(const TraceD& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

bool use_dense(const NewtonConfig& cfg, const GridD& g) {
  switch (cfg.linear_solver) {
    case LinearSolver::kDense:
      return true;
    case LinearSolver::kKrylov:
      return false;
    case LinearSolver::kAuto:
      break;
  }
  return g.size() <= cfg.dense_limit;
}

// Solves J dt = -r in the even subspace.
Eigen::VectorXd newton_direction(const TraceD& t1, const TraceD& r, const ParamsD& p,
                                 const GridD& g, const EvenSpace& space, const NewtonConfig& cfg,
                                 bool& ok) {
  const Linearization<double> lin(t1, p, g);
  const Eigen::VectorXd rhs = -space.restrict(r);
  ok = true;
  if (use_dense(cfg, g)) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense_jacobian(lin, space));
    if (!(lu.rcond() > 1e-15)) {
      ok = false;
      return {};
    }
    Eigen::VectorXd step = lu.solve(rhs);
    ok = step.allFinite();
    return step;
  }
  auto op = [&](const Eigen::VectorXd& h) { return space.restrict(lin.apply(space.extend(h))); };
  auto prec = [&](const Eigen::VectorXd& h) {
    return space.restrict(apply_symbol_preconditioner(space.extend(h), p, g));
  };
  GmresResult res = gmres(op, prec, rhs, cfg.krylov_tol, cfg.krylov_restart, cfg.krylov_max_iter);
  // A loosely solved system still gives a descent direction in practice.
  ok = res.x.allFinite() && res.relative_residual < 1e-6;
  return res.x;
}

}  // namespace

NewtonOutcome newton_iterate(const TraceD& t1_init, const ParamsD& p, const GridD& g,
                             const NewtonConfig& cfg) {
  cfg.validate();
  require_on_grid(t1_init, g);
  const EvenSpace space(g);
  TraceD t1 = symmetrize(t1_init);
  std::vector<double> history;

  if (!(lambda_min(t1, p, g) > 0))
    throw SolveError(SolveFailure::kLeftAdmissibleSet, "initial iterate has lambda_min <= 0", t1,
                     history);

  auto fail = [&](SolveFailure kind, const std::string& why) {
    std::ostringstream msg;
    msg << to_string(kind) << ": " << why << " after " << history.size() << " residual evaluations";
    if (!history.empty()) msg << " (best residual " << *std::min_element(history.begin(), history.end()) << ")";
    throw SolveError(kind, msg.str(), t1, history);
  };

  TraceD r;
  try {
    r = residual(t1, p, g);
  } catch (const std::overflow_error& e) {
    fail(SolveFailure::kNonFinite, e.what());
  }
  double norm = sup_norm(r);
  history.push_back(norm);

  int it = 0;
  while (norm > cfg.tol) {
    if (it >= cfg.max_iter) fail(SolveFailure::kNoConvergence, "iteration budget exhausted");
    bool ok = false;
    const Eigen::VectorXd step = newton_direction(t1, r, p, g, space, cfg, ok);
    if (!ok) fail(SolveFailure::kSingularLinearSolve, "Jacobian solve broke down");
    const TraceD dt = space.extend(step);

    bool accepted = false;
    bool left_set = false;
    for (double lam = 1.0; lam >= cfg.min_step; lam *= cfg.backtrack) {
      TraceD trial = symmetrize(TraceD(t1 + lam * dt));
      if (!trial.allFinite()) continue;
      if (!(lambda_min(trial, p, g) > 0)) {
        left_set = true;
        continue;
      }
      TraceD r_trial;
      try {
        r_trial = residual(trial, p, g);
      } catch (const std::overflow_error&) {
        continue;
      }
      const double n_trial = sup_norm(r_trial);
      if (n_trial <= norm) {
        t1 = std::move(trial);
        r = std::move(r_trial);
        norm = n_trial;
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) {
      if (left_set) fail(SolveFailure::kLeftAdmissibleSet, "every damped step left lambda > 0");
      fail(SolveFailure::kNoConvergence, "no damped step decreased the residual");
    }
    history.push_back(norm);
  }

  NewtonOutcome out;
  out.solution = make_solution(p, g, std::move(t1), norm);
  out.history = std::move(history);
  out.iterations = it;
  out.froude_bound_violation =
      p.alpha >= p.alpha_cr() && out.solution.t1.cwiseAbs().maxCoeff() > std::sqrt(cfg.tol);
  return out;
}

WaveSolution newton_solve(const TraceD& t1_init, const ParamsD& p, const GridD& g,
                          const NewtonConfig& cfg) {
  return newton_iterate(t1_init, p, g, cfg).solution;
}

}  // namespace ehdwave
