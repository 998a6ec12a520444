#include "ehdwave/continuation.hpp"

#include "ehdwave/diagnostics.hpp"
#include "ehdwave/strip_harmonic.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehdwave {

double SechProfile::operator()(double x) const {
  const double c = std::cosh(decay_rate * x);
  return amplitude / (c * c);
}

double SechProfile::width_for(double level) const {
  if (!(level > 0)) throw ValidationError("level", "must be > 0");
  if (amplitude <= level) return 0.0;
  // A sech^2(kx) = level  =>  cosh(kx) = sqrt(A / level)
  return std::acosh(std::sqrt(amplitude / level)) / decay_rate;
}

SechProfile small_amplitude_profile(double eps, const FlowParams& fp, Expansion which) {
  const double g = fp.gamma, e1 = fp.eps1;
  if (which == Expansion::kNominal)
    return {3.0 * eps / (3.0 - 3.0 * g + g * g + e1), 0.5 * std::sqrt(3.0 * eps)};
  return {3.0 * eps / (3.0 - 3.0 * g + g * g + 3.0 * e1), 0.5 * std::sqrt(3.0 * eps / (1.0 + e1))};
}

std::pair<TraceD, ParamsD> init_small(double eps, const FlowParams& fp, const GridD& g,
                                      Expansion which) {
  if (!(eps > 0 && eps <= 0.1)) throw ValidationError("eps", "must lie in (0, 0.1]");
  const SechProfile prof = small_amplitude_profile(eps, fp, which);
  const double edge = std::cosh(prof.decay_rate * g.half_length());
  if (!(1.0 / (edge * edge) < 1e-10)) {
    // sech^2(kappa L) < 1e-10  <=>  kappa L > acosh(1e5)
    const double need = std::acosh(1e5) / prof.decay_rate;
    std::ostringstream msg;
    msg << "grid too narrow for eps = " << eps << ": need half_length > " << need;
    throw ValidationError("half_length", msg.str());
  }
  TraceD t(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) t[j] = prof(g.x()[j]);
  return {t, fp.at_eps(eps)};
}

double required_half_length(double eps, const FlowParams& fp, Expansion which, double level) {
  const SechProfile prof = small_amplitude_profile(eps, fp, which);
  const double need = std::max(prof.width_for(level), std::acosh(1e5) / prof.decay_rate);
  double L = 1.0;
  while (L <= need) L *= 2.0;
  return L;
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kM1Vanishing:
      return "M1_VANISHING";
    case StopReason::kM2Vanishing:
      return "M2_VANISHING";
    case StopReason::kM3Blowup:
      return "M3_BLOWUP";
    case StopReason::kFroudeBlowup:
      return "FROUDE_BLOWUP";
    case StopReason::kStepFailure:
      return "STEP_FAILURE";
    case StopReason::kBudget:
      return "BUDGET";
  }
  return "UNKNOWN";
}

std::optional<StopReason> stop_reason_from_string(const std::string& s) {
  for (StopReason r : {StopReason::kM1Vanishing, StopReason::kM2Vanishing, StopReason::kM3Blowup,
                       StopReason::kFroudeBlowup, StopReason::kStepFailure, StopReason::kBudget})
    if (s == to_string(r)) return r;
  return std::nullopt;
}

void ContinuationConfig::validate() const {
  if (!(eps_start > 0 && eps_start <= 0.1)) throw ValidationError("eps_start", "must lie in (0, 0.1]");
  if (!(eps_growth > 1)) throw ValidationError("eps_growth", "must be > 1");
  if (!(ds_min > 0 && ds_max >= ds_min)) throw ValidationError("ds_max", "need 0 < ds_min <= ds_max");
  if (!(tail_tol > 0)) throw ValidationError("tail_tol", "must be > 0");
  if (budget < 2) throw ValidationError("budget", "must be >= 2");
  if (n_min < 16 || n_start < n_min || n_max < n_start)
    throw ValidationError("n_points", "need 16 <= n_min <= n_start <= n_max");
  if (store_every < 1) throw ValidationError("store_every", "must be >= 1");
  newton.validate();
}

TraceD refine_trace(const TraceD& t, const GridD& from) {
  const GridD to(from.half_length(), 2 * from.size());
  SpectralCoeffs<double> c = to_spectral(t, from);
  SpectralCoeffs<double> c2 = SpectralCoeffs<double>::Zero(to.modes());
  c2.head(c.size()) = c;
  c2[c.size() - 1] *= 0.5;  // split the old Nyquist mode between +-k
  c2 *= 2.0;
  return from_spectral(c2, to);
}

TraceD grow_trace(const TraceD& t, const GridD& from) {
  const Eigen::Index n = from.size();
  TraceD out = TraceD::Zero(2 * n);
  out.segment(n / 2, n) = t;
  return out;
}

TraceD shrink_trace(const TraceD& t, const GridD& from) {
  const Eigen::Index n = from.size();
  return t.segment(n / 4, n / 2);
}

double spectral_tail(const TraceD& t, const GridD& g) {
  const SpectralCoeffs<double> c = to_spectral(t, g);
  const double top = c.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  const Eigen::Index q = c.size() / 4;
  return c.tail(q).cwiseAbs().maxCoeff() / top;
}

BranchPoint make_branch_point(const WaveSolution& sol, double s) {
  const ParamsD& p = sol.params;
  const GridD& g = sol.grid;
  const TraceD w1x = ddx(sol.t1, g);
  const TraceD w1y = dtn(sol.t1, g);
  const Eigen::ArrayXd grad =
      (w1x.array().square() + (1.0 + w1y.array()).square()).sqrt();
  BranchPoint bp;
  bp.s = s;
  bp.alpha = p.alpha;
  bp.amplitude = sol.amplitude;
  bp.monitor_m1 = (1.0 + p.eps1 - 2.0 * p.alpha * sol.t1.array()).minCoeff();
  bp.monitor_m2 = grad.minCoeff();
  bp.monitor_m3 = grad.maxCoeff();
  bp.froude = p.froude();
  bp.lambda_min = lambda_min(sol.t1, p, g);
  bp.residual_norm = sol.residual_norm;
  bp.half_length = g.half_length();
  bp.n_points = g.size();
  return bp;
}

namespace {

// A point on the branch together with its grid.
struct State {
  GridD grid{1.0, 16};
  TraceD t1;
  double alpha;
};

double sup_norm(const TraceD& r) { return r.cwiseAbs().maxCoeff(); }

double weighted_distance(const State& a, const State& b, double alpha_weight) {
  const double h = a.grid.spacing();
  const double dt2 = h * (a.t1 - b.t1).squaredNorm();
  const double da = alpha_weight * (a.alpha - b.alpha);
  return std::sqrt(dt2 + da * da);
}

struct CorrectorResult {
  bool ok = false;
  State state;
  double residual = 0;
  int iterations = 0;
  std::string why;
};

// Bordered Newton for R(t1, alpha) = 0 and tau . (X - X0) = ds in the even space.
CorrectorResult correct_arclength(const FlowParams& fp, const State& base, const TraceD& tau_t,
                                  double tau_a, double ds, const ContinuationConfig& cfg) {
  const GridD& g = base.grid;
  const EvenSpace space(g);
  const double h = g.spacing();
  const double w = cfg.alpha_weight;
  CorrectorResult res{false, State{g, symmetrize(TraceD(base.t1 + ds * tau_t)), base.alpha + ds * tau_a},
                      0, 0, {}};
  // Weights of the arclength row acting on reduced coordinates: each reduced
  // unknown stands for one or two grid values.
  Eigen::VectorXd row_t(space.size());
  for (Eigen::Index r = 0; r < space.size(); ++r) {
    const Eigen::Index j = space.full_index(r);
    const double mult = (j == g.mirror(j)) ? 1.0 : 2.0;
    row_t[r] = h * mult * tau_t[j];
  }
  for (int it = 0; it <= cfg.corrector_max_iter; ++it) {
    State& x = res.state;
    if (!(x.alpha > 0)) {
      res.why = "alpha left (0, inf)";
      return res;
    }
    const ParamsD p = fp.at_alpha(x.alpha);
    if (!(lambda_min(x.t1, p, g) > 0)) {
      res.why = "lambda_min <= 0";
      return res;
    }
    TraceD r;
    try {
      r = residual(x.t1, p, g);
    } catch (const std::overflow_error& e) {
      res.why = e.what();
      return res;
    }
    const double arc = h * tau_t.dot(x.t1 - base.t1) + w * w * tau_a * (x.alpha - base.alpha) - ds;
    res.residual = sup_norm(r);
    res.iterations = it;
    if (res.residual <= cfg.newton.tol && std::abs(arc) <= cfg.newton.tol) {
      res.ok = true;
      return res;
    }
    if (it == cfg.corrector_max_iter) break;
    const Linearization<double> lin(x.t1, p, g);
    const Eigen::Index m = space.size();
    Eigen::MatrixXd a(m + 1, m + 1);
    a.topLeftCorner(m, m) = dense_jacobian(lin, space);
    a.topRightCorner(m, 1) = space.restrict(residual_dalpha(x.t1, p, g));
    a.bottomLeftCorner(1, m) = row_t.transpose();
    a(m, m) = w * w * tau_a;
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = -space.restrict(r);
    rhs[m] = -arc;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd dz = lu.solve(rhs);
    if (!dz.allFinite()) {
      res.why = "singular bordered system";
      return res;
    }
    x.t1 = symmetrize(TraceD(x.t1 + space.extend(dz.head(m))));
    x.alpha += dz[m];
  }
  res.why = "corrector did not converge";
  return res;
}

}  // namespace

Branch continue_branch(const FlowParams& fp, const ContinuationConfig& cfg) {
  cfg.validate();
  make_params(fp.gamma, fp.eps1, 1.0);  // validates gamma, eps1
  Branch branch;
  branch.flow = fp;
  branch.config = cfg;
  const double m1_tol = cfg.m1_tol(fp.eps1);

  auto stop = [&](StopReason r, std::string detail) {
    branch.stop_reason = r;
    branch.stop_detail = std::move(detail);
  };

  double s = 0.0;
  std::vector<State> history;  // last two accepted states, same grid
  WaveSolution last_solution;

  // Regrids the newest state (and transfers the previous one) until the
  // resolution and tail criteria hold. Returns false on failure.
  auto adapt_grid = [&](std::string& why) {
    for (int pass = 0; pass < 8; ++pass) {
      State& cur = history.back();
      const GridD& g = cur.grid;
      TraceD (*transfer)(const TraceD&, const GridD&) = nullptr;
      GridD next = g;
      const double half_tail = [&] {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < g.size(); ++j)
          if (std::abs(g.x()[j]) >= 0.45 * g.half_length())
            worst = std::max(worst, std::abs(cur.t1[j]));
        return worst;
      }();
      if (spectral_tail(cur.t1, g) > cfg.resolution_tol) {
        if (2 * g.size() > cfg.n_max) {
          why = "resolution needs more than n_max points";
          return false;
        }
        transfer = &refine_trace;
        next = GridD(g.half_length(), 2 * g.size());
      } else if (tail_of(cur.t1, g) > cfg.tail_tol) {
        if (2 * g.size() > cfg.n_max) {
          why = "box growth needs more than n_max points";
          return false;
        }
        transfer = &grow_trace;
        next = GridD(2 * g.half_length(), 2 * g.size());
      } else if (half_tail < 1e-2 * cfg.tail_tol && g.size() / 2 >= cfg.n_min) {
        transfer = &shrink_trace;
        next = GridD(0.5 * g.half_length(), g.size() / 2);
      } else {
        return true;
      }
      for (State& st : history) {
        st.t1 = transfer(st.t1, st.grid);
        st.grid = next;
      }
      try {
        const ParamsD p = fp.at_alpha(cur.alpha);
        last_solution = newton_solve(cur.t1, p, next, cfg.newton);
        cur.t1 = last_solution.t1;
      } catch (const SolveError& e) {
        why = std::string("re-solve after regrid failed: ") + e.what();
        return false;
      }
      ++branch.regrids;
    }
    return true;
  };

  // Records the newest state; returns false when the branch must stop.
  auto accept = [&]() {
    State& cur = history.back();
    std::string why;
    if (!adapt_grid(why)) {
      stop(StopReason::kStepFailure, why);
      return false;
    }
    const ParamsD p = fp.at_alpha(cur.alpha);
    last_solution = make_solution(p, cur.grid, cur.t1, sup_norm(residual(cur.t1, p, cur.grid)));
    if (history.size() >= 2) s += weighted_distance(history[history.size() - 2], cur, cfg.alpha_weight);
    BranchPoint bp = make_branch_point(last_solution, s);
    if (!(bp.lambda_min > 0)) {
      stop(StopReason::kStepFailure, "accepted point has lambda_min <= 0");
      return false;
    }
    branch.points.push_back(bp);
    const std::size_t idx = branch.points.size() - 1;
    if (idx % static_cast<std::size_t>(cfg.store_every) == 0)
      branch.solutions.emplace_back(idx, last_solution);

    if (cfg.check_points) {
      if (!(p.alpha < p.alpha_cr())) {
        stop(StopReason::kStepFailure, "Froude bound violated: nontrivial wave with alpha >= alpha_cr");
        return false;
      }
      const NodalReport nodal = nodal_check(last_solution, cfg.tail_tol);
      if (!nodal.passed) {
        stop(StopReason::kStepFailure, "nodal property violated: " + nodal.summary());
        return false;
      }
    }
    if (bp.monitor_m1 < m1_tol) {
      stop(StopReason::kM1Vanishing, "inf(1 + eps1 - 2 alpha t1) fell below " + std::to_string(m1_tol));
      return false;
    }
    if (bp.monitor_m2 < cfg.m2_tol) {
      stop(StopReason::kM2Vanishing, "inf |grad eta| fell below " + std::to_string(cfg.m2_tol));
      return false;
    }
    if (bp.monitor_m3 > cfg.m3_cap) {
      stop(StopReason::kM3Blowup, "sup |grad eta| exceeded " + std::to_string(cfg.m3_cap));
      return false;
    }
    if (bp.froude > cfg.f_cap) {
      stop(StopReason::kFroudeBlowup, "Froude number exceeded " + std::to_string(cfg.f_cap));
      return false;
    }
    if (static_cast<int>(branch.points.size()) >= cfg.budget) {
      stop(StopReason::kBudget, "point budget exhausted");
      return false;
    }
    return true;
  };

  auto finish = [&]() {
    if (!branch.points.empty() &&
        (branch.solutions.empty() || branch.solutions.back().first != branch.points.size() - 1))
      branch.solutions.emplace_back(branch.points.size() - 1, last_solution);
    return branch;
  };

  // First point from the small-amplitude initializer.
  double eps = cfg.eps_start;
  {
    const SechProfile prof = small_amplitude_profile(eps, fp, cfg.initializer);
    const double L = required_half_length(eps, fp, cfg.initializer, 0.1 * cfg.tail_tol);
    const GridD g(L, cfg.n_start);
    auto [t0, p0] = init_small(eps, fp, g, cfg.initializer);
    try {
      const WaveSolution sol = newton_solve(t0, p0, g, cfg.newton);
      if (!(sol.amplitude > 0.1 * prof.amplitude)) {
        stop(StopReason::kStepFailure, "initial solve collapsed to the trivial solution");
        return finish();
      }
      history.push_back(State{g, sol.t1, p0.alpha});
    } catch (const SolveError& e) {
      stop(StopReason::kStepFailure, std::string("initial solve failed: ") + e.what());
      return finish();
    }
    if (!accept()) return finish();
  }

  // Natural-parameter steps in eps while the corrector converges quickly.
  double growth = cfg.eps_growth;
  bool natural = true;
  while (natural) {
    const double eps_next = std::min(eps * growth, cfg.eps_switch);
    State& cur = history.back();
    TraceD pred;
    if (history.size() < 2) {
      // Derivative of the sech^2 family in eps.
      const SechProfile a = small_amplitude_profile(eps, fp, cfg.initializer);
      const SechProfile b = small_amplitude_profile(eps_next, fp, cfg.initializer);
      pred = cur.t1;
      for (Eigen::Index j = 0; j < cur.grid.size(); ++j)
        pred[j] += b(cur.grid.x()[j]) - a(cur.grid.x()[j]);
    } else {
      const State& prev = history[history.size() - 2];
      const double eps_prev = fp.alpha_cr() - prev.alpha;
      pred = cur.t1 + (cur.t1 - prev.t1) * ((eps_next - eps) / (eps - eps_prev));
    }
    const ParamsD p = fp.at_eps(eps_next);
    try {
      const NewtonOutcome out = newton_iterate(pred, p, cur.grid, cfg.newton);
      State next{cur.grid, out.solution.t1, p.alpha};
      if (!(out.solution.amplitude > cur.t1[cur.grid.center()])) throw std::runtime_error("amplitude did not grow");
      if (history.size() >= 2) history.erase(history.begin());
      history.push_back(std::move(next));
      eps = eps_next;
      if (!accept()) return finish();
      if (out.iterations > cfg.fast_iterations || eps >= cfg.eps_switch) natural = false;
    } catch (const std::exception&) {
      growth = 1.0 + 0.5 * (growth - 1.0);
      if (growth < 1.0 + 1e-3) natural = false;
    }
  }
  if (history.size() < 2) {
    stop(StopReason::kStepFailure, "natural-parameter phase produced a single point");
    return finish();
  }

  // Pseudo-arclength in (t1, alpha) with a secant predictor.
  double ds = std::min(cfg.ds_max, weighted_distance(history[0], history[1], cfg.alpha_weight));
  for (;;) {
    const State& prev = history[0];
    const State& cur = history[1];
    const double dist = weighted_distance(prev, cur, cfg.alpha_weight);
    const TraceD tau_t = (cur.t1 - prev.t1) / dist;
    const double tau_a = (cur.alpha - prev.alpha) / dist;
    CorrectorResult cr;
    for (;;) {
      cr = correct_arclength(fp, cur, tau_t, tau_a, ds, cfg);
      if (cr.ok) {
        const double jump = sup_norm(TraceD(cr.state.t1 - cur.t1));
        if (jump < 5.0 * ds) break;
        cr.ok = false;
        cr.why = "discontinuous step";
      }
      ds *= 0.5;
      if (ds < cfg.ds_min) {
        stop(StopReason::kStepFailure, "step size underflow: " + cr.why);
        return finish();
      }
    }
    if (cr.iterations <= cfg.fast_iterations) ds = std::min(cfg.ds_max, ds * cfg.ds_grow);
    history.erase(history.begin());
    history.push_back(std::move(cr.state));
    if (!accept()) return finish();
  }
}

StopReport classify_stop(const Branch& b, const ParamsD& p) {
  if (!b.stop_reason) throw ValidationError("branch", "has no stop reason");
  StopReport rep;
  rep.reason = *b.stop_reason;
  rep.gamma_case = p.gamma < 0 ? "i" : (p.gamma > 0 ? "ii" : "iii");
  switch (rep.reason) {
    case StopReason::kM1Vanishing:
      rep.interpretation = "stagnation/extreme-wave indicator (u^2 + eps1 e2^2 -> 0 at crest)";
      break;
    case StopReason::kM2Vanishing:
      rep.interpretation = "surface singularity (inf |grad eta| -> 0)";
      break;
    case StopReason::kM3Blowup:
      rep.interpretation = "surface gradient blow-up / conformal map degeneration";
      break;
    case StopReason::kFroudeBlowup:
      rep.interpretation = "unbounded wave speed (1/F -> 0)";
      break;
    case StopReason::kStepFailure:
      rep.interpretation = "no monitor triggered; continuation step failed: " + b.stop_detail;
      return rep;
    case StopReason::kBudget:
      rep.interpretation = "no monitor triggered; point budget exhausted";
      return rep;
  }
  rep.monitor_triggered = true;
  bool admissible = false;
  if (rep.gamma_case == "iii")
    admissible = rep.reason == StopReason::kM1Vanishing || rep.reason == StopReason::kFroudeBlowup;
  else if (rep.gamma_case == "ii")
    admissible = rep.reason == StopReason::kM2Vanishing || rep.reason == StopReason::kM3Blowup ||
                 rep.reason == StopReason::kFroudeBlowup;
  else
    admissible = rep.reason == StopReason::kM1Vanishing || rep.reason == StopReason::kM2Vanishing ||
                 rep.reason == StopReason::kFroudeBlowup;
  rep.discrepancy = !admissible;
  if (rep.discrepancy)
    rep.interpretation += " [discrepancy: not a limiting alternative for case (" + rep.gamma_case + ")]";
  return rep;
}

}  // namespace ehdwave
