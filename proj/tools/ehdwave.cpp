// Command-line driver.
//
// Exit codes: 0 success, 1 invalid input, 2 invariant violated, 3 no convergence.

#include "ehdwave/conjugate_flow.hpp"
#include "ehdwave/continuation.hpp"
#include "ehdwave/diagnostics.hpp"
#include "ehdwave/io.hpp"
#include "ehdwave/newton.hpp"
#include "ehdwave/reduced_ode.hpp"
#include "ehdwave/strip_harmonic.hpp"
#include "ehdwave/wave_system.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ehdwave;
using io::RunConfig;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kInvariant = 2, kNoConvergence = 3 };

// Flag values as typed on the command line; merged over a --config file.
struct Flags {
  std::string config;
  double gamma = 0, eps1 = 0, alpha = 0, eps = 0, half_length = 0, tol = 0, dt = 0, x_max = 0;
  Eigen::Index n_points = 0, n_max = 0;
  int budget = 0, store_every = 0;
  std::string out, format, input;
  std::vector<double> q0_list;
  std::string linear_solver;
};

struct Options {
  CLI::Option *gamma = nullptr, *eps1 = nullptr, *alpha = nullptr, *eps = nullptr,
              *half_length = nullptr, *n_points = nullptr, *tol = nullptr, *out = nullptr,
              *format = nullptr, *config = nullptr, *input = nullptr, *budget = nullptr,
              *n_max = nullptr, *store_every = nullptr, *q0_list = nullptr, *dt = nullptr,
              *x_max = nullptr, *linear_solver = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, Options& o) {
  o.gamma = cmd->add_option("--gamma", f.gamma, "vorticity");
  o.eps1 = cmd->add_option("--eps1", f.eps1, "relative permittivity (>= 0)");
  o.alpha = cmd->add_option("--alpha", f.alpha, "alpha = 1/F^2");
  o.eps = cmd->add_option("--eps", f.eps, "alpha_cr - alpha (alternative to --alpha)");
  o.half_length = cmd->add_option("--half-length", f.half_length, "box half-length L (0 = automatic)");
  o.n_points = cmd->add_option("--n-points", f.n_points, "collocation points N (even)");
  o.tol = cmd->add_option("--tol", f.tol, "Newton residual tolerance");
  o.out = cmd->add_option("--out", f.out, "output directory");
  o.format = cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  o.config = cmd->add_option("--config", f.config, "RunConfig JSON (any output file embeds one)");
}

RunConfig merge(const std::string& command, const Flags& f, const Options& o) {
  RunConfig rc;
  if (o.config && o.config->count()) rc = io::run_config_from_json(io::read_json(f.config));
  rc.command = command;
  auto given = [](const CLI::Option* opt) { return opt && opt->count() > 0; };
  if (given(o.gamma)) rc.gamma = f.gamma;
  if (given(o.eps1)) rc.eps1 = f.eps1;
  if (given(o.alpha)) {
    rc.alpha = f.alpha;
    rc.eps.reset();
  }
  if (given(o.eps)) {
    rc.eps = f.eps;
    rc.alpha.reset();
  }
  if (given(o.alpha) && given(o.eps)) throw ValidationError("alpha", "give either --alpha or --eps, not both");
  if (given(o.half_length)) rc.half_length = f.half_length;
  if (given(o.n_points)) rc.n_points = f.n_points;
  if (given(o.tol)) {
    rc.newton.tol = f.tol;
    rc.continuation.newton.tol = f.tol;
  }
  if (given(o.linear_solver)) {
    rc.newton = io::newton_from_json(io::json{{"linear_solver", f.linear_solver}}, rc.newton);
    rc.continuation.newton.linear_solver = rc.newton.linear_solver;
  }
  if (given(o.out)) rc.out_dir = f.out;
  if (given(o.format)) rc.format = f.format;
  if (given(o.input)) rc.input = f.input;
  if (given(o.budget)) rc.continuation.budget = f.budget;
  if (given(o.n_max)) rc.continuation.n_max = f.n_max;
  if (given(o.store_every)) rc.continuation.store_every = f.store_every;
  if (given(o.q0_list)) rc.q0_list = f.q0_list;
  if (given(o.dt)) rc.dt = f.dt;
  if (given(o.x_max)) rc.x_max = f.x_max;
  make_params(rc.gamma, rc.eps1, 1.0);
  rc.newton.validate();
  return rc;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_dispersion(const RunConfig& rc) {
  const ParamsD p = make_params(rc.gamma, rc.eps1, rc.resolved_alpha());
  std::vector<double> ks, ms;
  std::cout << "# k  m(k) = 2((gamma + alpha) - (1 + eps1) k coth k)\n";
  for (int i = 0; i <= 40; ++i) {
    const double k = 0.125 * i;
    ks.push_back(k);
    ms.push_back(linear_multiplier(k, p));
    std::cout << fmt(k) << "  " << fmt(ms.back()) << "\n";
  }
  const double gap = p.alpha - p.alpha_cr();
  if (std::abs(gap) <= 1e-14 * std::max(1.0, std::abs(p.alpha_cr())))
    std::cout << "no real root; alpha = alpha_cr boundary case k = 0\n";
  else if (gap < 0)
    std::cout << "no real root (alpha < alpha_cr = " << fmt(p.alpha_cr()) << ")\n";
  else
    std::cout << "root k = " << fmt(dispersion_root(p)) << " (alpha > alpha_cr = " << fmt(p.alpha_cr())
              << ")\n";
  if (!rc.out_dir.empty() && rc.out_dir != ".") io::write_curve(fs::path(rc.out_dir) / "dispersion.dat", ks, ms, "k m(k)", rc);
  return kOk;
}

void write_solution_files(const WaveSolution& sol, const RunConfig& rc,
                          const std::optional<DiagnosticsSummary>& diag) {
  const fs::path dir(rc.out_dir);
  io::write_json(dir / "solution.json", io::solution_to_json(sol, rc, diag));
  std::vector<double> x, t;
  for (Eigen::Index j = 0; j < sol.grid.size(); ++j) {
    x.push_back(sol.grid.x()[j]);
    t.push_back(sol.t1[j]);
  }
  if (rc.format == "csv") {
    std::ostringstream s;
    s << "# version " << io::kFormatVersion << "\n# run_config " << io::to_json(rc).dump() << "\nx,t1\n";
    for (std::size_t i = 0; i < x.size(); ++i) s << io::hex_string(x[i]) << ',' << io::hex_string(t[i]) << '\n';
    io::write_atomic(dir / "solution.csv", s.str());
  }
  io::write_curve(dir / "t1.dat", x, t, "x t1", rc);
  const PhysicalProfile prof = physical_profile(sol);
  std::vector<double> X, Y;
  for (const ProfilePoint& pt : prof.points) {
    X.push_back(pt.X);
    Y.push_back(pt.Y);
  }
  io::write_curve(dir / "profile.dat", X, Y, "X Y (physical surface)", rc);
}

int cmd_solve(const RunConfig& rc) {
  const ParamsD p = make_params(rc.gamma, rc.eps1, rc.resolved_alpha());
  const FlowParams fp{p.gamma, p.eps1};
  const double eps = p.eps();
  TraceD t0;
  double L = rc.half_length;
  if (eps > 0) {
    const Expansion which = Expansion::kConsistent;
    if (L <= 0) L = required_half_length(eps, fp, which, 1e-10);
    const GridD g(L, rc.n_points);
    const SechProfile prof = small_amplitude_profile(eps, fp, which);
    t0.resize(g.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) t0[j] = prof(g.x()[j]);
  } else {
    if (L <= 0) L = 64.0;
    t0 = TraceD::Zero(rc.n_points);
  }
  const GridD g(L, rc.n_points);
  NewtonOutcome out;
  try {
    out = newton_iterate(t0, p, g, rc.newton);
  } catch (const SolveError& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kNoConvergence;
  }
  const WaveSolution& sol = out.solution;
  const DiagnosticsSummary diag = run_diagnostics(sol, rc.continuation.tail_tol);
  std::cout << "converged in " << out.iterations << " iteration(s): amplitude " << fmt(sol.amplitude)
            << ", residual " << fmt(sol.residual_norm) << ", tail " << fmt(sol.tail) << "\n";
  if (out.froude_bound_violation) std::cout << "warning: nontrivial wave with alpha >= alpha_cr\n";
  write_solution_files(sol, rc, diag);
  return kOk;
}

int cmd_continue(const RunConfig& rc) {
  const FlowParams fp{rc.gamma, rc.eps1};
  ContinuationConfig cfg = rc.continuation;
  const Branch b = continue_branch(fp, cfg);
  const fs::path dir(rc.out_dir);
  io::write_branch(dir, b, rc);
  std::vector<double> alpha, amp, froude, m1;
  for (const BranchPoint& p : b.points) {
    alpha.push_back(p.alpha);
    amp.push_back(p.amplitude);
    froude.push_back(p.froude);
    m1.push_back(p.monitor_m1);
  }
  io::write_curve(dir / "amplitude_vs_froude.dat", froude, amp, "F amplitude", rc);
  io::write_curve(dir / "amplitude_vs_alpha.dat", alpha, amp, "alpha amplitude", rc);
  io::write_curve(dir / "m1_vs_amplitude.dat", amp, m1, "amplitude m1", rc);
  std::cout << b.points.size() << " points; stop_reason " << (b.stop_reason ? to_string(*b.stop_reason) : "NONE")
            << ": " << b.stop_detail << "\n";
  if (b.stop_reason) {
    const StopReport rep = classify_stop(b, make_params(fp.gamma, fp.eps1, 1.0));
    std::cout << "case (" << rep.gamma_case << "): " << rep.interpretation << "\n";
  }
  if (b.points.empty()) return kNoConvergence;
  return kOk;
}

int cmd_diagnose(const RunConfig& rc) {
  if (rc.input.empty()) throw ValidationError("input", "--input FILE is required");
  WaveSolution sol;
  try {
    sol = io::solution_from_json(io::read_json(rc.input));
  } catch (const io::FormatError& e) {
    throw ValidationError("input", e.what());
  }
  const DiagnosticsSummary d = run_diagnostics(sol, rc.continuation.tail_tol);
  const io::json j{{"version", io::kFormatVersion},
                   {"kind", "diagnostics"},
                   {"run_config", io::to_json(rc)},
                   {"summary", io::summary_to_json(d)}};
  std::cout << j.at("summary").dump(1) << "\n";
  if (!rc.out_dir.empty()) io::write_json(fs::path(rc.out_dir) / "diagnostics.json", j);
  if (!d.failures.empty()) {
    for (const std::string& f : d.failures) std::cerr << "invariant violated: " << f << "\n";
    return kInvariant;
  }
  return kOk;
}

int cmd_conjugate(const RunConfig& rc) {
  const ParamsD p = make_params(rc.gamma, rc.eps1, rc.resolved_alpha());
  const ConjugateFlowReport r = bore_verdict(p);
  io::json j{{"version", io::kFormatVersion},
             {"kind", "conjugate"},
             {"run_config", io::to_json(rc)},
             {"d_cr", io::real_to_json(r.d_cr)},
             {"d_star", r.d_star ? io::real_to_json(*r.d_star) : io::json(nullptr)},
             {"qhat_at_1", io::real_to_json(r.qhat_at_1)},
             {"shat_at_1", io::real_to_json(r.shat_at_1)},
             {"shat_at_star", r.shat_at_star ? io::real_to_json(*r.shat_at_star) : io::json(nullptr)},
             {"bore_excluded", r.bore_excluded},
             {"sign_consistent", r.sign_consistent},
             {"reason", r.reason}};
  std::cout << "d_cr = " << fmt(r.d_cr) << ", d* = " << (r.d_star ? fmt(*r.d_star) : "none")
            << ", S(1) = " << fmt(r.shat_at_1);
  if (r.shat_at_star) std::cout << ", S(d*) = " << fmt(*r.shat_at_star);
  std::cout << "\nbore excluded: " << (r.bore_excluded ? "yes" : "no") << " (" << r.reason << ")\n";
  const fs::path dir(rc.out_dir);
  io::write_json(dir / "conjugate.json", j);
  std::vector<double> d, q, s;
  for (int i = 1; i <= 400; ++i) {
    d.push_back(0.01 * i);
    q.push_back(qhat(d.back(), p));
    s.push_back(shat(d.back(), p));
  }
  io::write_curve(dir / "qhat.dat", d, q, "d Qhat(d)", rc);
  io::write_curve(dir / "shat.dat", d, s, "d Shat(d)", rc);
  if (!r.bore_excluded || !r.sign_consistent) return kInvariant;
  return kOk;
}

int cmd_ode(const RunConfig& rc) {
  const OdeParams p = make_ode_params(rc.gamma, rc.eps1);
  if (!(rc.dt > 0)) throw ValidationError("dt", "must be > 0");
  const std::vector<Orbit> orbits = phase_portrait(p, rc.q0_list, rc.dt, rc.x_max);
  const fs::path dir(rc.out_dir);
  bool drift = false;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    const Orbit& o = orbits[i];
    char name[64];
    std::snprintf(name, sizeof name, "orbit_%02zu.dat", i);
    // Thin to at most ~2000 samples per file.
    const std::size_t stride = std::max<std::size_t>(1, o.q.size() / 2000);
    std::vector<double> q, pp;
    for (std::size_t k = 0; k < o.q.size(); k += stride) {
      q.push_back(o.q[k]);
      pp.push_back(o.p[k]);
    }
    io::write_curve(dir / name, q, pp, "Q P (Q0 = " + fmt(rc.q0_list[i]) + ")", rc);
    std::cout << "Q0 = " << fmt(rc.q0_list[i]) << ": " << to_string(o.kind) << ", closure "
              << fmt(o.closure_error) << ", energy drift " << fmt(o.energy_drift) << "\n";
    drift = drift || o.step_too_large;
  }
  std::vector<double> x, q;
  for (int i = -400; i <= 400; ++i) {
    x.push_back(0.025 * i);
    q.push_back(homoclinic_exact(x.back(), p));
  }
  io::write_curve(dir / "homoclinic.dat", x, q, "X Q (closed form)", rc);
  std::cout << "truncation: f = 3 eps A - c2 A^2 (second order)\n";
  if (drift) {
    std::cerr << "energy drift above 1e-6: step too large\n";
    return kInvariant;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solitary EHD water waves with constant vorticity"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Flags f;
  struct Sub {
    CLI::App* app;
    Options opts;
  };
  auto make = [&](const char* name, const char* help) {
    Sub s{app.add_subcommand(name, help), {}};
    add_common(s.app, f, s.opts);
    return s;
  };
  Sub disp = make("dispersion", "linear symbol m(k) and its real root");
  Sub solve = make("solve", "Newton solve at fixed alpha");
  solve.opts.linear_solver = solve.app->add_option("--linear-solver", f.linear_solver, "auto, dense or krylov")
                                 ->check(CLI::IsMember({"auto", "dense", "krylov"}));
  Sub cont = make("continue", "follow the branch from small amplitude");
  cont.opts.budget = cont.app->add_option("--budget", f.budget, "maximum number of points");
  cont.opts.n_max = cont.app->add_option("--n-max", f.n_max, "largest grid size");
  cont.opts.store_every = cont.app->add_option("--store-every", f.store_every, "keep every k-th solution");
  Sub diag = make("diagnose", "re-run all checks on a stored solution");
  diag.opts.input = diag.app->add_option("--input", f.input, "solution.json");
  Sub conj = make("conjugate", "conjugate depths and the bore verdict");
  Sub ode = make("ode", "phase portrait of the reduced ODE");
  ode.opts.q0_list = ode.app->add_option("--q0-list", f.q0_list, "launch points (Q0, 0)")->delimiter(',');
  ode.opts.dt = ode.app->add_option("--dt", f.dt, "RK4 step");
  ode.opts.x_max = ode.app->add_option("--x-max", f.x_max, "integration length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    for (Sub* s : {&disp, &solve, &cont, &diag, &conj, &ode}) {
      if (!s->app->parsed()) continue;
      const std::string name = s->app->get_name();
      const RunConfig rc = merge(name, f, s->opts);
      if (name == "dispersion") return cmd_dispersion(rc);
      if (name == "solve") return cmd_solve(rc);
      if (name == "continue") return cmd_continue(rc);
      if (name == "diagnose") return cmd_diagnose(rc);
      if (name == "conjugate") return cmd_conjugate(rc);
      if (name == "ode") return cmd_ode(rc);
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const io::FormatError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const SolveError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
