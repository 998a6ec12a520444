// Branch following from the small-amplitude limit toward the limiting wave.

#ifndef EHDWAVE_CONTINUATION_HPP
#define EHDWAVE_CONTINUATION_HPP

#include "ehdwave/core.hpp"
#include "ehdwave/newton.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ehdwave {

/// The parameters fixed along a branch; alpha is the continuation variable.
struct FlowParams {
  double gamma{0};
  double eps1{0};

  double alpha_cr() const { return 1.0 - gamma + eps1; }
  ParamsD at_alpha(double alpha) const { return make_params(gamma, eps1, alpha); }
  ParamsD at_eps(double eps) const { return at_alpha(alpha_cr() - eps); }
};

/// Which small-amplitude sech^2 profile to use.
///
/// kNominal: 3 eps / (3 - 3g + g^2 + e1) sech^2(sqrt(3 eps) x / 2).
/// kConsistent: 3 eps / (3 - 3g + g^2 + 3 e1) sech^2(sqrt(3 eps / (1 + e1)) x / 2),
/// the long-wave balance of the surface equation itself. The two agree for
/// e1 = 0; for e1 > 0 only the consistent one is O(eps^2) close to solutions.
enum class Expansion { kNominal, kConsistent };

struct SechProfile {
  double amplitude;
  double decay_rate;  // kappa in A sech^2(kappa x)

  double operator()(double x) const;
  /// Distance beyond which the profile is below `level`.
  double width_for(double level) const;
};

SechProfile small_amplitude_profile(double eps, const FlowParams& fp,
                                    Expansion which = Expansion::kNominal);

/// Small-amplitude initializer at alpha = alpha_cr - eps.
std::pair<TraceD, ParamsD> init_small(double eps, const FlowParams& fp, const GridD& g,
                                      Expansion which = Expansion::kNominal);

/// Smallest power-of-two multiple of `base` that fits the initializer with
/// the profile below `level` at the box edge.
double required_half_length(double eps, const FlowParams& fp, Expansion which, double level);

enum class StopReason { kM1Vanishing, kM2Vanishing, kM3Blowup, kFroudeBlowup, kStepFailure, kBudget };

const char* to_string(StopReason r);
std::optional<StopReason> stop_reason_from_string(const std::string& s);

struct ContinuationConfig {
  double eps_start = 1e-3;
  /// Geometric growth of eps during the natural-parameter phase.
  double eps_growth = 1.25;
  /// Natural steps continue while the corrector needs at most this many iterations.
  int fast_iterations = 3;
  double eps_switch = 0.05;

  double ds_max = 0.02;
  double ds_min = 1e-8;
  double ds_grow = 1.5;
  /// Relative weight of |d alpha| against the L2 norm of d t1 in the arclength.
  double alpha_weight = 1.0;
  int corrector_max_iter = 10;

  double m1_tol_factor = 1e-2;  // m1_tol = factor * (1 + eps1)
  double m2_tol = 1e-2;
  double m3_cap = 1e2;
  double f_cap = 1e2;
  double tail_tol = 1e-9;
  /// Largest |c_n| over the top quarter of modes relative to max |c_n|.
  double resolution_tol = 1e-11;
  int budget = 500;
  Eigen::Index n_min = 64;
  Eigen::Index n_start = 512;
  Eigen::Index n_max = 2048;
  /// Keep a full solution for every k-th point (and the last one).
  int store_every = 10;
  /// Run the nodal and Froude checks on every accepted point.
  bool check_points = true;

  Expansion initializer = Expansion::kConsistent;
  NewtonConfig newton{};

  double m1_tol(double eps1) const { return m1_tol_factor * (1.0 + eps1); }
  void validate() const;
};

struct Branch {
  FlowParams flow;
  ContinuationConfig config;
  std::vector<BranchPoint> points;
  /// Sparse: (index into points, solution).
  std::vector<std::pair<std::size_t, WaveSolution>> solutions;
  std::optional<StopReason> stop_reason;
  std::string stop_detail;
  /// Number of grid changes performed.
  int regrids = 0;
};

/// Monitors of a converged solution at arclength s.
BranchPoint make_branch_point(const WaveSolution& sol, double s);

Branch continue_branch(const FlowParams& fp, const ContinuationConfig& cfg = {});

struct StopReport {
  StopReason reason;
  /// "i" (gamma < 0), "ii" (gamma > 0) or "iii" (gamma = 0).
  std::string gamma_case;
  bool monitor_triggered = false;
  /// A monitor fired that the limiting alternatives for this sign of gamma do not list.
  bool discrepancy = false;
  std::string interpretation;
};

StopReport classify_stop(const Branch& b, const ParamsD& p);

// Grid transfers used when the box or the resolution changes.
TraceD refine_trace(const TraceD& t, const GridD& from);  // N -> 2N, same L
TraceD grow_trace(const TraceD& t, const GridD& from);    // L -> 2L, N -> 2N, zero padding
TraceD shrink_trace(const TraceD& t, const GridD& from);  // L -> L/2, N -> N/2, central half

/// max |c_n| over the top quarter of modes relative to max |c_n|.
double spectral_tail(const TraceD& t, const GridD& g);

}  // namespace ehdwave

#endif  // EHDWAVE_CONTINUATION_HPP
