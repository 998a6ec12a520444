// Laminar flows of depth d sharing the Bernoulli constant and flow force of
// the undisturbed stream; a second such depth would allow a bore.

#ifndef EHDWAVE_CONJUGATE_FLOW_HPP
#define EHDWAVE_CONJUGATE_FLOW_HPP

#include "ehdwave/core.hpp"

#include <optional>
#include <string>

namespace ehdwave {

/// Q(d) = ((2 - g)/2 + g d^2/2)^2 / d^2 + e1 / d^2 + 2 alpha (d - 1).
double qhat(double d, const ParamsD& p);
double qhat_d(double d, const ParamsD& p);
/// Closed-form second derivative 3(2 - g)^2 / (2 d^4) + g^2/2 + 6 e1 / d^4.
double qhat_dd(double d, const ParamsD& p);

/// S(d) = (2-g)^2/(8d) - g^2 d^3/24 - (2-g) g d/4 - (alpha/2) d^2
///        + ((2 alpha + 1 + e1)/2) d + e1/(2d).
double shat(double d, const ParamsD& p);

/// The minimizer of qhat.
double find_dcr(const ParamsD& p);

/// The depth d != 1 with qhat(d) = qhat(1), or none at alpha = alpha_cr.
std::optional<double> find_dstar(const ParamsD& p);

struct ConjugateFlowReport {
  double d_cr = 1;
  std::optional<double> d_star;
  double qhat_at_1 = 0;
  double shat_at_1 = 0;
  std::optional<double> shat_at_star;
  bool bore_excluded = true;
  /// sign(S(d*) - S(1)) agrees with sign(alpha_cr - alpha).
  bool sign_consistent = true;
  std::string reason;
};

ConjugateFlowReport bore_verdict(const ParamsD& p);

}  // namespace ehdwave

#endif  // EHDWAVE_CONJUGATE_FLOW_HPP
