#pragma once

#include "fxts/core.hpp"

#include <optional>

namespace fxts::cert {

// The three branches of the certificate, decided by r = delta1/(2 sqrt(a1 a2)).
// Boundaries: r = 0 belongs to NonPositive, r = 1 to Supercritical.
enum class RegimeTag { NonPositive, Subcritical, Supercritical };

struct Regime {
  RegimeTag tag;
  double r;
};

Regime classify_regime(const FxtsGains& gains);

// Levels of the scalar map h(s) = alpha1 s + alpha2 / s, s = V^(1/mu):
//   v_star     arg min of h in V, equals (alpha2/alpha1)^(mu/2)
//   delta_star min of h, equals 2 sqrt(alpha1 alpha2)
//   v1 <= v2   roots of alpha1 s^2 - delta1 s + alpha2 (in s), present iff r >= 1
struct CriticalLevels {
  double v_star;
  double delta_star;
  std::optional<double> v1;
  std::optional<double> v2;
};

CriticalLevels critical_levels(const FxtsGains& gains);

// Level of the guaranteed domain of attraction {V <= level}: +inf for r < 1,
// (k v1)^mu for r >= 1. Requires 0 < k <= 1.
double domain_level(const FxtsGains& gains, double k);

// Upper bound on the time to reach V = 0:
//   r <= 0      mu pi / (2 sqrt(a1 a2))
//   0 < r < 1   mu/(a1 k1) (pi/2 - atan k2),
//               k1 = sqrt((4 a1 a2 - d1^2)/(4 a1^2)), k2 = -d1/sqrt(4 a1 a2 - d1^2)
//   r >= 1      mu k / ((1-k) sqrt(a1 a2)),  0 < k < 1
// k is consumed only by the r >= 1 branch.
double settling_time_bound(const FxtsGains& gains, double k = 0.99);

// Case-appropriate closed-form upper bound on
//   I = integral_{v0}^{0} dV / (-a1 V^g1 - a2 V^g2 + d1 V).
// For delta1 < 0 returns the delta1 = 0 value (the integrand is monotone in
// delta1, so that value still dominates). For r >= 1 requires
// v0^(1/mu) <= k v1.
double integral_bound(const FxtsGains& gains, double v0, double k);

// Numeric value of the same integral via the substitution m = V^(1/mu):
//   I = mu * integral_0^{v0^(1/mu)} dm / (a1 m^2 - d1 m + a2),
// adaptive Simpson quadrature, absolute tolerance 1e-10, max depth 60.
// Errors if the denominator has a root inside the interval (r >= 1 with
// v0^(1/mu) >= v1).
double integral_oracle(const FxtsGains& gains, double v0);

// Sublevel value (r_M - sqrt(r_M^2 - 1))^mu of the closed-loop domain of
// attraction when alpha1 = alpha2. For a quadratic V(x) = |x|^2 the boundary
// is the circle of radius sqrt of this level. Requires r_M >= 1.
double doa_level(double r_M, double mu);

// Data of the perturbed system xdot = f(x) + psi(x):
//   |psi(x)| <= lip_L |x|,  V(x) >= k1_quad |x|^2,  |dV/dx| <= k2_quad |x|.
struct RobustnessData {
  NominalFxtsGains nominal;
  double lip_L;
  double k1_quad;
  double k2_quad;

  RobustnessData(NominalFxtsGains nominal, double lip_L, double k1_quad, double k2_quad);
};

struct RobustnessMargin {
  FxtsGains gains;     // alpha1 = b, alpha2 = a, delta1 = k2 L / k1
  Regime regime;
  double domain_level; // +inf when global
  bool global;         // k2 L / (2 k1 sqrt(a b)) < 1
};

// Maps the perturbed decrease -a V^p - b V^q + (k2 L / k1) V onto FxtsGains.
// Requires (p, q) = (1 - 1/mu, 1 + 1/mu) for a common mu.
RobustnessMargin robustness_margin(const RobustnessData& data, double k = 1.0);

}  // namespace fxts::cert
