#include "fxts/cert.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fxts::cert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void domain_fail(const std::string& what) { throw std::domain_error(what); }

// Recursive adaptive Simpson with interval bisection. The integrands here are
// smooth and nonsingular on the closed interval, so plain bisection to the
// absolute tolerance is enough.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
  if (a == b) return 0.0;
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace

Regime classify_regime(const FxtsGains& gains) {
  Regime regime;
  regime.r = gains.r;
  if (gains.r <= 0.0) {
    regime.tag = RegimeTag::NonPositive;
  } else if (gains.r < 1.0) {
    regime.tag = RegimeTag::Subcritical;
  } else {
    regime.tag = RegimeTag::Supercritical;
  }
  return regime;
}

CriticalLevels critical_levels(const FxtsGains& gains) {
  CriticalLevels lv;
  lv.v_star = std::pow(gains.alpha2 / gains.alpha1, gains.mu / 2.0);
  lv.delta_star = gains.delta_star();
  if (gains.r >= 1.0) {
    // factored discriminant (d1 - d*)(d1 + d*): exact at the double root,
    // where the plain d1^2 - 4 a1 a2 form loses half the digits
    double disc = std::max(gains.delta1 - lv.delta_star, 0.0) * (gains.delta1 + lv.delta_star);
    double sq = std::sqrt(disc);
    lv.v1 = (gains.delta1 - sq) / (2.0 * gains.alpha1);
    lv.v2 = (gains.delta1 + sq) / (2.0 * gains.alpha1);
  }
  return lv;
}

double domain_level(const FxtsGains& gains, double k) {
  if (!(k > 0.0 && k <= 1.0)) {
    std::ostringstream os;
    os << "k must be in (0,1] (got " << k << ")";
    domain_fail(os.str());
  }
  if (gains.r < 1.0) return kInf;
  CriticalLevels lv = critical_levels(gains);
  return std::pow(k * *lv.v1, gains.mu);
}

double settling_time_bound(const FxtsGains& gains, double k) {
  double root = std::sqrt(gains.alpha1 * gains.alpha2);
  if (gains.r <= 0.0) {
    return gains.mu * std::numbers::pi / (2.0 * root);
  }
  if (gains.r < 1.0) {
    double disc = 4.0 * gains.alpha1 * gains.alpha2 - gains.delta1 * gains.delta1;
    double k1 = std::sqrt(disc / (4.0 * gains.alpha1 * gains.alpha1));
    double k2 = -gains.delta1 / std::sqrt(disc);
    return gains.mu / (gains.alpha1 * k1) * (std::numbers::pi / 2.0 - std::atan(k2));
  }
  if (!(k > 0.0 && k < 1.0)) {
    std::ostringstream os;
    os << "k must be in (0,1) for r >= 1 (got " << k << ")";
    domain_fail(os.str());
  }
  return gains.mu * k / ((1.0 - k) * root);
}

double integral_bound(const FxtsGains& gains, double v0, double k) {
  if (!(v0 >= 0.0)) domain_fail("v0 must be nonnegative");
  double root = std::sqrt(gains.alpha1 * gains.alpha2);
  if (gains.delta1 < 0.0) {
    // delta1 = 0 value of case (i); dominates since the integrand grows with delta1
    return gains.mu * std::numbers::pi / (2.0 * root);
  }
  if (gains.r < 1.0) {
    double disc = 4.0 * gains.alpha1 * gains.alpha2 - gains.delta1 * gains.delta1;
    double k1 = std::sqrt(disc / (4.0 * gains.alpha1 * gains.alpha1));
    double k2 = -gains.delta1 / std::sqrt(disc);
    return gains.mu / (gains.alpha1 * k1) * (std::numbers::pi / 2.0 - std::atan(k2));
  }
  if (!(k > 0.0 && k < 1.0)) {
    std::ostringstream os;
    os << "k must be in (0,1) for the r >= 1 case (got " << k << ")";
    domain_fail(os.str());
  }
  CriticalLevels lv = critical_levels(gains);
  double m0 = std::pow(v0, 1.0 / gains.mu);
  if (m0 > k * *lv.v1 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "v0^(1/mu) = " << m0 << " exceeds the case-(ii) level k v1 = " << k * *lv.v1;
    domain_fail(os.str());
  }
  return gains.mu * k / ((1.0 - k) * root);
}

double integral_oracle(const FxtsGains& gains, double v0) {
  if (!(v0 >= 0.0)) domain_fail("v0 must be nonnegative");
  if (v0 == 0.0) return 0.0;
  double m0 = std::pow(v0, 1.0 / gains.mu);
  if (gains.r >= 1.0) {
    CriticalLevels lv = critical_levels(gains);
    if (m0 >= *lv.v1) {
      std::ostringstream os;
      os << "integrand is singular: v0^(1/mu) = " << m0 << " reaches the root v1 = " << *lv.v1;
      domain_fail(os.str());
    }
  }
  double a1 = gains.alpha1;
  double a2 = gains.alpha2;
  double d1 = gains.delta1;
  auto integrand = [a1, a2, d1](double m) { return 1.0 / (a1 * m * m - d1 * m + a2); };
  return gains.mu * integrate(integrand, 0.0, m0, 1e-10, 60);
}

double doa_level(double r_M, double mu) {
  if (!(r_M >= 1.0)) {
    std::ostringstream os;
    os << "r_M must be >= 1 (got " << r_M << ")";
    domain_fail(os.str());
  }
  if (!(mu > 1.0)) domain_fail("mu must be > 1");
  return std::pow(r_M - std::sqrt(r_M * r_M - 1.0), mu);
}

RobustnessData::RobustnessData(NominalFxtsGains nominal_in, double lip_L_in, double k1_quad_in,
                               double k2_quad_in)
    : nominal(nominal_in), lip_L(lip_L_in), k1_quad(k1_quad_in), k2_quad(k2_quad_in) {
  if (!(lip_L >= 0.0) || !std::isfinite(lip_L)) domain_fail("lip_L must be finite and >= 0");
  if (!(k1_quad > 0.0)) domain_fail("k1_quad must be > 0");
  if (!(k2_quad > 0.0)) domain_fail("k2_quad must be > 0");
}

RobustnessMargin robustness_margin(const RobustnessData& data, double k) {
  // (p, q) = (1 - 1/mu, 1 + 1/mu) must pin down one mu
  double mu_p = 1.0 / (1.0 - data.nominal.p);
  double mu_q = 1.0 / (data.nominal.q - 1.0);
  if (std::abs(mu_p - mu_q) > 1e-9 * std::max(1.0, std::abs(mu_p))) {
    std::ostringstream os;
    os << "exponents (p, q) = (" << data.nominal.p << ", " << data.nominal.q
       << ") are not of the form (1 - 1/mu, 1 + 1/mu)";
    domain_fail(os.str());
  }
  double delta1 = data.k2_quad * data.lip_L / data.k1_quad;
  // the V^q coefficient plays alpha1 (gamma1 power), the V^p one alpha2
  FxtsGains gains(data.nominal.b, data.nominal.a, delta1, mu_p);
  RobustnessMargin margin{gains, classify_regime(gains), domain_level(gains, k),
                          gains.r < 1.0};
  return margin;
}

}  // namespace fxts::cert
