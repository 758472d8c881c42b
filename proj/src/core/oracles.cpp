#include "core/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace coalflow::oracles {

namespace {

constexpr double kPi = 3.14159265358979323846;

double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a,
                       double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, m - a);
  const double right = simpson_rule(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, QuadratureConfig cfg) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson_rule(fa, fm, fb, b - a);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, cfg.abs_tol,
                         cfg.max_depth);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double phi_c(double c, double t) {
  if (c == 0.0) {
    throw std::invalid_argument(
        "phi_c: C = 0 has no closed time change; use phi_time_change");
  }
  if (t < 0.0) throw std::invalid_argument("phi_c: t must be >= 0");
  // expm1 keeps the small-|C| limit (= t) accurate.
  return -std::expm1(-2.0 * c * t) / (2.0 * c);
}

double phi_time_change(double c, double t) {
  return c == 0.0 ? t : phi_c(c, t);
}

double meeting_survival_linear(double c, double u1, double u2, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("meeting_survival_linear: t must be > 0");
  }
  if (u1 > u2) {
    throw std::invalid_argument("meeting_survival_linear: requires u1 <= u2");
  }
  const double phi = phi_time_change(c, t);
  // sqrt(2/pi) int_0^{u/sqrt(phi)} e^{-v^2/2} dv, u = (u2-u1)/sqrt(2).
  return std::erf((u2 - u1) / (2.0 * std::sqrt(phi)));
}

double meeting_cdf_linear(double c, double u1, double u2, double t) {
  return 1.0 - meeting_survival_linear(c, u1, u2, t);
}

double meeting_never_prob_linear(double c, double u1, double u2) {
  if (u1 > u2) {
    throw std::invalid_argument("meeting_never_prob_linear: requires u1 <= u2");
  }
  if (c <= 0.0) return 0.0;  // time change diverges: meeting is a.s.
  return std::erf((u2 - u1) * std::sqrt(0.5 * c));
}

double reflection_meet_cdf(double gap, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("reflection_meet_cdf: t <= 0");
  return std::erfc(std::abs(gap) / (2.0 * std::sqrt(t)));
}

double l_defect(double t, double u) {
  if (!(t > 0.0)) throw std::invalid_argument("l_defect: t must be > 0");
  if (u < 0.0) throw std::invalid_argument("l_defect: u must be >= 0");
  if (u == 0.0) return t;  // tau = 0: E(t - tau)^+ = t
  const auto cdf = [u](double s) {
    return s <= 0.0 ? 0.0 : std::erfc(u / (2.0 * std::sqrt(s)));
  };
  return adaptive_simpson(cdf, 0.0, t);
}

double l_defect_density_route(double t, double u) {
  if (!(t > 0.0)) throw std::invalid_argument("l_defect: t must be > 0");
  if (u < 0.0) throw std::invalid_argument("l_defect: u must be >= 0");
  if (u == 0.0) return t;
  if (u >= 1e-3) {
    const auto density_term = [t, u](double s) {
      if (s <= 0.0) return 0.0;
      return (t - s) * u * std::pow(s, -1.5) *
             std::exp(-u * u / (4.0 * s)) / (2.0 * std::sqrt(kPi));
    };
    return adaptive_simpson(density_term, 0.0, t);
  }
  // Small u: substitute s = u^2/(4 q^2); the integrand becomes
  // (t - u^2/(4 q^2)) * (2/sqrt(pi)) e^{-q^2} on [u/(2 sqrt(t)), inf).
  const double q0 = u / (2.0 * std::sqrt(t));
  const auto smooth = [t, u](double q) {
    return (t - u * u / (4.0 * q * q)) * (2.0 / std::sqrt(kPi)) *
           std::exp(-q * q);
  };
  return adaptive_simpson(smooth, q0, q0 + 9.0);
}

double l_bound_constant() {
  // Maximize log g(s) = -1/(4s) - 1.5 log s on (0, 1] by golden-section.
  static const double k = [] {
    const auto lg = [](double s) { return -0.25 / s - 1.5 * std::log(s); };
    double lo = 1e-6, hi = 1.0;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = lg(x1), f2 = lg(x2);
    for (int i = 0; i < 200; ++i) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = lg(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = lg(x1);
      }
    }
    return std::exp(lg(0.5 * (lo + hi))) / (2.0 * std::sqrt(kPi));
  }();
  return k;
}

double l_upper_bound(double t, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("l_upper_bound: u must be > 0");
  return t * t / (u * u) * l_bound_constant();
}

double expected_cluster_size_linear(double c, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("expected_cluster_size_linear: t must be > 0");
  }
  const double phi = phi_time_change(c, t);
  const double root = std::sqrt(phi);
  return (2.0 / std::sqrt(kPi)) * root * (-std::expm1(-1.0 / (4.0 * phi))) +
         std::erfc(1.0 / (2.0 * root));
}

double expected_cluster_size_quadrature(double c, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument(
        "expected_cluster_size_quadrature: t must be > 0");
  }
  const double phi = phi_time_change(c, t);
  const double root_phi = std::sqrt(phi);
  const auto gauss = [](double v) { return std::exp(-0.5 * v * v); };
  const auto meet_prob = [&](double r) {
    const double upper = (r / std::sqrt(2.0)) / root_phi;
    const double surv = std::sqrt(2.0 / kPi) *
                        adaptive_simpson(gauss, 0.0, upper, {1e-12, 48});
    return 1.0 - surv;
  };
  return adaptive_simpson(meet_prob, 0.0, 1.0, {1e-10, 48});
}

}  // namespace coalflow::oracles
