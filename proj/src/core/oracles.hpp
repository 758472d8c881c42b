#pragma once

#include <functional>

namespace coalflow::oracles {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_depth = 48;
};

// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, QuadratureConfig cfg = {});

// Phi(x) to full double precision (erfc-based).
double normal_cdf(double x);

// Time change of the linear-drift pair gap: the gap Delta of two independent
// unit diffusions with drift a(u)=Cu satisfies dDelta = C Delta dt + sqrt(2) dbeta,
// and Delta/sqrt(2) is an OU process of rate C whose driving-martingale clock is
//   phi_C(t) = int_0^t e^{-2Cs} ds = (1 - e^{-2Ct}) / (2C).
// Throws on C == 0; callers wanting the zero-drift limit use phi_time_change.
double phi_c(double c, double t);

// phi_c with the zero-drift branch phi_0(t) = t.
double phi_time_change(double c, double t);

// P{tau > t} for the pair started at (u1, u2) under drift a(u) = Cu:
// sqrt(2/pi) * int_0^{u/sqrt(phi)} e^{-v^2/2} dv with u = (u2-u1)/sqrt(2).
double meeting_survival_linear(double c, double u1, double u2, double t);

// 1 - survival; the meeting-time CDF.
double meeting_cdf_linear(double c, double u1, double u2, double t);

// t -> infinity limit of the survival; positive only for repulsive C > 0.
double meeting_never_prob_linear(double c, double u1, double u2);

// Zero-drift meeting CDF by the reflection principle:
// P{tau <= t} = 2(1 - Phi(gap / sqrt(2t))) = erfc(gap / (2 sqrt(t))).
double reflection_meet_cdf(double gap, double t);

// Coalescence defect l(t,u) = E (t - tau)^+ for a pair at distance u:
// hitting-time route, int_0^t P{tau <= s} ds.  l(t, 0) = t.
double l_defect(double t, double u);

// Same quantity by quadrature of the first-passage density
// (t-s) * u s^{-3/2} e^{-u^2/(4s)} / (2 sqrt(pi)); independent of l_defect.
double l_defect_density_route(double t, double u);

// l(t,u) <= K t^2 / u^2 with K = sup_{s in (0,1]} e^{-1/(4s)} s^{-3/2} / (2 sqrt(pi)).
double l_upper_bound(double t, double u);
double l_bound_constant();

// E nu_t for drift a(u) = Cu: integral over [0,1] of the meeting CDF,
//   (2/sqrt(pi)) sqrt(phi) (1 - e^{-1/(4 phi)}) + erfc(1/(2 sqrt(phi))),
// phi = phi_time_change(C, t).  Re-derived from the survival law; the
// nested-quadrature route below is the independent check.
double expected_cluster_size_linear(double c, double t);

// int_0^1 (1 - survival(0, r, t)) dr by nested adaptive Simpson (the inner
// gaussian integral is also quadrature, not erf).
double expected_cluster_size_quadrature(double c, double t);

}  // namespace coalflow::oracles
