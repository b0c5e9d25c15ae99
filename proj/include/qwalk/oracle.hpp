#pragma once

// Weak-limit asymptotics of the walk at the detrapping angle: the group
// velocity density, the distribution it implies at finite t, and a closed-form
// inverse participation ratio.

#include <span>

#include "qwalk/observables.hpp"

namespace qwalk {

/// omega(nu) = sqrt(1 - rho^2) / (pi (1 - nu^2) sqrt(rho^2 - nu^2)) on |nu| < rho.
double omega(double nu, double rho);

/// Closed-form mass of omega over [lo, hi], both inside [-rho, rho].
double omega_mass(double lo, double hi, double rho);

/// Sublinear front offset delta(t) = c t^exponent.
struct DeltaLaw {
  double c = 0.0;
  double exponent = 1.0 / 3.0;

  double operator()(double t) const;
};

/// P_x = omega(x/t)/t for |x| < rho t - delta(t), zero outside, renormalized.
SpatialDistribution asymptotic_distribution(long t, double rho, DeltaLaw cut);

/// 1/((1-nu^2)^2 (rho^2-nu^2)) = A/(1-nu^2)^2 + B/(1-nu^2) + C/(rho-nu) + D/(rho+nu).
struct PartialFractionConstants {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;

  double evaluate(double nu, double rho) const;
};

PartialFractionConstants partial_fractions(double rho);

/// (1 - rho^2)/(pi^2 t) times the integral of 1/((1-nu^2)^2 (rho^2-nu^2)) over
/// |nu| < rho - delta(t)/t, from the antiderivative of each partial fraction.
double analytic_ipr(double t, double rho, DeltaLaw delta);

/// Coefficient of ln t in t * analytic_ipr as t -> infinity:
/// (1 - rho^2)(C + D)(1 - exponent)/pi^2.
double analytic_ipr_log_slope(double rho, double exponent = 1.0 / 3.0);

/// c in delta = c t^(1/3), least squares through the origin over the
/// wavefront samples of a theta_c run with t >= t_min.
double calibrate_front_constant(double rho, long steps, long t_min = 50);

/// Asymptotic SP = omega(0)/t and PR = 1/analytic_ipr at the given times, in
/// the TimeSeries schema with origin "oracle".
TimeSeries oracle_series(double rho, std::span<const long> times, DeltaLaw delta);

}  // namespace qwalk
