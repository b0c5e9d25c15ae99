#include "qwalk/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qwalk/errors.hpp"
#include "qwalk/evolve.hpp"

namespace qwalk {

namespace {

void require_open_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("rho must lie in (0, 1) for the asymptotic density, got " + std::to_string(rho));
  }
}

// Antiderivative of omega, odd in nu, W(+-rho) = +-1/2.
double omega_cdf(double nu, double rho) {
  if (nu >= rho) return 0.5;
  if (nu <= -rho) return -0.5;
  const double k = std::sqrt(1.0 - rho * rho);
  return std::atan(nu * k / std::sqrt(rho * rho - nu * nu)) / std::numbers::pi;
}

}  // namespace

double omega(double nu, double rho) {
  require_open_rho(rho);
  if (!(std::abs(nu) < rho)) {
    throw DomainError("omega is supported on |nu| < rho only, got nu=" + std::to_string(nu));
  }
  const double k = std::sqrt(1.0 - rho * rho);
  return k / (std::numbers::pi * (1.0 - nu * nu) * std::sqrt(rho * rho - nu * nu));
}

double omega_mass(double lo, double hi, double rho) {
  require_open_rho(rho);
  if (!(lo >= -rho && hi <= rho && lo <= hi)) {
    throw DomainError("omega_mass needs -rho <= lo <= hi <= rho");
  }
  return omega_cdf(hi, rho) - omega_cdf(lo, rho);
}

double DeltaLaw::operator()(double t) const { return c * std::pow(t, exponent); }

SpatialDistribution asymptotic_distribution(long t, double rho, DeltaLaw cut) {
  require_open_rho(rho);
  if (t < 1) {
    throw DomainError("asymptotic distribution needs t >= 1");
  }
  const double td = static_cast<double>(t);
  const double edge = rho * td - cut(td);
  if (!(edge > 0.0)) {
    throw DomainError("front cut removes the whole support at t=" + std::to_string(t));
  }
  // |x| < edge, strictly.
  int reach = static_cast<int>(std::ceil(edge)) - 1;
  if (reach < 0) reach = 0;
  std::vector<double> p(2 * static_cast<std::size_t>(reach) + 1);
  double total = 0.0;
  for (int x = -reach; x <= reach; ++x) {
    const double v = omega(x / td, rho) / td;
    p[static_cast<std::size_t>(x + reach)] = v;
    total += v;
  }
  for (double& v : p) v /= total;
  return SpatialDistribution(t, -reach, std::move(p));
}

double PartialFractionConstants::evaluate(double nu, double rho) const {
  const double q = 1.0 - nu * nu;
  return A / (q * q) + B / q + C / (rho - nu) + D / (rho + nu);
}

PartialFractionConstants partial_fractions(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("partial fractions need 0 < rho < 1 (the poles merge at rho = 1), got " +
                      std::to_string(rho));
  }
  // In u = nu^2: 1/((1-u)^2 (rho^2-u)) = A/(1-u)^2 + B/(1-u) + E/(rho^2-u),
  // then E/(rho^2-nu^2) = E/(2 rho) [1/(rho-nu) + 1/(rho+nu)].
  const double g = 1.0 - rho * rho;
  const double e = 1.0 / (g * g);
  return {-1.0 / g, -e, e / (2.0 * rho), e / (2.0 * rho)};
}

double analytic_ipr(double t, double rho, DeltaLaw delta) {
  const PartialFractionConstants k = partial_fractions(rho);
  if (!(t > 0.0)) {
    throw DomainError("analytic_ipr needs t > 0");
  }
  const double m = rho - delta(t) / t;
  if (!(m > 0.0 && m < rho)) {
    throw DomainError("integration limit rho - delta/t = " + std::to_string(m) + " outside (0, rho)");
  }
  const double at = std::atanh(m);
  const double squared_term = m / (1.0 - m * m) + at;  // 1/(1-nu^2)^2
  const double linear_term = 2.0 * at;                 // 1/(1-nu^2)
  const double pole_term = std::log((rho + m) / (rho - m));
  const double integral = k.A * squared_term + k.B * linear_term + (k.C + k.D) * pole_term;
  return (1.0 - rho * rho) / (std::numbers::pi * std::numbers::pi * t) * integral;
}

double analytic_ipr_log_slope(double rho, double exponent) {
  const PartialFractionConstants k = partial_fractions(rho);
  return (1.0 - rho * rho) * (k.C + k.D) * (1.0 - exponent) / (std::numbers::pi * std::numbers::pi);
}

double calibrate_front_constant(double rho, long steps, long t_min) {
  const CoinParameter coin(rho);
  EvolveOptions options;
  options.track_wavefront = true;
  const TimeSeries series = evolve(theta_c(coin), coin, steps, options).series;
  double num = 0.0, den = 0.0;
  std::size_t used = 0;
  for (const Record& r : series.records) {
    if (r.t < t_min || !r.delta) continue;
    const double s = std::cbrt(static_cast<double>(r.t));
    num += *r.delta * s;
    den += s * s;
    ++used;
  }
  if (used < 5) {
    throw InsufficientDataError("front calibration needs at least 5 wavefront samples with t >= " +
                                std::to_string(t_min));
  }
  return num / den;
}

TimeSeries oracle_series(double rho, std::span<const long> times, DeltaLaw delta) {
  require_open_rho(rho);
  TimeSeries series;
  series.metadata.rho = rho;
  series.metadata.theta = theta_c(CoinParameter(rho)).value();
  series.metadata.steps = times.empty() ? 0 : times.back();
  series.metadata.cadence = "explicit";
  series.metadata.origin = "oracle";
  const double w0 = omega(0.0, rho);
  for (long t : times) {
    const double td = static_cast<double>(t);
    series.records.push_back({t, w0 / td, 1.0 / analytic_ipr(td, rho, delta), {}, {}, {}});
  }
  series.validate();
  return series;
}

}  // namespace qwalk
