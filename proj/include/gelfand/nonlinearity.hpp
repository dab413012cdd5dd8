#pragma once

#include <cmath>
#include <limits>
#include <functional>
#include <string>

#include "gelfand/common.hpp"

namespace gelfand {

enum class NonlinearityKind { exp, power, custom };

/// Nonlinearity f on [0,inf). Shipped kinds carry exact derivatives.
/// Aggregate construction skips validation (tests and frozen linearizations
/// use that); make() enforces the structural conditions by sampling.
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::exp;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  double power_p = 0.0;  // set for kind == power

  double operator()(double tau) const { return eval(tau); }
};

inline Nonlinearity exp_nonlinearity() {
  Nonlinearity f;
  f.kind = NonlinearityKind::exp;
  f.eval = [](double tau) { return std::exp(tau); };
  f.deriv = [](double tau) { return std::exp(tau); };
  return f;
}

inline Nonlinearity power_nonlinearity(double p) {
  Nonlinearity f;
  f.kind = NonlinearityKind::power;
  f.power_p = p;
  f.eval = [p](double tau) { return std::pow(1.0 + tau, p); };
  f.deriv = [p](double tau) { return p * std::pow(1.0 + tau, p - 1.0); };
  return f;
}

namespace detail {

/// Sampled validation of the structural conditions: f(0) > 0, f nondecreasing,
/// and a superlinear tail. The limit f(tau)/tau -> inf cannot be checked
/// exactly for caller-supplied f; the proxy requires f(tau)/tau to be
/// nondecreasing on a geometric sample and to at least double from tau = 10
/// to tau = 1e3.
inline void validate_nonlinearity(const Nonlinearity& f) {
  const double f0 = f.eval(0.0);
  if (!(f0 > 0.0)) throw ConditionViolated("f(0)>0", 0.0);

  double prev = f0;
  for (double tau = 1e-3; tau <= 1e3 * (1.0 + 1e-12); tau *= 1.2589254117941673) {
    const double v = f.eval(tau);
    // overflow to +inf counts as (very) superlinear, not as a defect
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
      throw ConditionViolated("f finite", tau);
    if (v < prev * (1.0 - 1e-12) - 1e-300)
      throw ConditionViolated("f nondecreasing", tau);
    prev = v;
  }

  double prev_ratio = 0.0;
  for (double tau = 10.0; tau <= 1e3 * (1.0 + 1e-12); tau *= 1.2589254117941673) {
    const double ratio = f.eval(tau) / tau;
    if (ratio < prev_ratio * (1.0 - 1e-9))
      throw ConditionViolated("f(tau)/tau increasing tail", tau);
    prev_ratio = ratio;
  }
  if (!(f.eval(1e3) / 1e3 >= 2.0 * (f.eval(10.0) / 10.0)))
    throw ConditionViolated("superlinearity: f(tau)/tau must double from tau=10 to tau=1e3", 1e3);
}

}  // namespace detail

/// Builds a validated nonlinearity. power requires p > 1; custom requires a
/// caller-supplied derivative and must pass the sampled condition checks.
inline Nonlinearity make_nonlinearity(NonlinearityKind kind, double p = 0.0,
                                      std::function<double(double)> eval = {},
                                      std::function<double(double)> deriv = {}) {
  Nonlinearity f;
  switch (kind) {
    case NonlinearityKind::exp:
      f = exp_nonlinearity();
      break;
    case NonlinearityKind::power:
      if (!(p > 1.0)) throw ConditionViolated("power exponent p>1", p);
      f = power_nonlinearity(p);
      break;
    case NonlinearityKind::custom:
      if (!eval || !deriv)
        throw Error("custom nonlinearity requires eval and deriv");
      f.kind = NonlinearityKind::custom;
      f.eval = std::move(eval);
      f.deriv = std::move(deriv);
      break;
  }
  detail::validate_nonlinearity(f);
  return f;
}

}  // namespace gelfand
