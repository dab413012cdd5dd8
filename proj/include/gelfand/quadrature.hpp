#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace gelfand {

/// Adaptive 1D quadrature on (a,b). tanh-sinh never evaluates the endpoints,
/// so integrable endpoint singularities (sigma^a with a > -1, arc-length
/// blowups of circular graphs) are handled without special casing.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10) {
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> quad;
  return quad.integrate(std::forward<F>(f), a, b, rel_tol);
}

}  // namespace gelfand
