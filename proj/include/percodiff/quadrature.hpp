#pragma once

#include <functional>

namespace percodiff {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (21 point) integral of f over [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-11);

/// Integral over [a, b] with the interval split geometrically towards `singular`
/// (one of the endpoints, or beyond b), which keeps each panel smooth when the
/// integrand blows up like a power of |x - singular|. Cuts stop once the gap to
/// `singular` falls below min_gap (the integrand's own length scale, if known).
QuadratureResult integrate_graded(const std::function<double(double)>& f, double a, double b, double singular,
                                  double rel_tol = 1e-11, double min_gap = 0.0);

/// Integral of g(u) over (0, b] for g integrable but possibly singular at u = 0.
/// Uses tanh-sinh, which tolerates endpoint singularities.
QuadratureResult integrate_to_zero(const std::function<double(double)>& g, double b, double rel_tol = 1e-12);

}  // namespace percodiff
