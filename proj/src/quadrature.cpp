#include "percodiff/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "percodiff/errors.hpp"

namespace percodiff {

namespace bq = boost::math::quadrature;

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return {};
  double error = 0.0;
  double l1 = 0.0;
  const double value = bq::gauss_kronrod<double, 21>::integrate(f, a, b, 15, rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw NumericalFailure("quadrature produced a non-finite value");
  return {value, error};
}

QuadratureResult integrate_graded(const std::function<double(double)>& f, double a, double b, double singular,
                                  double rel_tol, double min_gap) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_graded(f, b, a, singular, rel_tol, min_gap);
    return {-r.value, r.error};
  }
  // Breakpoints at singular -/+ gap 2^{-k}, walking from the far endpoint.
  const bool towards_b = std::abs(singular - b) <= std::abs(singular - a);
  const double far = towards_b ? a : b;
  const double near = towards_b ? b : a;
  const double span = std::abs(singular - far);
  std::vector<double> cuts{far};
  for (int k = 1; k < 1100; ++k) {
    const double gap = std::ldexp(span, -k);
    if (gap < min_gap) break;
    const double x = towards_b ? singular - gap : singular + gap;
    if (towards_b ? x >= near : x <= near) break;
    cuts.push_back(x);
  }
  cuts.push_back(near);
  // Panels clear of `singular` are integrated in w = ln|x - singular|, where a
  // power law becomes an exponential the rule resolves at once.
  auto panel = [&](std::size_t k, double tol, int depth, double* l1) {
    const double lo = std::min(cuts[k], cuts[k + 1]);
    const double hi = std::max(cuts[k], cuts[k + 1]);
    const double dlo = std::abs(lo - singular);
    const double dhi = std::abs(hi - singular);
    double error = 0.0;
    double value = 0.0;
    if (std::min(dlo, dhi) > 0.0 && (lo - singular) * (hi - singular) > 0.0) {
      const double sign = lo > singular ? 1.0 : -1.0;
      auto g = [&](double w) {
        const double r = std::exp(w);
        return f(singular + sign * r) * r;
      };
      value = bq::gauss_kronrod<double, 21>::integrate(g, std::log(std::min(dlo, dhi)), std::log(std::max(dlo, dhi)),
                                                       depth, tol, &error, l1);
    } else if (depth == 0) {
      value = bq::gauss_kronrod<double, 21>::integrate(f, lo, hi, 0, tol, &error, l1);
    } else {
      // The panel touching `singular`; Gauss-Kronrod error estimates stall on
      // panels this short, tanh-sinh does not.
      bq::tanh_sinh<double> rule(12);
      value = rule.integrate(f, lo, hi, std::max(tol, 1e-12), &error, l1);
    }
    return QuadratureResult{value, error};
  };
  // A cheap first pass sizes each panel, so one holding a tiny share of the
  // mass is only refined to the overall tolerance, not its own roundoff floor.
  std::vector<double> share(cuts.size() - 1);
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    panel(k, 0.0, 0, &share[k]);
    mass += share[k];
  }
  QuadratureResult total;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double tol = share[k] > 0.0 ? std::clamp(rel_tol * mass / share[k], rel_tol, 1e-2) : 1e-2;
    double l1 = 0.0;
    const auto piece = panel(k, tol, 15, &l1);
    total.value += piece.value;
    total.error += piece.error;
  }
  if (!std::isfinite(total.value)) throw NumericalFailure("quadrature produced a non-finite value");
  return total;
}

QuadratureResult integrate_to_zero(const std::function<double(double)>& g, double b, double rel_tol) {
  if (b <= 0.0) return {};
  bq::tanh_sinh<double> rule(15);
  double error = 0.0;
  double l1 = 0.0;
  // Products like u * u^{-2} overflow to inf * 0 within 1e-100 of the endpoint,
  // where an integrable power singularity carries no visible mass.
  auto h = [&](double u) {
    const double v = g(u);
    return !std::isfinite(v) && u < 1e-100 ? 0.0 : v;
  };
  double value = 0.0;
  try {
    value = rule.integrate(h, 0.0, b, rel_tol, &error, &l1);
  } catch (const std::exception& e) {
    throw NumericalFailure(std::string("tanh-sinh quadrature failed: ") + e.what());
  }
  if (!std::isfinite(value)) throw NumericalFailure("quadrature produced a non-finite value");
  return {value, error};
}

}  // namespace percodiff
