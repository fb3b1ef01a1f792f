#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percodiff/geometry.hpp"
#include "percodiff/profiles.hpp"

namespace percodiff {

enum class Verdict { converges, diverges, inconclusive };

const char* to_string(Verdict v);

/// Default truncation ladder for interior criteria.
std::vector<double> default_ladder();
/// Default R ladder {10, 10^1.5, 100, 10^2.5, 1000} for exterior criteria.
std::vector<double> default_exterior_ladder();

struct LadderEntry {
  double epsilon = 0.0;
  double value = 0.0;
};

/// Fit of the tail increments. With L = ln(1/epsilon) and g the increment per
/// unit of L, ln g is regressed on L: slope < 0 is geometric decay, slope near
/// 0 logarithmic growth of the partial values, slope > 0 power growth eps^{-a}.
struct TailModel {
  enum class Kind { constant, geometric, logarithmic, power };
  Kind kind = Kind::constant;
  double slope = 0.0;
  /// Increment ratio per average rung, exp(slope * mean step).
  double ratio = 0.0;
  /// Extrapolated remainder beyond the last rung under the geometric model.
  double tail = 0.0;
  /// Increment per unit L relative to the last value (logarithmic model).
  double log_rate = 0.0;
  std::string name() const;
  /// "slope=..;ratio=..;tail=..;log_rate=.." with shortest round-trip numbers.
  std::string params() const;
};

struct Classification {
  Verdict verdict = Verdict::inconclusive;
  TailModel model;
};

/// Three-way verdict for a ladder of partial values.
///
/// converges: geometric model with ratio < 0.9 and extrapolated tail < 5% of the
/// last value (or a constant ladder); diverges: power model with a > 0.05, or
/// logarithmic model with increment per e-fold above 1% of the last value;
/// inconclusive otherwise. Needs at least 4 rungs with epsilon strictly
/// decreasing; throws InvalidInput when a value decreases.
Classification classify(std::span<const LadderEntry> ladder);

struct CriterionReport {
  std::string criterion;
  std::vector<LadderEntry> ladder;
  Verdict verdict = Verdict::inconclusive;
  TailModel model;
  /// Value of the untruncated integral when the verdict is "converges" and the
  /// criterion is a deterministic integral.
  std::optional<double> limit;
  double last() const { return ladder.empty() ? 0.0 : ladder.back().value; }
};

/// Partial sums of sum_Q l(Q)^2 cap(A n Q) / rho_Q(tau)^d over the Whitney
/// cubes of whitney_decompose(d, eps_i), with cap from cube_capacity.
CriterionReport wiener_series(std::span<const Ball> balls, const BoundaryPoint& tau, std::span<const double> ladder);

/// Per-cube terms of the series at truncation eps (every cube meeting a ball).
struct WienerTerm {
  WhitneyCube cube;
  double capacity = 0.0;
  double term = 0.0;
};
std::vector<WienerTerm> wiener_terms(std::span<const Ball> balls, const BoundaryPoint& tau, double eps);

/// sum_Q cap(A n Q) / l(Q)^{d-2} over exterior_cubes shells 1..j; ladder entry j
/// carries epsilon = 3^{-j}. Throws InvalidInput when a ball meets the closed unit ball.
CriterionReport wiener_series_infinity(std::span<const Ball> balls, int j_max);

/// int_{|x| < 1 - eps} (1 - |x|^2)^2 / |x - tau|^d phi^{d-2} nu dx by product
/// quadrature in (|x|, angle to tau) with geometric refinement towards tau.
CriterionReport balayage(const RadiusProfile& phi, const IntensityProfile& nu, const BoundaryPoint& tau,
                         std::span<const double> ladder, int d);

/// int_0^{1-eps} (1 - t) phi(t)^{d-2} nu(t) dt.
CriterionReport radial_criterion(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                 std::span<const double> ladder);

/// int_0^{1-eps} (1 - t)^{d-1} nu(t) dt.
CriterionReport lundh_criterion(const IntensityProfile& nu, int d, std::span<const double> ladder);

/// int_0^{1-eps} phi(t)^{d-2} / (1 - t)^{d-1} dt. Throws Unsupported for d = 2.
CriterionReport deterministic_criterion(const RadiusProfile& phi, int d, std::span<const double> ladder);

/// mu({|x| < 1 - eps}); +infinity when eps = 0 and the mean measure diverges.
double expected_obstacle_count(const IntensityProfile& nu, double eps, int d);
CriterionReport expected_obstacle_count(const IntensityProfile& nu, int d, std::span<const double> ladder);

/// |S^{d-1}| int_1^R r^{d-1} (phi(r)/r)^{d-2} nu(r) dr along an R ladder
/// (epsilon = 1/R). Profiles must be of the constant or radial-power family.
CriterionReport exterior_criterion(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                   std::span<const double> radii);

/// int_1^R r phi(r)^{d-2} dr, the constant-intensity exterior criterion.
CriterionReport exterior_deterministic_criterion(const RadiusProfile& phi, int d, std::span<const double> radii);

struct RungStatistics {
  double epsilon = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo E[W(A_P, tau)] per rung: n_realizations samples at the smallest
/// rung, realization k drawing from derive_seed(seed, wiener_realization, {k}).
std::vector<RungStatistics> expected_wiener(const RadiusProfile& phi, const IntensityProfile& nu,
                                            const BoundaryPoint& tau, std::span<const double> ladder, int d,
                                            int n_realizations, std::uint64_t seed, int threads = 1);

/// Pooled ratio sum_Q E[cap(A_P n Q)] / sum_Q phi(c_Q)^{d-2} mu(Q) over all
/// Whitney cubes of the given sidelength, estimated from n_realizations samples
/// at truncation eps. std_error comes from the spread of per-realization ratios.
struct CapacityDensityRatio {
  double sidelength = 0.0;
  std::size_t cubes = 0;
  double ratio = 0.0;
  double std_error = 0.0;
};
CapacityDensityRatio capacity_density_ratio(const RadiusProfile& phi, const IntensityProfile& nu, int d,
                                            double sidelength, double eps, int n_realizations, std::uint64_t seed,
                                            int threads = 1);

/// CSV with header "# schema=1" and columns criterion,epsilon,value,verdict,model,params.
void write_criteria_csv(std::ostream& out, std::span<const CriterionReport> reports);

}  // namespace percodiff
