#include <cmath>
#include <string>
#include <vector>

#include "sbp/analysis.hpp"
#include "sbp/errors.hpp"
#include "sbp/operators.hpp"

namespace sbp {

namespace {

constexpr std::size_t kReferenceIntervals = 24;
constexpr double kReferenceBeta = 331.0 / 472.0;
constexpr double kReferenceThreshold = 481.6401641339156;
constexpr double kCrossCheckTolerance = 1e-4;

BetaMap calibrate_uncached() {
  const Grid grid = make_grid(kReferenceIntervals);
  const FirstDerivativeFamily family = first_derivative_family(grid, 6);

  // Row 5 exact on x⁴: Σ_j q_5j j⁴ = (H_5/h)·4·5³, affine in t.
  const double norm5 = boundary_norm_weights(6)[5];
  const double target = norm5 * 4.0 * 125.0;
  double base = 0.0, slope = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double j4 = std::pow(static_cast<double>(j), 4);
    base += family.base(5, j) * j4;
    slope += family.direction(5, j) * j4;
  }
  const double t_accuracy = (target - base) / slope;

  std::vector<std::size_t> tried;
  for (std::size_t j = 1; j < 6; ++j) {
    const double dq = family.direction(0, j);
    if (std::abs(dq) < 1e-12) continue;
    tried.push_back(j);
    BetaMap map;
    map.t_accuracy = t_accuracy;
    map.t_bandwidth = -family.base(0, j) / dq;
    map.vanishing_entry = j;
    map.slope = (kBetaBandwidth - kBetaAccuracy) / (map.t_bandwidth - map.t_accuracy);
    map.offset = kBetaAccuracy - map.slope * map.t_accuracy;
    try {
      map.cross_check_threshold = compatibility_min_alpha_t(map.t(kReferenceBeta), kReferenceIntervals);
    } catch (const NoCrossing&) {
      continue;
    }
    if (std::abs(map.cross_check_threshold - kReferenceThreshold) <= kCrossCheckTolerance) return map;
  }
  throw CalibrationAmbiguous("none of " + std::to_string(tried.size()) +
                             " candidate maps reproduces the reference compatibility threshold");
}

}  // namespace

BetaMap calibrate_beta(const Grid& grid) {
  if (grid.n < minimum_intervals(6)) throw GridTooSmall("calibration needs n >= 11");
  static const BetaMap map = calibrate_uncached();
  return map;
}

}  // namespace sbp
