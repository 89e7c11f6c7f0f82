#pragma once

#include <array>
#include <cstddef>

/// Reference values used by acceptance checks.
namespace sbp::reference {

struct AlphaStarRow {
  std::size_t n;
  double lower;
  double upper;
};

inline constexpr std::array<AlphaStarRow, 14> kAlphaStarTable = {{
    {11, 481.3406894997601, 481.3410851822219},
    {12, 481.3408797227131, 481.3408949417200},
    {13, 481.3408847406793, 481.3408899235506},
    {14, 481.3408871324619, 481.3408875317594},
    {15, 481.3408873292311, 481.3408873349902},
    {16, 481.3408873299936, 481.3408873342276},
    {17, 481.3408873319172, 481.3408873323040},
    {18, 481.3408873321098, 481.3408873321114},
    {19, 481.3408873321089, 481.3408873321123},
    {20, 481.3408873321105, 481.3408873321108},
    {21, 481.3408873321106, 481.3408873321106},
    {22, 481.3408873321106, 481.3408873321106},
    {23, 481.3408873321106, 481.3408873321106},
    {24, 481.3408873321106, 481.3408873321106},
}};
inline constexpr double kAlphaStarTolerance = 1e-9;
inline constexpr double kAlphaStarConvergedTolerance = 1e-12;
inline constexpr std::size_t kAlphaStarConvergedFrom = 21;

inline constexpr double kGammaAlpha490 = 0.187871502626966;
inline constexpr double kGammaAlpha483 = 0.087556118235046;
inline constexpr double kGammaTolerance = 1e-9;

inline constexpr double kBetaCrossCheck = 331.0 / 472.0;
inline constexpr double kMinAlphaCrossCheck = 481.6401641339156;
inline constexpr double kMinAlphaBandwidth = 481.3588804669321;
inline constexpr double kMinAlphaTolerance = 1e-4;

inline constexpr double kTruncationL2 = 482.5622776076688;
inline constexpr double kTruncationH = 483.3965798037094;
inline constexpr double kTruncationTolerance = 1e-6;

inline constexpr double kNeumannArgminLow = 484.0;
inline constexpr double kNeumannArgminHigh = 484.6;
inline constexpr double kNeumannErrorRatioLow = 0.85;
inline constexpr double kNeumannErrorRatioHigh = 0.95;
inline constexpr double kNeumannRhoRatioLow = 0.40;
inline constexpr double kNeumannRhoRatioHigh = 0.45;

inline constexpr double kDirichletRhoArgmin = 487.30;
inline constexpr double kDirichletRhoArgminTolerance = 0.2;
inline constexpr double kNearZeroEigenvalue = 1e-8;

/// (rel_error, rel_rho, alpha, phi) rows of the accuracy / stiffness trade-off table.
struct FrontierRow {
  double rel_error;
  double rel_rho;
  double alpha;
  double phi;
};
inline constexpr FrontierRow kFrontierBalanced = {1.25, 2.73, 482.56, 1.19};
inline constexpr FrontierRow kFrontierClassical = {2.79, 1.43, 490.00, 1.70};
inline constexpr double kFrontierFixedError = 1.2;
inline constexpr double kFrontierFixedErrorRho = 3.39;
inline constexpr double kFrontierRatioTolerance = 0.15;

inline constexpr double kQuadraticExactness = 1e-9;

inline constexpr double kHeatGrowthFactor = 10.0;
inline constexpr double kHeatBoundFactor = 5.0;
inline constexpr double kHeatRateGap = 0.3;

inline constexpr double kWaveArgminLow = 482.4;
inline constexpr double kWaveArgminHigh = 484.3;

}  // namespace sbp::reference
