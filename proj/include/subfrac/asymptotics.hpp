#pragma once

#include <map>
#include <string>
#include <vector>

#include "subfrac/functionals.hpp"

namespace subfrac {

enum class SweepRegime { bbm_s_to_1, ms_s_to_0 };
enum class VerdictStatus { pass, fail, inconclusive };

struct Verdict {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double errorBar = 0.0;  // combined 3-sigma bar used for the call
    VerdictStatus status = VerdictStatus::inconclusive;
    std::string note;
};

const char* statusName(VerdictStatus s);
// lhs <= rhs with a three-valued outcome: inconclusive when |lhs-rhs| is
// inside the bar.
Verdict checkUpperBound(std::string name, double lhs, double rhs, double bar,
                        std::string note = "");
Verdict checkInBand(std::string name, double value, double lo, double hi, double bar,
                    std::string note = "");
// |value - target| <= bar passes; an equality claim cannot out-resolve the bar.
Verdict checkEquality(std::string name, double value, double target, double bar,
                      std::string note = "");

struct SweepPoint {
    double s = 0.0;
    double raw = 0.0;     // Phi_{s,phi}(u)
    double scaled = 0.0;  // (1-s) * raw or s * raw
    double err = 0.0;     // standard error of scaled
    EnergyBreakdown parts;
};

struct ExtrapolationResult {
    double limit = 0.0;
    double residual = 0.0;
};

// Weighted least-squares linear fit of value against (1-s) (bbm) or s (ms);
// returns the intercept and a residual folded into verdict error bars.
ExtrapolationResult extrapolateLimit(const std::vector<std::array<double, 3>>& points,
                                     SweepRegime regime);

struct SweepResult {
    SweepRegime regime = SweepRegime::ms_s_to_0;
    std::vector<SweepPoint> points;  // sorted by s
    double extrapolated = 0.0;
    double residual = 0.0;
    std::map<std::string, double> targets;
    std::vector<Verdict> verdicts;
};

// (1-s) Phi_{s,phi}(u) swept toward s = 1, compared against the phi~ target
// and the directional variant; the interpolation upper bound is checked per point.
SweepResult bbmSweep(const ScalarField& u, const OrliczFunction& phi,
                     const CarnotGroup& g, const HomogeneousGauge& ng,
                     const std::vector<double>& sGrid, const QuadratureSpec& spec);

// s Phi_{s,phi}(u) swept toward s = 0 with the liminf/limsup band, the
// Minkowski-refined band (when (M) holds) and the exact power-family target.
SweepResult msSweep(const ScalarField& u, const OrliczFunction& phi,
                    const CarnotGroup& g, const HomogeneousGauge& ng,
                    const std::vector<double>& sGrid, const QuadratureSpec& spec);

// Empirical Minkowski-type property (M) for phi on field pairs sharing
// quadrature nodes. Exact (up to rounding) for the power family.
bool minkowskiHolds(const OrliczFunction& phi, const CarnotGroup& g,
                    const HomogeneousGauge& ng, const QuadratureSpec& spec,
                    Verdict* detail = nullptr);

// One record per inequality per parameter point (mollification contraction,
// truncation bound, interpolation bound, translation estimate, sandwich).
std::vector<Verdict> verifyInequalities(const ScalarField& u, const OrliczFunction& phi,
                                        const CarnotGroup& g, const HomogeneousGauge& ng,
                                        const std::vector<double>& sList,
                                        const QuadratureSpec& spec);

}  // namespace subfrac
