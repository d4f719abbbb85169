#pragma once

#include <optional>

#include "subfrac/fields.hpp"
#include "subfrac/orlicz.hpp"

namespace subfrac {

inline constexpr double kGradStep = 1e-4;

struct EnergyBreakdown {
    double total = 0.0;
    double nearField = 0.0;     // dyadic shells + linearized core, gauge(h) < R_split
    double farField = 0.0;      // sampled beyond the split radius (0: exact reduction)
    double tailAnalytic = 0.0;  // disjoint-support tail, gauge(h) >= R_split
    double err = 0.0;
};

// Phi_phi(u) = \int phi(|u|).
IntegralValue phiEnergy(const ScalarField& u, const OrliczFunction& phi,
                        const CarnotGroup& g, const HomogeneousGauge& ng,
                        const QuadratureSpec& spec);

struct GagliardoOptions {
    double splitFactor = 2.0;  // R_split = splitFactor * support radius
};

// Phi_{s,phi}(u) as near field (dyadic annuli rescaled to the unit annulus,
// plus the Pansu-linearized analytic core below the innermost shell), exact
// disjoint-support far field, and the analytic radial tail.
EnergyBreakdown gagliardoEnergy(const ScalarField& u, const OrliczFunction& phi,
                                double s, const CarnotGroup& g,
                                const HomogeneousGauge& ng, const QuadratureSpec& spec,
                                const GagliardoOptions& opt = {});

// Central differences along the horizontal group directions.
std::array<double, 3> horizontalGradient(const ScalarField& u, const CarnotGroup& g,
                                         const Coords& x, double step = kGradStep);

// Phi_phi(||grad_G u||_{R^m}).
IntegralValue localEnergy(const ScalarField& u, const OrliczFunction& phi,
                          const CarnotGroup& g, const HomogeneousGauge& ng,
                          const QuadratureSpec& spec, double step = kGradStep);

// Luxemburg norm inf{lambda > 0 : modular(u/lambda) <= 1}; with seminormS the
// modular is Phi_{s,phi}.
double luxemburgNorm(const ScalarField& u, const OrliczFunction& phi,
                     const CarnotGroup& g, const HomogeneousGauge& ng,
                     const QuadratureSpec& spec,
                     std::optional<double> seminormS = std::nullopt);

// Phi_phi(tau_h u - u) with tau_h u(x) = u(x.h).
double translationGap(const ScalarField& u, const OrliczFunction& phi,
                      const CarnotGroup& g, const HomogeneousGauge& ng,
                      const Coords& h, const QuadratureSpec& spec);

// M = (C/(2 C_b)) (2^{s p^-+Q} + 1), the translation-estimate constant.
double fktBoundConstant(const OrliczFunction& phi, const GaugeConstants& gc, double s);

// Directional and ||z'||-form limit kernels (exact for the power family,
// tabulated otherwise):
//   directionalLimit(a) = \int_S H(a |z'_1|) dsigma
//   zFormLimit(t)       = \int_S H(t ||z'||) dsigma  (= phi~(t))
class LimitKernels {
public:
    LimitKernels(const OrliczFunction& phi, const CarnotGroup& g,
                 const HomogeneousGauge& ng, std::uint64_t seed);
    double directionalLimit(double a) const;
    double zFormLimit(double t) const;

private:
    double lookup(const std::vector<double>& tab, double a) const;
    bool exactPower_ = false;
    double p_ = 2.0;
    double momentDir_ = 0.0;  // \int_S |z'_1|^p dsigma
    double momentZ_ = 0.0;    // \int_S ||z'||^p dsigma
    std::vector<double> tabDir_, tabZ_;
    double logMin_ = 0.0, logStep_ = 0.0;
};

std::shared_ptr<const LimitKernels> limitKernels(const OrliczFunction& phi,
                                                 const CarnotGroup& g,
                                                 const HomogeneousGauge& ng,
                                                 std::uint64_t seed);

}  // namespace subfrac
