#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "subfrac/quadrature.hpp"

namespace subfrac {

enum class OrliczFamily { power, power_log };

struct GrowthIndices {
    double pMinus = 0.0;
    double pPlus = 0.0;
    double delta2 = 0.0;  // Delta_2 constant, 2 < C <= 2^{p+}
};

// Nice Young function normalized to phi(1) = 1. Shipped families:
//   power:     t^p,                      p in (1, inf)
//   power_log: t^p ln(1+t)/ln 2,         indices estimated on a log grid
class OrliczFunction {
public:
    static OrliczFunction power(double p);
    static OrliczFunction powerLog(double p);
    static OrliczFunction fromId(const std::string& id);  // "power:2", "power_log:2"

    OrliczFamily family() const { return family_; }
    double p() const { return p_; }
    std::string name() const;
    const GrowthIndices& indices() const { return idx_; }

    double operator()(double t) const;  // phi, throws on t < 0
    double deriv(double t) const;       // phi'
    double inverse(double y) const;     // bisection, 1e-12 relative
    double conjugate(double s) const;   // sup_{t>0} { s t - phi(t) }

    // H(tau) = \int_0^tau phi(xi) dxi/xi. Closed form for the power family,
    // tabulated otherwise. Drives the analytic radial reductions:
    //   \int_R^inf phi(a r^{-s}) dr/r   = H(a R^{-s}) / s
    //   \int_0^R  phi(a r^{1-s}) dr/r   = H(a R^{1-s}) / (1-s).
    double logPrimitive(double tau) const;

private:
    OrliczFunction() = default;
    void buildTables();
    OrliczFamily family_ = OrliczFamily::power;
    double p_ = 2.0;
    GrowthIndices idx_;
    // log-spaced H table for non-power families
    std::vector<double> htab_;
    double htabLogMin_ = 0.0, htabLogStep_ = 0.0;
};

struct PhiTildeResult {
    double value = 0.0;
    double residual = 0.0;  // extrapolation/fit residual (or rule error)
    double c1 = 0.0, c2 = 0.0;  // sandwich constants (sphere-moment form)
    bool sandwichOk = false;
    std::vector<std::pair<double, double>> sweep;  // (s, (1-s)-weighted value)
};

// Limit function phi~ of the s->1 double integral. Power family: exact
// closed form through the sphere rule; otherwise evaluated on the s grid
// (geometric r grid adapted to 1-s) and extrapolated linearly in (1-s).
// directional=true replaces t||z'|| by |v.z'| in the integrand.
PhiTildeResult phiTilde(const OrliczFunction& phi, const CarnotGroup& g,
                        const HomogeneousGauge& ng, double t,
                        const std::vector<double>& sGrid, bool directional,
                        const std::array<double, 3>* v, const QuadratureSpec& spec);

}  // namespace subfrac
