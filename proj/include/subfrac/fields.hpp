#pragma once

#include <functional>
#include <string>

#include "subfrac/orlicz.hpp"
#include "subfrac/quadrature.hpp"

namespace subfrac {

enum class Smoothness { c2, lipschitz, measurable };

// Real-valued function on the group, zero outside the gauge ball of radius
// supportRadius(). Evaluation must be pure and reentrant.
class ScalarField {
public:
    using Fn = std::function<double(const Coords&)>;

    ScalarField() = default;
    ScalarField(std::string name, Fn fn, double supportRadius, Smoothness s);

    double operator()(const Coords& x) const { return fn_(x); }
    double supportRadius() const { return supportRadius_; }
    Smoothness smoothness() const { return smoothness_; }
    const std::string& name() const { return name_; }

    ScalarField scaled(double lambda) const;  // lambda * u

private:
    std::string name_ = "zero";
    Fn fn_ = [](const Coords&) { return 0.0; };
    double supportRadius_ = 0.0;
    Smoothness smoothness_ = Smoothness::c2;
};

// Built-in test fields (one per smoothness class).
ScalarField makeBump(const HomogeneousGauge& ng, double radius);
ScalarField makeGauss(const CarnotGroup& g, const HomogeneousGauge& ng, double radius);
ScalarField makeIndicator(const HomogeneousGauge& ng, double radius);
ScalarField makeField(const std::string& name, double radius, const CarnotGroup& g,
                      const HomogeneousGauge& ng);

// Mollifier density before normalization: exp(-1/(1-q)) on q < 1 with
// q = gauge^4 (a polynomial in coordinates for the shipped gauges).
double mollifierDensity(const HomogeneousGauge& ng, const Coords& z);
// Cached \int rho0 over the unit ball; rho = rho0 / this.
double mollifierNormalization(const CarnotGroup& g, const HomogeneousGauge& ng,
                              const QuadratureSpec& spec);
// Cut-off profile: 1 on r<=1, 0 on r>=2, C^2 quintic transition, |slope|<=2.
double cutoffProfile(double r);

// u_eps(x) = \int_{B(0,1)} u((delta_eps z)^{-1} . x) rho(z) dz on fixed QMC
// nodes; support radius grows by eps.
ScalarField mollify(const ScalarField& u, const CarnotGroup& g,
                    const HomogeneousGauge& ng, double eps, const QuadratureSpec& spec);

// eta_k * u with eta_k(x) = cutoffProfile(gauge(x)/k).
ScalarField truncate(const ScalarField& u, const CarnotGroup& g,
                     const HomogeneousGauge& ng, int k);

}  // namespace subfrac
