#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subfrac/group.hpp"
#include "subfrac/qmc.hpp"

namespace subfrac {

struct QuadratureSpec {
    enum class Method { qmc, grid };
    Method method = Method::qmc;
    std::size_t samples = 200000;
    std::uint64_t seed = 1;
    int annuli = 40;      // cap on dyadic shells in the near field
    double r_min = 1e-4;  // inner radius cutoff
    void validate() const;
};

struct IntegralValue {
    double value = 0.0;
    double err = 0.0;  // standard error (statistical or refinement estimate)
    std::map<std::string, double> breakdown;
};

struct Region {
    enum class Kind { box, ball, annulus };
    Kind kind = Kind::box;
    Box box;            // kind == box
    double a = 0.0;     // annulus inner radius
    double b = 0.0;     // ball / annulus outer radius
    static Region makeBox(const Box& b);
    static Region ball(double r);
    static Region annulus(double a, double b);
};

using GroupFn = std::function<double(const Coords&)>;

// Bounding box of the gauge ball {gauge <= r}.
Box gaugeBallBox(const HomogeneousGauge& ng, double r);

// Haar (= Lebesgue) integral of f over the region. Throws on unbounded
// regions and on non-finite integrand samples.
IntegralValue regionIntegral(const GroupFn& f, const CarnotGroup& g,
                             const HomogeneousGauge& ng, const Region& region,
                             const QuadratureSpec& spec);

// Lebesgue measure of the unit gauge ball, cached per (gauge, seed, samples).
IntegralValue ballVolume(const CarnotGroup& g, const HomogeneousGauge& ng,
                         const QuadratureSpec& spec);

// Q C_b * \int_a^b r^{Q-1} f(r) dr by deterministic quadrature. Infinite b
// needs a verified decay exponent beta > Q (f ~ r^{-beta}).
IntegralValue radialIntegral(const std::function<double(double)>& profile, double a,
                             double b, const CarnotGroup& g, const HomogeneousGauge& ng,
                             const QuadratureSpec& spec,
                             std::optional<double> decayExponent = std::nullopt);

struct SphereNode {
    Coords z{};             // point on the unit gauge sphere
    double weight = 0.0;    // global weight (sums to sigma(S) over all nodes)
    double horizNorm = 0.0; // ||z'||_{R^m}
    double horizFirstAbs = 0.0;  // |z'_1|
};

// Fixed weighted node set realizing sigma via the annulus reduction
//   \int_S h dsigma = (1/ln 2) \int_{1<=gauge(x)<2} h(delta_{1/gauge(x)} x)
//                     gauge(x)^{-Q} dx.
struct SphereRule {
    std::vector<SphereNode> nodes;
    std::vector<std::size_t> batchOffsets;  // batches partition nodes in order
    int batches = 32;
    double total = 0.0;     // sigma(S) estimate (= integral of 1)
    double totalErr = 0.0;
    IntegralValue integrate(const std::function<double(const SphereNode&)>& h) const;
    double horizMoment(double power) const;       // \int_S ||z'||^q dsigma
    double horizFirstMoment(double power) const;  // \int_S |z'_1|^q dsigma
};

SphereRule buildSphereRule(const CarnotGroup& g, const HomogeneousGauge& ng,
                           std::size_t samples, std::uint64_t seed);

IntegralValue sphereIntegral(const GroupFn& h, const CarnotGroup& g,
                             const HomogeneousGauge& ng, const QuadratureSpec& spec);

// Cached per-(gauge, seed) bundle: ball volume (1e7 indicator samples), the
// sphere rule (2e5 annulus samples) and derived constants.
struct GaugeConstants {
    double cb = 0.0;
    double cbErr = 0.0;
    std::uint64_t seed = 0;
    std::size_t cbSamples = 0;
    int q = 0;
    double qcb = 0.0;
    SphereRule sphere;
};

std::shared_ptr<const GaugeConstants> gaugeConstants(const CarnotGroup& g,
                                                     const HomogeneousGauge& ng,
                                                     std::uint64_t seed);

}  // namespace subfrac
