#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <cstdlib>
#include <functional>

#include "subfrac/checks.hpp"
#include "subfrac/quadrature.hpp"

using namespace subfrac;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("region integrals on boxes") {
    const CarnotGroup r2 = CarnotGroup::euclidean(2);
    const HomogeneousGauge ng = HomogeneousGauge::make(GaugeKind::euclidean, r2);
    QuadratureSpec spec;
    spec.samples = 100000;

    Box unit;
    unit.dim = 2;
    unit.lo = {0.0, 0.0};
    unit.hi = {1.0, 1.0};
    const IntegralValue one = regionIntegral([](const Coords&) { return 1.0; }, r2, ng,
                                             Region::makeBox(unit), spec);
    CHECK(one.value == doctest::Approx(1.0));
    CHECK(one.err == 0.0);

    const CarnotGroup r1 = CarnotGroup::euclidean(1);
    const HomogeneousGauge ng1 = HomogeneousGauge::make(GaugeKind::euclidean, r1);
    Box seg;
    seg.dim = 1;
    seg.lo = {0.0};
    seg.hi = {1.0};
    const IntegralValue lin = regionIntegral([](const Coords& x) { return x[0]; }, r1,
                                             ng1, Region::makeBox(seg), spec);
    CHECK(std::fabs(lin.value - 0.5) <= 3.0 * lin.err + 1e-6);

    Box wide;
    wide.dim = 1;
    wide.lo = {-8.0};
    wide.hi = {8.0};
    const IntegralValue gauss = regionIntegral(
        [](const Coords& x) { return std::exp(-x[0] * x[0]); }, r1, ng1,
        Region::makeBox(wide), spec);
    CHECK(std::fabs(gauss.value - std::sqrt(M_PI)) <= 3.0 * gauss.err + 1e-6);

    // grid method on the same integrand
    QuadratureSpec gridSpec = spec;
    gridSpec.method = QuadratureSpec::Method::grid;
    const IntegralValue gauss2 = regionIntegral(
        [](const Coords& x) { return std::exp(-x[0] * x[0]); }, r1, ng1,
        Region::makeBox(wide), gridSpec);
    CHECK(gauss2.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-4));
}

TEST_CASE("region integral error paths") {
    const CarnotGroup r1 = CarnotGroup::euclidean(1);
    const HomogeneousGauge ng = HomogeneousGauge::make(GaugeKind::euclidean, r1);
    QuadratureSpec spec;
    spec.samples = 1000;
    CHECK_THROWS_AS(regionIntegral([](const Coords&) { return 1.0; }, r1, ng,
                                   Region::ball(std::numeric_limits<double>::infinity()),
                                   spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(regionIntegral(
                        [](const Coords& x) {
                            return x[0] < 0.3 ? std::numeric_limits<double>::quiet_NaN()
                                              : 1.0;
                        },
                        r1, ng, Region::ball(1.0), spec),
                    std::runtime_error);
    QuadratureSpec bad;
    bad.samples = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.samples = 10;
    bad.r_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ball volumes") {
    QuadratureSpec spec;
    spec.samples = 1000000;

    const CarnotGroup r1 = CarnotGroup::euclidean(1);
    const HomogeneousGauge ng1 = HomogeneousGauge::make(GaugeKind::euclidean, r1);
    const IntegralValue b1 = ballVolume(r1, ng1, spec);
    CHECK(b1.value == doctest::Approx(2.0));
    CHECK(b1.err <= 1e-12);

    const CarnotGroup r2 = CarnotGroup::euclidean(2);
    const HomogeneousGauge ng2 = HomogeneousGauge::make(GaugeKind::euclidean, r2);
    const IntegralValue b2 = ballVolume(r2, ng2, spec);
    CHECK(std::fabs(b2.value - M_PI) <= 3.0 * b2.err + 1e-4);

    // Koranyi ball: t-slab profile gives |B| = pi \int_0^1 rho sqrt(1-rho^4) drho
    const CarnotGroup h1 = CarnotGroup::heisenberg();
    const HomogeneousGauge ngk = HomogeneousGauge::make(GaugeKind::koranyi, h1);
    const IntegralValue bk = ballVolume(h1, ngk, spec);
    const double oracle =
        M_PI * simpson([](double r) { return r * std::sqrt(1.0 - r * r * r * r); }, 0.0,
                       1.0, 20000);
    CHECK(std::fabs(bk.value - oracle) <= 3.0 * bk.err + 2e-4);
}

TEST_CASE("radial reduction") {
    QuadratureSpec spec;
    spec.samples = 400000;
    const CarnotGroup r2 = CarnotGroup::euclidean(2);
    const HomogeneousGauge ng = HomogeneousGauge::make(GaugeKind::euclidean, r2);
    const double cb = ballVolume(r2, ng, spec).value;

    // f == 1 on (0,R): C_b R^Q
    const IntegralValue full =
        radialIntegral([](double) { return 1.0; }, 0.0, 1.5, r2, ng, spec);
    CHECK(full.value == doctest::Approx(cb * 1.5 * 1.5).epsilon(1e-6));

    // f = r^{-Q-1} on (1, inf): Q C_b
    const int q = r2.homogeneousDim();
    const IntegralValue tail = radialIntegral(
        [q](double r) { return std::pow(r, -q - 1.0); }, 1.0,
        std::numeric_limits<double>::infinity(), r2, ng, spec, q + 1.0);
    CHECK(tail.value == doctest::Approx(q * cb).epsilon(1e-4));

    // infinite tail without metadata is rejected
    CHECK_THROWS_AS(radialIntegral([](double) { return 1.0; }, 1.0,
                                   std::numeric_limits<double>::infinity(), r2, ng,
                                   spec),
                    std::invalid_argument);

    // radial vs direct region integral over an annulus
    auto profile = [](double r) { return std::exp(-r * r); };
    const IntegralValue viaRadial = radialIntegral(profile, 0.5, 1.5, r2, ng, spec);
    const IntegralValue viaRegion =
        regionIntegral([&](const Coords& x) { return profile(ng(x)); }, r2, ng,
                       Region::annulus(0.5, 1.5), spec);
    CHECK(std::fabs(viaRadial.value - viaRegion.value) <=
          3.0 * (viaRadial.err + viaRegion.err) + 1e-6);
}

TEST_CASE("sphere integrals via the annulus reduction") {
    QuadratureSpec spec;
    spec.samples = 200000;

    const CarnotGroup r2 = CarnotGroup::euclidean(2);
    const HomogeneousGauge ng2 = HomogeneousGauge::make(GaugeKind::euclidean, r2);
    const IntegralValue circ =
        sphereIntegral([](const Coords&) { return 1.0; }, r2, ng2, spec);
    CHECK(std::fabs(circ.value - 2.0 * M_PI) <= 3.0 * circ.err + 1e-3);

    const CarnotGroup h1 = CarnotGroup::heisenberg();
    const HomogeneousGauge ngk = HomogeneousGauge::make(GaugeKind::koranyi, h1);
    const IntegralValue sk =
        sphereIntegral([](const Coords&) { return 1.0; }, h1, ngk, spec);
    const IntegralValue cbk = ballVolume(h1, ngk, spec);
    CHECK(std::fabs(sk.value - 4.0 * cbk.value) <= 3.0 * (sk.err + 4.0 * cbk.err));

    // horizontal moments: |z1'|^2 integrates to half of ||z'||^2 by symmetry
    const SphereRule rule = buildSphereRule(h1, ngk, 200000, 5);
    CHECK(rule.horizFirstMoment(2.0) ==
          doctest::Approx(rule.horizMoment(2.0) / 2.0).epsilon(0.01));
    // and the norm moment is strictly below sigma(S); the sphere has points
    // with small horizontal part
    CHECK(rule.horizMoment(2.0) < 0.9 * rule.total);
}

TEST_CASE("determinism across worker counts") {
    const CarnotGroup r2 = CarnotGroup::euclidean(2);
    const HomogeneousGauge ng = HomogeneousGauge::make(GaugeKind::euclidean, r2);
    QuadratureSpec spec;
    spec.samples = 100000;
    spec.seed = 77;
    auto f = [&](const Coords& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); };

    setenv("SUBFRAC_THREADS", "1", 1);
    const IntegralValue a =
        regionIntegral(f, r2, ng, Region::makeBox(gaugeBallBox(ng, 2.0)), spec);
    setenv("SUBFRAC_THREADS", "7", 1);
    const IntegralValue b =
        regionIntegral(f, r2, ng, Region::makeBox(gaugeBallBox(ng, 2.0)), spec);
    unsetenv("SUBFRAC_THREADS");
    CHECK(a.value == b.value);  // bit-identical
    CHECK(a.err == b.err);

    QuadratureSpec other = spec;
    other.seed = 78;
    const IntegralValue c =
        regionIntegral(f, r2, ng, Region::makeBox(gaugeBallBox(ng, 2.0)), other);
    CHECK(a.value != c.value);
}

TEST_CASE("measure suite passes on both shipped geometries") {
    QuadratureSpec spec;
    spec.samples = 200000;
    {
        const CarnotGroup r2 = CarnotGroup::euclidean(2);
        const HomogeneousGauge ng = HomogeneousGauge::make(GaugeKind::euclidean, r2);
        for (const Verdict& v : measureSuite(r2, ng, spec)) {
            INFO(v.name << " lhs=" << v.lhs << " rhs=" << v.rhs);
            CHECK(v.status != VerdictStatus::fail);
        }
    }
    {
        const CarnotGroup h1 = CarnotGroup::heisenberg();
        const HomogeneousGauge ng = HomogeneousGauge::make(GaugeKind::koranyi, h1);
        for (const Verdict& v : measureSuite(h1, ng, spec)) {
            INFO(v.name << " lhs=" << v.lhs << " rhs=" << v.rhs);
            CHECK(v.status != VerdictStatus::fail);
        }
    }
}

TEST_CASE("sobol points fill the unit cube uniformly") {
    SobolSequence sobol(6);
    double pt[6];
    double mean[6] = {0, 0, 0, 0, 0, 0};
    const int n = 4096;
    for (int i = 0; i < n; ++i) {
        sobol.point(i, pt);
        for (int d = 0; d < 6; ++d) {
            CHECK(pt[d] >= 0.0);
            CHECK(pt[d] < 1.0);
            mean[d] += pt[d];
        }
    }
    for (int d = 0; d < 6; ++d)
        CHECK(mean[d] / n == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS_AS(SobolSequence(7), std::invalid_argument);
}
