#include "subfrac/checks.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "subfrac/fields.hpp"

namespace subfrac {

namespace {

Verdict deviationVerdict(std::string name, double dev, double tol) {
    Verdict v;
    v.name = std::move(name);
    v.lhs = dev;
    v.rhs = tol;
    v.errorBar = 0.0;
    v.status = dev <= tol ? VerdictStatus::pass : VerdictStatus::fail;
    return v;
}

Verdict agreeVerdict(std::string name, double a, double b, double sigma,
                     std::string note = "") {
    // |a-b| <= 3 sigma, with a tiny absolute floor for exact quadratures
    const double bar = 3.0 * sigma + 1e-12 * std::max(std::fabs(a), std::fabs(b));
    Verdict v;
    v.name = std::move(name);
    v.lhs = a;
    v.rhs = b;
    v.errorBar = bar;
    v.note = std::move(note);
    v.status = std::fabs(a - b) <= bar ? VerdictStatus::pass : VerdictStatus::fail;
    return v;
}

}  // namespace

std::vector<Verdict> geometrySuite(const CarnotGroup& g, HomogeneousGauge& ng,
                                   std::size_t samples, std::uint64_t seed, double tol) {
    std::vector<Verdict> out;
    const GroupLawReport laws = validateGroupLaws(g, samples, seed);
    out.push_back(deviationVerdict("group.identity", laws.identityDev, tol));
    out.push_back(deviationVerdict("group.inverse", laws.inverseDev, tol));
    out.push_back(deviationVerdict("group.associativity", laws.associativityDev, tol));
    out.push_back(deviationVerdict("group.dilation_automorphism", laws.dilationDev, tol));
    const GaugeAxiomReport ax = validateGaugeAxioms(ng, samples, seed + 1, tol);
    out.push_back(deviationVerdict("gauge.zero_at_identity", ax.zeroAtIdentity, tol));
    out.push_back(deviationVerdict("gauge.symmetry", ax.symmetryDev, tol));
    out.push_back(deviationVerdict("gauge.homogeneity", ax.homogeneityDev, tol));
    out.push_back(deviationVerdict("gauge.rotation_invariance", ax.rotationDev, tol));
    out.push_back(deviationVerdict("gauge.triangle", ax.triangleDev, tol));
    return out;
}

std::vector<Verdict> measureSuite(const CarnotGroup& g, const HomogeneousGauge& ng,
                                  const QuadratureSpec& spec) {
    std::vector<Verdict> out;
    const int n = g.dim(), q = g.homogeneousDim();
    const ScalarField f = makeBump(ng, 1.0);
    const IntegralValue base =
        regionIntegral([&](const Coords& x) { return f(x); }, g, ng,
                       Region::makeBox(gaugeBallBox(ng, 1.0)), spec);

    std::mt19937_64 rng(mixSeed(spec.seed, 0x6EE7));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        Coords y{0.0, 0.0, 0.0};
        for (int j = 0; j < n; ++j) y[j] = dist(rng);
        const double ry = ng(y);
        const Box big = gaugeBallBox(ng, 1.0 + ry + 0.1);
        const IntegralValue left =
            regionIntegral([&](const Coords& x) { return f(g.compose(y, x)); }, g, ng,
                           Region::makeBox(big), spec);
        const IntegralValue right =
            regionIntegral([&](const Coords& x) { return f(g.compose(x, y)); }, g, ng,
                           Region::makeBox(big), spec);
        out.push_back(agreeVerdict("haar.left_invariance." + std::to_string(trial),
                                   left.value, base.value, left.err + base.err));
        out.push_back(agreeVerdict("haar.right_invariance." + std::to_string(trial),
                                   right.value, base.value, right.err + base.err));
    }
    for (double lambda : {0.5, 2.0}) {
        const Box box = gaugeBallBox(ng, 1.0 / lambda);
        const IntegralValue scaledInt = regionIntegral(
            [&](const Coords& x) { return f(g.dilate(lambda, x)); }, g, ng,
            Region::makeBox(box), spec);
        const double expect = std::pow(lambda, -static_cast<double>(q)) * base.value;
        out.push_back(agreeVerdict("haar.dilation_scaling.lambda=" + std::to_string(lambda),
                                   scaledInt.value, expect,
                                   scaledInt.err +
                                       std::pow(lambda, -static_cast<double>(q)) * base.err));
    }

    const IntegralValue cb = ballVolume(g, ng, spec);
    for (double r : {0.5, 1.0, 2.0}) {
        const IntegralValue vol = regionIntegral([](const Coords&) { return 1.0; }, g, ng,
                                                 Region::ball(r), spec);
        const double expect = std::pow(r, static_cast<double>(q)) * cb.value;
        out.push_back(agreeVerdict("measure.ball_scaling.r=" + std::to_string(r),
                                   vol.value, expect,
                                   vol.err + std::pow(r, static_cast<double>(q)) * cb.err));
    }

    const IntegralValue sigma =
        sphereIntegral([](const Coords&) { return 1.0; }, g, ng, spec);
    out.push_back(agreeVerdict("measure.sphere_total", sigma.value, q * cb.value,
                               sigma.err + q * cb.err, "sigma(S) = Q C_b"));

    // radial vs direct region integral over an annulus
    auto profile = [](double r) { return std::exp(-r * r); };
    const IntegralValue viaRadial = radialIntegral(profile, 0.5, 1.5, g, ng, spec);
    const IntegralValue viaRegion =
        regionIntegral([&](const Coords& x) { return profile(ng(x)); }, g, ng,
                       Region::annulus(0.5, 1.5), spec);
    out.push_back(agreeVerdict("measure.radial_vs_region", viaRadial.value,
                               viaRegion.value, viaRadial.err + viaRegion.err));
    return out;
}

std::vector<Verdict> orliczSuite(const OrliczFunction& phi, std::size_t pairs,
                                 std::uint64_t seed) {
    std::vector<Verdict> out;
    const GrowthIndices& idx = phi.indices();
    std::mt19937_64 rng(seed);
    // Arguments kept inside the index-estimation span so the sampled
    // inequalities hold for the estimated indices as well.
    std::uniform_real_distribution<double> logT(std::log(1e-4), std::log(1e4));
    std::uniform_real_distribution<double> logS(std::log(1e-2), std::log(1e2));

    double phi1Viol = 0.0, phi2Viol = 0.0, splitC = 0.0, roundTrip = 0.0, young = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const double t = std::exp(logT(rng));
        const double sf = std::exp(logS(rng));
        const double pt = phi(t);
        // (phi1)
        const double lo = std::min(std::pow(sf, idx.pMinus), std::pow(sf, idx.pPlus));
        const double hi = std::max(std::pow(sf, idx.pMinus), std::pow(sf, idx.pPlus));
        const double pst = phi(sf * t);
        phi1Viol = std::max(phi1Viol, (lo * pt - pst) / std::max(pst, 1e-300));
        phi1Viol = std::max(phi1Viol, (pst - hi * pt) / std::max(pst, 1e-300));
        // (phi2) on pairs drawn from the same range
        const double t2 = std::exp(logT(rng));
        const double psum = phi(t + t2);
        const double bound = std::exp2(idx.pPlus) / 2.0 * (pt + phi(t2));
        phi2Viol = std::max(phi2Viol, (psum - bound) / std::max(bound, 1e-300));
        // improved splitting constant (delta = 1): track the C_delta the data needs
        const double needed = (psum - std::exp2(idx.pPlus) * phi(t2)) / pt;
        splitC = std::max(splitC, needed);
        // inverse round trip
        const double inv = phi.inverse(pt);
        roundTrip = std::max(roundTrip, std::fabs(inv - t) / t);
        // Young's inequality st <= phi(t) + phi*(s)
        const double sv = std::exp(logS(rng));
        young = std::max(young,
                         (sv * t - (pt + phi.conjugate(sv))) /
                             std::max(1.0, sv * t));
    }
    out.push_back(deviationVerdict("orlicz.phi1", phi1Viol, 1e-10));
    out.push_back(deviationVerdict("orlicz.phi2", phi2Viol, 1e-10));
    out.push_back(deviationVerdict("orlicz.inverse_round_trip", roundTrip, 1e-12));
    out.push_back(deviationVerdict("orlicz.young", young, 1e-9));

    Verdict d2;
    d2.name = "orlicz.delta2_bound";
    d2.lhs = idx.delta2;
    d2.rhs = std::exp2(idx.pPlus);
    d2.errorBar = 1e-9 * d2.rhs;
    d2.status = (idx.delta2 > 2.0 && idx.delta2 <= d2.rhs * (1.0 + 1e-9))
                    ? VerdictStatus::pass
                    : VerdictStatus::fail;
    d2.note = "2 < C <= 2^{p+}";
    out.push_back(d2);

    Verdict lc;
    lc.name = "orlicz.splitting_constant_exists";
    lc.lhs = splitC;
    lc.rhs = std::numeric_limits<double>::infinity();
    lc.status = std::isfinite(splitC) ? VerdictStatus::pass : VerdictStatus::fail;
    lc.note = "found C_delta for delta = 1";
    out.push_back(lc);
    return out;
}

}  // namespace subfrac
