#include "subfrac/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace subfrac {

const char* statusName(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::pass: return "pass";
        case VerdictStatus::fail: return "fail";
        default: return "inconclusive";
    }
}

Verdict checkUpperBound(std::string name, double lhs, double rhs, double bar,
                        std::string note) {
    Verdict v;
    v.name = std::move(name);
    v.lhs = lhs;
    v.rhs = rhs;
    v.errorBar = bar;
    v.note = std::move(note);
    if (std::fabs(lhs - rhs) <= bar)
        v.status = VerdictStatus::inconclusive;
    else
        v.status = lhs <= rhs ? VerdictStatus::pass : VerdictStatus::fail;
    return v;
}

Verdict checkInBand(std::string name, double value, double lo, double hi, double bar,
                    std::string note) {
    const Verdict lower = checkUpperBound(name + ".lower", lo, value, bar);
    const Verdict upper = checkUpperBound(name + ".upper", value, hi, bar);
    Verdict v;
    v.name = std::move(name);
    v.lhs = value;
    v.rhs = 0.5 * (lo + hi);
    v.errorBar = bar;
    v.note = note.empty()
                 ? "band [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"
                 : std::move(note);
    if (lower.status == VerdictStatus::fail || upper.status == VerdictStatus::fail)
        v.status = VerdictStatus::fail;
    else if (lower.status == VerdictStatus::inconclusive ||
             upper.status == VerdictStatus::inconclusive)
        v.status = VerdictStatus::inconclusive;
    else
        v.status = VerdictStatus::pass;
    return v;
}

Verdict checkEquality(std::string name, double value, double target, double bar,
                      std::string note) {
    Verdict v;
    v.name = std::move(name);
    v.lhs = value;
    v.rhs = target;
    v.errorBar = bar;
    v.note = std::move(note);
    v.status = std::fabs(value - target) <= bar ? VerdictStatus::pass
                                                : VerdictStatus::fail;
    return v;
}

ExtrapolationResult extrapolateLimit(const std::vector<std::array<double, 3>>& points,
                                     SweepRegime regime) {
    if (points.size() < 3)
        throw std::invalid_argument("extrapolate_limit: need at least 3 points");
    const std::size_t n = points.size();
    double xmin = 1e300, xmax = -1e300;
    std::vector<double> xs(n), ys(n), ws(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = points[i][0];
        xs[i] = regime == SweepRegime::bbm_s_to_1 ? 1.0 - s : s;
        ys[i] = points[i][1];
        const double e = points[i][2];
        ws[i] = 1.0 / std::max(e * e, 1e-30);
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
    }
    if (!(xmax - xmin > 1e-12))
        throw std::invalid_argument("extrapolate_limit: degenerate abscissae");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += ws[i];
        swx += ws[i] * xs[i];
        swy += ws[i] * ys[i];
        swxx += ws[i] * xs[i] * xs[i];
        swxy += ws[i] * xs[i] * ys[i];
    }
    const double det = sw * swxx - swx * swx;
    const double intercept = (swy * swxx - swx * swxy) / det;
    const double slope = (sw * swxy - swx * swy) / det;
    double chi2 = 0.0, rms = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        chi2 += ws[i] * r * r;
        rms += r * r;
    }
    rms = std::sqrt(rms / n);
    // intercept variance from the WLS covariance, inflated by chi2/dof
    double varA = swxx / det;
    if (n > 2) varA *= std::max(1.0, chi2 / (n - 2));
    const double residual = std::max(rms, std::sqrt(std::max(varA, 0.0)));
    if (!std::isfinite(intercept) || !std::isfinite(residual))
        throw std::runtime_error("extrapolate_limit: non-convergent");
    return ExtrapolationResult{intercept, residual};
}

namespace {

std::vector<SweepPoint> sweepPoints(const ScalarField& u, const OrliczFunction& phi,
                                    const CarnotGroup& g, const HomogeneousGauge& ng,
                                    std::vector<double> grid, SweepRegime regime,
                                    const QuadratureSpec& spec) {
    std::sort(grid.begin(), grid.end());
    std::vector<SweepPoint> pts;
    pts.reserve(grid.size());
    for (double s : grid) {
        SweepPoint p;
        p.s = s;
        p.parts = gagliardoEnergy(u, phi, s, g, ng, spec);
        p.raw = p.parts.total;
        const double w = regime == SweepRegime::bbm_s_to_1 ? 1.0 - s : s;
        p.scaled = w * p.raw;
        p.err = w * p.parts.err;
        pts.push_back(p);
    }
    return pts;
}

ExtrapolationResult extrapolate(const std::vector<SweepPoint>& pts, SweepRegime regime) {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(pts.size());
    for (const auto& p : pts) rows.push_back({p.s, p.scaled, p.err});
    return extrapolateLimit(rows, regime);
}

double maxErr(const std::vector<SweepPoint>& pts) {
    double m = 0.0;
    for (const auto& p : pts) m = std::max(m, p.err);
    return m;
}

}  // namespace

SweepResult bbmSweep(const ScalarField& u, const OrliczFunction& phi,
                     const CarnotGroup& g, const HomogeneousGauge& ng,
                     const std::vector<double>& sGrid, const QuadratureSpec& spec) {
    if (u.smoothness() == Smoothness::measurable)
        throw std::invalid_argument("bbm_sweep: needs a C^2-class field");
    for (double s : sGrid)
        if (!(s > 0.5 && s < 1.0))
            throw std::invalid_argument("bbm_sweep: s grid must lie in (0.5, 1)");

    SweepResult res;
    res.regime = SweepRegime::bbm_s_to_1;
    res.points = sweepPoints(u, phi, g, ng, sGrid, res.regime, spec);

    const bool zero = u.supportRadius() <= 0.0;
    if (zero) {
        res.extrapolated = 0.0;
        res.residual = 0.0;
        res.targets["phi_tilde"] = 0.0;
        res.targets["directional"] = 0.0;
        res.verdicts.push_back(checkEquality("bbm.zero_field", 0.0, 0.0, 1e-15));
        return res;
    }

    const auto fit = extrapolate(res.points, res.regime);
    res.extrapolated = fit.limit;
    res.residual = fit.residual;

    auto gc = gaugeConstants(g, ng, spec.seed);
    auto kernels = limitKernels(phi, g, ng, spec.seed);
    const int n = g.dim(), m = g.horizontalDim();
    const Box gradBox = gaugeBallBox(ng, u.supportRadius() + kGradStep);
    auto gradNorm = [&](const double* xraw) {
        Coords x{0.0, 0.0, 0.0};
        for (int j = 0; j < n; ++j) x[j] = xraw[j];
        const auto grad = horizontalGradient(u, g, x);
        double gn = 0.0;
        for (int j = 0; j < m; ++j) gn += grad[j] * grad[j];
        return std::sqrt(gn);
    };
    const BatchedValue targetZ = qmcIntegrate(
        gradBox, [&](const double* x) { return kernels->zFormLimit(gradNorm(x)); },
        spec.samples, mixSeed(spec.seed, 0xB1));
    const BatchedValue targetDir = qmcIntegrate(
        gradBox, [&](const double* x) { return kernels->directionalLimit(gradNorm(x)); },
        spec.samples, mixSeed(spec.seed, 0xB1));
    const IntegralValue localE = localEnergy(u, phi, g, ng, spec);
    const IntegralValue phiU = phiEnergy(u, phi, g, ng, spec);

    res.targets["phi_tilde"] = targetZ.value;
    res.targets["directional"] = targetDir.value;
    res.targets["local_energy"] = localE.value;
    const double denomZ = std::max(std::fabs(targetZ.value), 1e-300);
    const double denomD = std::max(std::fabs(targetDir.value), 1e-300);
    res.targets["rel_err_phi_tilde"] = (res.extrapolated - targetZ.value) / denomZ;
    res.targets["rel_err_directional"] = (res.extrapolated - targetDir.value) / denomD;

    // interpolation upper bound at each grid point
    const GrowthIndices& idx = phi.indices();
    for (const auto& p : res.points) {
        const double rhs = gc->qcb / idx.pMinus *
                           (localE.value / (1.0 - p.s) + idx.delta2 * phiU.value / p.s);
        const double bar = 3.0 * (p.parts.err +
                                  gc->qcb / idx.pMinus *
                                      (localE.err / (1.0 - p.s) +
                                       idx.delta2 * phiU.err / p.s));
        res.verdicts.push_back(checkUpperBound(
            "interpolation_bound.s=" + std::to_string(p.s), p.raw, rhs, bar));
    }

    // Sandwich band bracketing both limit readings: directional-moment lower
    // constant, ||z'||-moment upper constant.
    const double cLo = gc->sphere.horizFirstMoment(idx.pPlus) / idx.pPlus;
    const double cHi = gc->sphere.horizMoment(idx.pMinus) / idx.pMinus;
    const double bandBar = 3.0 * (res.residual + cHi * localE.err);
    res.verdicts.push_back(checkInBand("bbm.limit_band", res.extrapolated,
                                       cLo * localE.value, cHi * localE.value, bandBar,
                                       "limit within sphere-moment band around local energy"));
    return res;
}

SweepResult msSweep(const ScalarField& u, const OrliczFunction& phi,
                    const CarnotGroup& g, const HomogeneousGauge& ng,
                    const std::vector<double>& sGrid, const QuadratureSpec& spec) {
    if (!std::isfinite(u.supportRadius()))
        throw std::invalid_argument("ms_sweep: field needs finite support");
    for (double s : sGrid)
        if (!(s > 0.0 && s < 0.3))
            throw std::invalid_argument("ms_sweep: s grid must lie in (0, 0.3)");

    SweepResult res;
    res.regime = SweepRegime::ms_s_to_0;
    res.points = sweepPoints(u, phi, g, ng, sGrid, res.regime, spec);

    if (u.supportRadius() <= 0.0) {
        res.extrapolated = 0.0;
        res.residual = 0.0;
        res.targets["ms_lower"] = 0.0;
        res.targets["ms_upper"] = 0.0;
        res.verdicts.push_back(checkEquality("ms.zero_field", 0.0, 0.0, 1e-15));
        return res;
    }

    const auto fit = extrapolate(res.points, res.regime);
    res.extrapolated = fit.limit;
    res.residual = fit.residual;

    auto gc = gaugeConstants(g, ng, spec.seed);
    const GrowthIndices& idx = phi.indices();
    const IntegralValue phiU = phiEnergy(u, phi, g, ng, spec);

    const double lo12 = 4.0 / idx.delta2 * gc->qcb / idx.pPlus * phiU.value;
    const double hi12 = idx.delta2 * gc->qcb / idx.pMinus * phiU.value;
    res.targets["ms_lower"] = lo12;
    res.targets["ms_upper"] = hi12;
    const double bar =
        3.0 * (res.residual + maxErr(res.points) +
               idx.delta2 * gc->qcb / idx.pMinus * phiU.err +
               std::fabs(res.extrapolated) * gc->cbErr / gc->cb);
    res.verdicts.push_back(checkInBand("ms.liminf_limsup_band", res.extrapolated, lo12,
                                       hi12, bar, "4/C QCb/p+ <= lim <= C QCb/p-"));

    Verdict mk;
    const bool mHolds = minkowskiHolds(phi, g, ng, spec, &mk);
    res.verdicts.push_back(mk);
    const double lo13 = 2.0 * gc->qcb / idx.pPlus * phiU.value;
    const double hi13 = 2.0 * gc->qcb / idx.pMinus * phiU.value;
    res.targets["ms_minkowski_lower"] = lo13;
    res.targets["ms_minkowski_upper"] = hi13;
    if (mHolds) {
        res.verdicts.push_back(checkInBand("ms.minkowski_band", res.extrapolated, lo13,
                                           hi13, bar, "2 QCb/p+ <= lim <= 2 QCb/p-"));
    }
    if (phi.family() == OrliczFamily::power) {
        const double exact = 2.0 * gc->qcb / phi.p() * phiU.value;
        res.targets["ms_exact"] = exact;
        res.targets["rel_err_ms_exact"] =
            (res.extrapolated - exact) / std::max(std::fabs(exact), 1e-300);
        res.verdicts.push_back(checkEquality("ms.power_exact", res.extrapolated, exact,
                                             bar + 0.05 * std::fabs(exact),
                                             "lim = 2 QCb/p Phi_phi(u)"));
    }
    return res;
}

bool minkowskiHolds(const OrliczFunction& phi, const CarnotGroup& g,
                    const HomogeneousGauge& ng, const QuadratureSpec& spec,
                    Verdict* detail) {
    // Shared-node modulars of |u|, |v| and |u|+|v| for built-in pairs; the
    // power family satisfies the discrete Minkowski identity exactly.
    QuadratureSpec local = spec;
    local.samples = std::min<std::size_t>(spec.samples, 100000);
    const std::vector<std::pair<ScalarField, ScalarField>> pairs = {
        {makeBump(ng, 1.0), makeGauss(g, ng, 1.0)},
        {makeBump(ng, 2.0), makeIndicator(ng, 1.0)},
        {makeGauss(g, ng, 2.0).scaled(0.5), makeBump(ng, 1.0).scaled(2.0)},
        {makeIndicator(ng, 2.0).scaled(4.0), makeIndicator(ng, 0.5)},
        // equal and rescaled pairs probe the measure != 1 regime where
        // non-homogeneous families break the inequality
        {makeIndicator(ng, 1.0), makeIndicator(ng, 1.0)},
        {makeBump(ng, 1.5).scaled(2.0), makeBump(ng, 1.5).scaled(2.0)},
        {makeIndicator(ng, 1.0).scaled(3.0), makeIndicator(ng, 1.0).scaled(0.5)},
    };
    double worst = 0.0;
    bool holds = true;
    const int n = g.dim();
    for (const auto& [ua, vb] : pairs) {
        const double radius = std::max(ua.supportRadius(), vb.supportRadius());
        const Box box = gaugeBallBox(ng, radius);
        auto modular = [&](auto&& f) {
            return qmcIntegrate(box, f, local.samples, mixSeed(local.seed, 0x314159))
                .value;
        };
        Coords c{0.0, 0.0, 0.0};
        auto at = [&](const double* x) {
            Coords p = c;
            for (int j = 0; j < n; ++j) p[j] = x[j];
            return p;
        };
        const double msum = modular([&](const double* x) {
            const double a = std::fabs(ua(at(x))) + std::fabs(vb(at(x)));
            return a > 0.0 ? phi(a) : 0.0;
        });
        const double mu = modular([&](const double* x) {
            const double a = std::fabs(ua(at(x)));
            return a > 0.0 ? phi(a) : 0.0;
        });
        const double mv = modular([&](const double* x) {
            const double a = std::fabs(vb(at(x)));
            return a > 0.0 ? phi(a) : 0.0;
        });
        const double lhs = phi.inverse(msum);
        const double rhs = phi.inverse(mu) + phi.inverse(mv);
        const double margin = (lhs - rhs) / std::max(rhs, 1e-300);
        worst = std::max(worst, margin);
        if (margin > 1e-9) holds = false;
    }
    if (detail) {
        detail->name = "minkowski_property_report";
        detail->lhs = worst;
        detail->rhs = 0.0;
        detail->errorBar = 1e-9;
        detail->status = VerdictStatus::pass;  // a report, not a paper claim
        detail->note = holds ? "(M) holds on sampled pairs"
                             : "(M) fails (worst relative excess " +
                                   std::to_string(worst) +
                                   "); Minkowski band not asserted";
    }
    return holds;
}

std::vector<Verdict> verifyInequalities(const ScalarField& u, const OrliczFunction& phi,
                                        const CarnotGroup& g, const HomogeneousGauge& ng,
                                        const std::vector<double>& sList,
                                        const QuadratureSpec& spec) {
    std::vector<Verdict> out;
    auto gc = gaugeConstants(g, ng, spec.seed);
    const GrowthIndices& idx = phi.indices();
    const IntegralValue phiU = phiEnergy(u, phi, g, ng, spec);
    const IntegralValue localE = localEnergy(u, phi, g, ng, spec);

    // interpolation bound per s
    for (double s : sList) {
        const EnergyBreakdown e = gagliardoEnergy(u, phi, s, g, ng, spec);
        const double rhs = gc->qcb / idx.pMinus *
                           (localE.value / (1.0 - s) + idx.delta2 * phiU.value / s);
        const double bar =
            3.0 * (e.err + gc->qcb / idx.pMinus *
                               (localE.err / (1.0 - s) + idx.delta2 * phiU.err / s));
        out.push_back(checkUpperBound("interpolation_bound.s=" + std::to_string(s),
                                      e.total, rhs, bar));
    }

    // mollification contraction at s = 0.5; the mollified field costs a
    // node-set factor per evaluation, so these 3-sigma checks run on a
    // lighter quadrature than the quantitative sweeps
    {
        const double s = 0.5;
        QuadratureSpec light = spec;
        light.samples = std::max<std::size_t>(2000, spec.samples / 8);
        light.r_min = std::max(spec.r_min, 1e-2);
        const EnergyBreakdown base = gagliardoEnergy(u, phi, s, g, ng, light);
        for (double eps : {0.5, 0.25}) {
            const ScalarField ue = mollify(u, g, ng, eps, light);
            const EnergyBreakdown smoothed = gagliardoEnergy(ue, phi, s, g, ng, light);
            out.push_back(checkUpperBound(
                "mollification_contraction.eps=" + std::to_string(eps), smoothed.total,
                base.total, 3.0 * (smoothed.err + base.err)));
        }
        // truncation bound
        for (int k : {2, 4}) {
            const ScalarField uk = truncate(u, g, ng, k);
            const EnergyBreakdown trunc = gagliardoEnergy(uk, phi, s, g, ng, light);
            const double rhs =
                idx.delta2 / 2.0 *
                (base.total +
                 std::pow(2.0 / k, idx.pMinus) * gc->qcb / ((1.0 - s) * idx.pPlus) *
                     phiU.value +
                 std::exp2(idx.pPlus) * gc->qcb / (s * idx.pMinus) * phiU.value);
            const double bar = 3.0 * (trunc.err + idx.delta2 / 2.0 * base.err +
                                      idx.delta2 * gc->qcb * phiU.err);
            out.push_back(checkUpperBound("truncation_bound.k=" + std::to_string(k),
                                          trunc.total, rhs, bar));
        }
    }

    // translation estimate on 20 random small h at s = 0.3
    {
        const double s = 0.3;
        const EnergyBreakdown e = gagliardoEnergy(u, phi, s, g, ng, spec);
        const double M = fktBoundConstant(phi, *gc, s);
        std::mt19937_64 rng(mixSeed(spec.seed, 0xF47));
        std::uniform_real_distribution<double> dist(-0.5, 0.5);
        int produced = 0;
        while (produced < 20) {
            Coords h{0.0, 0.0, 0.0};
            for (int j = 0; j < g.dim(); ++j) h[j] = dist(rng);
            const double nh = ng(h);
            if (nh >= 0.5 || nh <= 0.0) continue;
            ++produced;
            const double gap = translationGap(u, phi, g, ng, h, spec);
            const double rhs = M * std::pow(nh, s * idx.pMinus) * e.total;
            out.push_back(checkUpperBound(
                "translation_estimate.h" + std::to_string(produced), gap, rhs,
                3.0 * (M * std::pow(nh, s * idx.pMinus) * e.err + 1e-12 * rhs)));
        }
    }

    // sandwich for the limit function at t in {0.5, 1, 2}
    for (double t : {0.5, 1.0, 2.0}) {
        const PhiTildeResult pt = phiTilde(phi, g, ng, t, {}, false, nullptr, spec);
        const double bar = 3.0 * pt.residual + 1e-9 * phi(t);
        out.push_back(checkUpperBound("limit_sandwich.lower.t=" + std::to_string(t),
                                      pt.c1 * phi(t), pt.value, bar));
        out.push_back(checkUpperBound("limit_sandwich.upper.t=" + std::to_string(t),
                                      pt.value, pt.c2 * phi(t), bar));
    }

    Verdict mk;
    minkowskiHolds(phi, g, ng, spec, &mk);
    out.push_back(mk);
    return out;
}

}  // namespace subfrac
