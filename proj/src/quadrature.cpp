#include "subfrac/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "subfrac/parallel.hpp"

namespace subfrac {

namespace {

constexpr std::uint64_t kStreamRegion = 0x7E6107;
constexpr std::uint64_t kStreamBall = 0xBA11;
constexpr std::uint64_t kStreamSphere = 0x5F3E7E;

Coords coordsOf(const double* x, int n) {
    Coords c{0.0, 0.0, 0.0};
    for (int j = 0; j < n; ++j) c[j] = x[j];
    return c;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (samples < 1) throw std::invalid_argument("quad.samples must be >= 1");
    if (!(r_min > 0.0)) throw std::invalid_argument("quad.r_min must be positive");
    if (annuli < 1) throw std::invalid_argument("quad.annuli must be >= 1");
}

Region Region::makeBox(const Box& b) {
    Region r;
    r.kind = Kind::box;
    r.box = b;
    return r;
}

Region Region::ball(double radius) {
    Region r;
    r.kind = Kind::ball;
    r.b = radius;
    return r;
}

Region Region::annulus(double a, double b) {
    Region r;
    r.kind = Kind::annulus;
    r.a = a;
    r.b = b;
    return r;
}

Box gaugeBallBox(const HomogeneousGauge& ng, double r) {
    const CarnotGroup& g = ng.group();
    const Coords hw = ng.unitBallHalfwidths();
    Box box;
    box.dim = g.dim();
    for (int j = 0; j < g.dim(); ++j) {
        double scale = r;
        for (int k = 1; k < g.weight(j); ++k) scale *= r;
        box.lo[j] = -hw[j] * scale;
        box.hi[j] = hw[j] * scale;
    }
    return box;
}

IntegralValue regionIntegral(const GroupFn& f, const CarnotGroup& g,
                             const HomogeneousGauge& ng, const Region& region,
                             const QuadratureSpec& spec) {
    spec.validate();
    Box box;
    double rlo = 0.0, rhi = 0.0;
    bool clip = false;
    switch (region.kind) {
        case Region::Kind::box:
            box = region.box;
            break;
        case Region::Kind::ball:
            if (!(std::isfinite(region.b) && region.b > 0.0))
                throw std::invalid_argument("region_integral: unbounded ball");
            box = gaugeBallBox(ng, region.b);
            rhi = region.b;
            clip = true;
            break;
        case Region::Kind::annulus:
            if (!(std::isfinite(region.b) && region.b > region.a && region.a >= 0.0))
                throw std::invalid_argument("region_integral: bad annulus");
            box = gaugeBallBox(ng, region.b);
            rlo = region.a;
            rhi = region.b;
            clip = true;
            break;
    }
    if (box.dim != g.dim()) throw std::invalid_argument("region_integral: box dimension");
    for (int d = 0; d < box.dim; ++d)
        if (!(std::isfinite(box.lo[d]) && std::isfinite(box.hi[d])))
            throw std::invalid_argument("region_integral: unbounded region");

    const int n = g.dim();
    auto integrand = [&](const double* x) {
        const Coords c = coordsOf(x, n);
        if (clip) {
            const double r = ng(c);
            if (r > rhi || r < rlo) return 0.0;
        }
        const double v = f(c);
        if (!std::isfinite(v))
            throw std::runtime_error("region_integral: non-finite integrand sample");
        return v;
    };

    BatchedValue bv;
    if (spec.method == QuadratureSpec::Method::grid)
        bv = gridIntegrate(box, integrand, spec.samples);
    else
        bv = qmcIntegrate(box, integrand, spec.samples, mixSeed(spec.seed, kStreamRegion));
    return IntegralValue{bv.value, bv.err, {}};
}

IntegralValue ballVolume(const CarnotGroup& g, const HomogeneousGauge& ng,
                         const QuadratureSpec& spec) {
    spec.validate();
    static std::mutex mtx;
    static std::map<std::string, IntegralValue> cache;
    const std::string key = ng.key() + "#" + std::to_string(spec.seed) + "#" +
                            std::to_string(spec.samples);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const Box box = gaugeBallBox(ng, 1.0);
    const int n = g.dim();
    auto indicator = [&](const double* x) {
        return ng(coordsOf(x, n)) <= 1.0 ? 1.0 : 0.0;
    };
    const BatchedValue bv =
        qmcIntegrate(box, indicator, spec.samples, mixSeed(spec.seed, kStreamBall));
    IntegralValue out{bv.value, bv.err, {}};
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(key, out);
    return out;
}

IntegralValue radialIntegral(const std::function<double(double)>& profile, double a,
                             double b, const CarnotGroup& g, const HomogeneousGauge& ng,
                             const QuadratureSpec& spec,
                             std::optional<double> decayExponent) {
    if (!(a >= 0.0)) throw std::invalid_argument("radial_integral: a >= 0");
    const int q = g.homogeneousDim();
    const IntegralValue cb = ballVolume(g, ng, spec);
    const double qcb = q * cb.value;

    double tailS = 0.0, tailErr = 0.0;
    double upper = b;
    if (std::isinf(b)) {
        if (!decayExponent || !(*decayExponent > q))
            throw std::invalid_argument(
                "radial_integral: infinite tail needs a decay exponent > Q");
        const double beta = *decayExponent;
        upper = std::max(1.0, 2.0 * a) * 1e4;
        const double f1 = profile(upper / 2.0), f2 = profile(upper);
        double mismatch = 0.0;
        if (f1 > 0.0 && f2 > 0.0) {
            mismatch = std::fabs(std::log2(f2 / f1) + beta);
            if (mismatch > 1.5)
                throw std::runtime_error("radial_integral: tail decay check failed");
        } else if (f1 != 0.0 || f2 != 0.0) {
            throw std::runtime_error("radial_integral: tail sign change");
        }
        // \int_upper^inf r^{Q-1} c r^{-beta} dr with c matched at r = upper
        tailS = f2 * std::pow(upper, static_cast<double>(q)) / (beta - q);
        tailErr = std::fabs(tailS) * (std::exp2(mismatch) - 1.0 + 1e-12);
    }

    // \int_a^upper r^{Q-1} f(r) dr = (upper^Q / Q) \int_{(a/upper)^Q}^1 f(upper v^{1/Q}) dv
    double numS = 0.0;
    if (upper > a) {
        const double v0 = std::pow(a / upper, static_cast<double>(q));
        const double scale = std::pow(upper, static_cast<double>(q)) / q;
        numS = scale * adaptiveSimpson(
                           [&](double v) {
                               const double r = upper * std::pow(v, 1.0 / q);
                               return profile(r);
                           },
                           v0, 1.0, 1e-11);
    }
    const double s = numS + tailS;
    IntegralValue out;
    out.value = qcb * s;
    out.err = q * cb.err * std::fabs(s) + qcb * (tailErr + 1e-12 * std::fabs(numS));
    return out;
}

IntegralValue SphereRule::integrate(const std::function<double(const SphereNode&)>& h) const {
    const int B = batches;
    std::vector<double> batchVals(B, 0.0);
    for (int b = 0; b < B; ++b) {
        const std::size_t lo = batchOffsets[b];
        const std::size_t hi = batchOffsets[b + 1];
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double v = h(nodes[i]);
            if (!std::isfinite(v))
                throw std::runtime_error("sphere_integral: non-finite sample");
            s += nodes[i].weight * v;
        }
        batchVals[b] = s * B;
    }
    double mean = 0.0;
    for (double v : batchVals) mean += v;
    mean /= B;
    double var = 0.0;
    for (double v : batchVals) var += (v - mean) * (v - mean);
    IntegralValue out;
    out.value = mean;
    out.err = B > 1 ? std::sqrt(var / (B * (B - 1.0))) : 0.0;
    return out;
}

double SphereRule::horizMoment(double power) const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight * std::pow(n.horizNorm, power);
    return s;
}

double SphereRule::horizFirstMoment(double power) const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight * std::pow(n.horizFirstAbs, power);
    return s;
}

SphereRule buildSphereRule(const CarnotGroup& g, const HomogeneousGauge& ng,
                           std::size_t samples, std::uint64_t seed) {
    const int B = 32;
    const std::size_t per = std::max<std::size_t>(1, (samples + B - 1) / B);
    const Box box = gaugeBallBox(ng, 2.0);
    const int n = g.dim();
    const int q = g.homogeneousDim();
    const double ln2 = std::log(2.0);
    const double wScale = box.volume() / (ln2 * static_cast<double>(per) * B);

    const SobolSequence sobol(n);
    std::vector<std::vector<SphereNode>> perBatch(B);
    forEachChunk(B, [&](std::size_t b) {
        std::uint64_t st = mixSeed(seed, kStreamSphere) ^ (0xD1B54A32D192ED03ULL * (b + 1));
        double shift[kMaxQmcDim];
        for (int d = 0; d < n; ++d) shift[d] = (splitmix64(st) >> 11) * 0x1p-53;
        auto& out = perBatch[b];
        double pt[kMaxQmcDim];
        const std::uint64_t base = static_cast<std::uint64_t>(b) * per;
        for (std::size_t i = 0; i < per; ++i) {
            sobol.point(base + i, pt);
            Coords x{0.0, 0.0, 0.0};
            for (int d = 0; d < n; ++d) {
                double u = pt[d] + shift[d];
                if (u >= 1.0) u -= 1.0;
                x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u;
            }
            const double r = ng(x);
            if (r < 1.0 || r >= 2.0) continue;
            SphereNode node;
            node.z = g.dilate(1.0 / r, x);
            node.weight = wScale * std::pow(r, -static_cast<double>(q));
            double h2 = 0.0;
            for (int d = 0; d < g.horizontalDim(); ++d) h2 += node.z[d] * node.z[d];
            node.horizNorm = std::sqrt(h2);
            node.horizFirstAbs = std::fabs(node.z[0]);
            out.push_back(node);
        }
    });

    SphereRule rule;
    rule.batches = B;
    rule.batchOffsets.resize(B + 1, 0);
    for (int b = 0; b < B; ++b) {
        rule.batchOffsets[b] = rule.nodes.size();
        rule.nodes.insert(rule.nodes.end(), perBatch[b].begin(), perBatch[b].end());
    }
    rule.batchOffsets[B] = rule.nodes.size();
    const IntegralValue one = rule.integrate([](const SphereNode&) { return 1.0; });
    rule.total = one.value;
    rule.totalErr = one.err;
    return rule;
}

IntegralValue sphereIntegral(const GroupFn& h, const CarnotGroup& g,
                             const HomogeneousGauge& ng, const QuadratureSpec& spec) {
    spec.validate();
    const SphereRule rule = buildSphereRule(g, ng, spec.samples, spec.seed);
    return rule.integrate([&](const SphereNode& node) { return h(node.z); });
}

std::shared_ptr<const GaugeConstants> gaugeConstants(const CarnotGroup& g,
                                                     const HomogeneousGauge& ng,
                                                     std::uint64_t seed) {
    static std::mutex mtx;
    static std::map<std::string, std::shared_ptr<const GaugeConstants>> cache;
    const std::string key = ng.key() + "#" + std::to_string(seed);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto gc = std::make_shared<GaugeConstants>();
    gc->seed = seed;
    gc->cbSamples = 10000000;
    QuadratureSpec cbSpec;
    cbSpec.samples = gc->cbSamples;
    cbSpec.seed = seed;
    const IntegralValue cb = ballVolume(g, ng, cbSpec);
    gc->cb = cb.value;
    gc->cbErr = cb.err;
    gc->q = g.homogeneousDim();
    gc->qcb = gc->q * gc->cb;
    gc->sphere = buildSphereRule(g, ng, 200000, seed);
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = cache.emplace(key, gc);
    return it->second;
}

}  // namespace subfrac
