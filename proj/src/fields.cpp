#include "subfrac/fields.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace subfrac {

namespace {
constexpr std::uint64_t kStreamMollifier = 0x3011;
}

ScalarField::ScalarField(std::string name, Fn fn, double supportRadius, Smoothness s)
    : name_(std::move(name)), fn_(std::move(fn)), supportRadius_(supportRadius),
      smoothness_(s) {
    if (supportRadius_ < 0.0)
        throw std::invalid_argument("ScalarField: negative support radius");
}

ScalarField ScalarField::scaled(double lambda) const {
    Fn base = fn_;
    return ScalarField(name_ + "*" + std::to_string(lambda),
                       [base, lambda](const Coords& x) { return lambda * base(x); },
                       supportRadius_, smoothness_);
}

ScalarField makeBump(const HomogeneousGauge& ng, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("bump: radius must be positive");
    HomogeneousGauge gauge = ng;
    return ScalarField(
        "bump",
        [gauge, radius](const Coords& x) {
            const double r = gauge(x) / radius;
            const double r2 = r * r;
            if (r2 >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - r2));
        },
        radius, Smoothness::c2);
}

ScalarField makeGauss(const CarnotGroup& g, const HomogeneousGauge& ng, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("gauss: radius must be positive");
    HomogeneousGauge gauge = ng;
    const int n = g.dim();
    return ScalarField(
        "gauss",
        [gauge, radius, n](const Coords& x) {
            if (gauge(x) > radius) return 0.0;
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += x[j] * x[j];
            return std::exp(-s);
        },
        radius, Smoothness::c2);
}

ScalarField makeIndicator(const HomogeneousGauge& ng, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("indicator: radius must be positive");
    HomogeneousGauge gauge = ng;
    return ScalarField(
        "indicator",
        [gauge, radius](const Coords& x) { return gauge(x) <= radius ? 1.0 : 0.0; },
        radius, Smoothness::measurable);
}

ScalarField makeField(const std::string& name, double radius, const CarnotGroup& g,
                      const HomogeneousGauge& ng) {
    if (name == "bump") return makeBump(ng, radius);
    if (name == "gauss") return makeGauss(g, ng, radius);
    if (name == "indicator") return makeIndicator(ng, radius);
    throw std::invalid_argument("unknown field: " + name);
}

double mollifierDensity(const HomogeneousGauge& ng, const Coords& z) {
    const double r = ng(z);
    const double q = r * r * r * r;  // gauge^4: polynomial in coordinates
    if (q >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - q));
}

double mollifierNormalization(const CarnotGroup& g, const HomogeneousGauge& ng,
                              const QuadratureSpec& spec) {
    static std::mutex mtx;
    static std::map<std::string, double> cache;
    const std::string key = ng.key() + "#" + std::to_string(spec.seed);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    QuadratureSpec normSpec = spec;
    normSpec.samples = std::max<std::size_t>(spec.samples, 200000);
    const IntegralValue z = regionIntegral(
        [&](const Coords& c) { return mollifierDensity(ng, c); }, g, ng,
        Region::ball(1.0), normSpec);
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(key, z.value);
    return z.value;
}

double cutoffProfile(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double x = r - 1.0;
    // quintic smoothstep, C^2 at both seams, |slope| <= 15/8
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

ScalarField mollify(const ScalarField& u, const CarnotGroup& g,
                    const HomogeneousGauge& ng, double eps, const QuadratureSpec& spec) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
    spec.validate();
    const double znorm = mollifierNormalization(g, ng, spec);

    // fixed QMC node set over the unit-ball box; zero-density nodes dropped
    const Box box = gaugeBallBox(ng, 1.0);
    const std::size_t count = std::min<std::size_t>(spec.samples, 256);
    const int n = g.dim();
    SobolSequence sobol(n);
    std::uint64_t st = mixSeed(spec.seed, kStreamMollifier);
    double shift[kMaxQmcDim];
    for (int d = 0; d < n; ++d) shift[d] = (splitmix64(st) >> 11) * 0x1p-53;

    struct Node {
        Coords shiftPoint;  // (delta_eps z)^{-1}
        double weight;
    };
    auto nodes = std::make_shared<std::vector<Node>>();
    nodes->reserve(count);
    const double wScale = box.volume() / (znorm * static_cast<double>(count));
    double pt[kMaxQmcDim];
    for (std::size_t i = 0; i < count; ++i) {
        sobol.point(i, pt);
        Coords z{0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) {
            double v = pt[d] + shift[d];
            if (v >= 1.0) v -= 1.0;
            z[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * v;
        }
        const double rho = mollifierDensity(ng, z);
        if (rho <= 0.0) continue;
        nodes->push_back(Node{g.invert(g.dilate(eps, z)), rho * wScale});
    }

    ScalarField::Fn base = [u](const Coords& x) { return u(x); };
    CarnotGroup grp = g;
    return ScalarField(
        u.name() + "_eps" + std::to_string(eps),
        [nodes, base, grp](const Coords& x) {
            double acc = 0.0;
            for (const auto& node : *nodes)
                acc += node.weight * base(grp.compose(node.shiftPoint, x));
            return acc;
        },
        u.supportRadius() + eps, Smoothness::c2);
}

ScalarField truncate(const ScalarField& u, const CarnotGroup& g,
                     const HomogeneousGauge& ng, int k) {
    (void)g;
    if (k <= 0) throw std::invalid_argument("truncate: k must be positive");
    HomogeneousGauge gauge = ng;
    ScalarField::Fn base = [u](const Coords& x) { return u(x); };
    const double kk = static_cast<double>(k);
    return ScalarField(
        u.name() + "_k" + std::to_string(k),
        [gauge, base, kk](const Coords& x) {
            const double eta = cutoffProfile(gauge(x) / kk);
            return eta == 0.0 ? 0.0 : eta * base(x);
        },
        std::min(u.supportRadius(), 2.0 * kk), u.smoothness());
}

}  // namespace subfrac
