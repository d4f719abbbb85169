#include "subfrac/group.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace subfrac {

CarnotGroup CarnotGroup::euclidean(int n) {
    if (n < 1 || n > 3) throw std::invalid_argument("euclidean group: n in {1,2,3}");
    CarnotGroup g;
    g.name_ = "r" + std::to_string(n);
    g.kind_ = GroupKind::euclidean;
    g.n_ = n;
    g.m_ = n;
    g.weights_ = {1, 1, 1};
    g.q_ = n;
    return g;
}

CarnotGroup CarnotGroup::heisenberg() {
    CarnotGroup g;
    g.name_ = "h1";
    g.kind_ = GroupKind::heisenberg;
    g.n_ = 3;
    g.m_ = 2;
    g.weights_ = {1, 1, 2};
    g.q_ = 4;
    return g;
}

CarnotGroup CarnotGroup::fromId(const std::string& id) {
    if (id == "r1") return euclidean(1);
    if (id == "r2") return euclidean(2);
    if (id == "r3") return euclidean(3);
    if (id == "h1") return heisenberg();
    throw std::invalid_argument("unknown group id: " + id);
}

Coords CarnotGroup::compose(const Coords& a, const Coords& b) const {
    Coords out{0.0, 0.0, 0.0};
    if (kind_ == GroupKind::heisenberg) {
        out[0] = a[0] + b[0];
        out[1] = a[1] + b[1];
        out[2] = a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0]);
        return out;
    }
    for (int j = 0; j < n_; ++j) out[j] = a[j] + b[j];
    return out;
}

Coords CarnotGroup::invert(const Coords& a) const {
    // Coordinate negation inverts both shipped laws (the skew term is
    // antisymmetric).
    Coords out{0.0, 0.0, 0.0};
    for (int j = 0; j < n_; ++j) out[j] = -a[j];
    return out;
}

Coords CarnotGroup::dilate(double lambda, const Coords& a) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
    Coords out{0.0, 0.0, 0.0};
    for (int j = 0; j < n_; ++j) {
        const int d = weights_[j];
        double factor = lambda;
        for (int k = 1; k < d; ++k) factor *= lambda;
        out[j] = factor * a[j];
    }
    return out;
}

Coords CarnotGroup::horizontalRotate(double theta, const Coords& a) const {
    if (m_ < 2) {
        if (theta != 0.0)
            throw std::invalid_argument("horizontal rotation needs m >= 2");
        return a;
    }
    Coords out = a;
    const double c = std::cos(theta), s = std::sin(theta);
    out[0] = c * a[0] - s * a[1];
    out[1] = s * a[0] + c * a[1];
    return out;
}

namespace {

void checkMembership(const CarnotGroup& g, const GroupPoint& x, const char* what) {
    if (x.group == nullptr || !(*x.group == g))
        throw std::invalid_argument(std::string(what) + ": point does not belong to group " +
                                    g.name());
    for (int j = 0; j < g.dim(); ++j)
        if (!std::isfinite(x.coords[j]))
            throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
}

}  // namespace

GroupPoint compose(const CarnotGroup& g, const GroupPoint& x, const GroupPoint& y) {
    checkMembership(g, x, "compose");
    checkMembership(g, y, "compose");
    return GroupPoint{g.compose(x.coords, y.coords), x.group};
}

GroupPoint invert(const CarnotGroup& g, const GroupPoint& x) {
    checkMembership(g, x, "invert");
    return GroupPoint{g.invert(x.coords), x.group};
}

GroupPoint dilate(const CarnotGroup& g, double lambda, const GroupPoint& x) {
    checkMembership(g, x, "dilate");
    return GroupPoint{g.dilate(lambda, x.coords), x.group};
}

GroupPoint horizontalRotate(const CarnotGroup& g, double theta, const GroupPoint& x) {
    checkMembership(g, x, "horizontal_rotate");
    return GroupPoint{g.horizontalRotate(theta, x.coords), x.group};
}

HomogeneousGauge HomogeneousGauge::make(GaugeKind kind, const CarnotGroup& g) {
    if (kind == GaugeKind::euclidean && g.kind() != GroupKind::euclidean)
        throw std::invalid_argument("euclidean gauge requested on a non-Abelian group");
    HomogeneousGauge ng(kind, g);
    if (kind == GaugeKind::euclidean || g.kind() == GroupKind::euclidean) {
        // True norm; triangle inequality holds by construction.
        ng.flags_.triangle = AxiomStatus::declared;
    }
    return ng;
}

HomogeneousGauge HomogeneousGauge::fromId(const std::string& id, const CarnotGroup& g) {
    if (id == "euclidean") return make(GaugeKind::euclidean, g);
    if (id == "koranyi") return make(GaugeKind::koranyi, g);
    throw std::invalid_argument("unknown gauge id: " + id);
}

double HomogeneousGauge::operator()(const Coords& x) const {
    if (group_.kind() == GroupKind::heisenberg) {
        const double rho2 = x[0] * x[0] + x[1] * x[1];
        const double q = rho2 * rho2 + 16.0 * x[2] * x[2];
        return std::sqrt(std::sqrt(q));
    }
    double s = 0.0;
    for (int j = 0; j < group_.dim(); ++j) s += x[j] * x[j];
    return std::sqrt(s);
}

double HomogeneousGauge::operator()(const GroupPoint& x) const {
    checkMembership(group_, x, "gauge");
    return (*this)(x.coords);
}

std::string HomogeneousGauge::key() const {
    return group_.name() + "/" + (kind_ == GaugeKind::euclidean ? "euclidean" : "koranyi");
}

Coords HomogeneousGauge::unitBallHalfwidths() const {
    if (group_.kind() == GroupKind::heisenberg) return Coords{1.0, 1.0, 0.25};
    return Coords{1.0, 1.0, 1.0};
}

double GroupLawReport::maxDeviation() const {
    return std::max(std::max(identityDev, inverseDev),
                    std::max(associativityDev, dilationDev));
}

double GaugeAxiomReport::maxDeviation() const {
    double m = std::max(zeroAtIdentity, symmetryDev);
    m = std::max(m, homogeneityDev);
    m = std::max(m, rotationDev);
    return std::max(m, triangleDev);
}

namespace {

Coords randomCoords(const CarnotGroup& g, std::mt19937_64& rng, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Coords x{0.0, 0.0, 0.0};
    for (int j = 0; j < g.dim(); ++j) x[j] = dist(rng);
    return x;
}

// Per-coordinate deviation, normalized by the coordinate magnitude once it
// exceeds 1 so the exactness threshold does not scale with lambda^2-sized
// skew terms.
double maxCoordDiff(const CarnotGroup& g, const Coords& a, const Coords& b) {
    double m = 0.0;
    for (int j = 0; j < g.dim(); ++j) {
        const double scale = std::max(1.0, std::max(std::fabs(a[j]), std::fabs(b[j])));
        m = std::max(m, std::fabs(a[j] - b[j]) / scale);
    }
    return m;
}

}  // namespace

GroupLawReport validateGroupLaws(const CarnotGroup& g, std::size_t samples,
                                 std::uint64_t seed) {
    GroupLawReport rep;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lam(0.1, 10.0);
    const Coords e = g.identity();
    for (std::size_t i = 0; i < samples; ++i) {
        const Coords x = randomCoords(g, rng, 10.0);
        const Coords y = randomCoords(g, rng, 10.0);
        const Coords z = randomCoords(g, rng, 10.0);
        rep.identityDev = std::max(rep.identityDev, maxCoordDiff(g, g.compose(x, e), x));
        rep.identityDev = std::max(rep.identityDev, maxCoordDiff(g, g.compose(e, x), x));
        rep.inverseDev =
            std::max(rep.inverseDev, maxCoordDiff(g, g.compose(x, g.invert(x)), e));
        rep.associativityDev = std::max(
            rep.associativityDev, maxCoordDiff(g, g.compose(g.compose(x, y), z),
                                               g.compose(x, g.compose(y, z))));
        const double l = lam(rng);
        rep.dilationDev = std::max(
            rep.dilationDev, maxCoordDiff(g, g.dilate(l, g.compose(x, y)),
                                          g.compose(g.dilate(l, x), g.dilate(l, y))));
    }
    return rep;
}

GaugeAxiomReport validateGaugeAxioms(HomogeneousGauge& ng, std::size_t samples,
                                     std::uint64_t seed, double tol) {
    const CarnotGroup& g = ng.group();
    GaugeAxiomReport rep;
    rep.samples = samples;
    rep.zeroAtIdentity = ng(g.identity());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lam(0.1, 10.0);
    std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
    for (std::size_t i = 0; i < samples; ++i) {
        const Coords x = randomCoords(g, rng, 10.0);
        const Coords y = randomCoords(g, rng, 10.0);
        const double nx = ng(x), nyv = ng(y);
        const double scale = std::max(1.0, std::max(nx, nyv));
        rep.symmetryDev =
            std::max(rep.symmetryDev, std::fabs(ng(g.invert(x)) - nx) / scale);
        const double l = lam(rng);
        rep.homogeneityDev = std::max(
            rep.homogeneityDev, std::fabs(ng(g.dilate(l, x)) - l * nx) / (l * scale));
        if (g.horizontalDim() >= 2) {
            const double th = ang(rng);
            rep.rotationDev = std::max(
                rep.rotationDev, std::fabs(ng(g.horizontalRotate(th, x)) - nx) / scale);
        }
        const double d = ng(g.compose(g.invert(y), x));
        rep.triangleDev = std::max(rep.triangleDev, (std::fabs(nyv - nx) - d) / scale);
        rep.triangleDev = std::max(rep.triangleDev, (d - (nx + nyv)) / scale);
    }
    if (rep.symmetryDev <= tol) ng.flags().symmetric = AxiomStatus::empirically_validated;
    if (rep.homogeneityDev <= tol)
        ng.flags().homogeneous = AxiomStatus::empirically_validated;
    if (rep.rotationDev <= tol && g.horizontalDim() >= 2)
        ng.flags().horizontally_rotation_invariant = AxiomStatus::empirically_validated;
    if (rep.triangleDev <= tol) ng.flags().triangle = AxiomStatus::empirically_validated;
    return rep;
}

}  // namespace subfrac
