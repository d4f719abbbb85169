#include "subfrac/orlicz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace subfrac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Index estimation grid (log-spaced), per the shipped defaults.
constexpr int kIndexGridSize = 2048;
constexpr double kIndexGridLo = 1e-6;
constexpr double kIndexGridHi = 1e6;

// H table for non-power families.
constexpr int kHTableSize = 2048;
constexpr double kHTableLo = 1e-12;
constexpr double kHTableHi = 1e12;

double parseParam(const std::string& id, std::size_t colon) {
    try {
        return std::stod(id.substr(colon + 1));
    } catch (...) {
        throw std::invalid_argument("bad orlicz id: " + id);
    }
}

}  // namespace

OrliczFunction OrliczFunction::power(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("power family needs p > 1");
    OrliczFunction f;
    f.family_ = OrliczFamily::power;
    f.p_ = p;
    f.idx_ = GrowthIndices{p, p, std::exp2(p)};
    return f;
}

OrliczFunction OrliczFunction::powerLog(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("power_log family needs p > 1");
    OrliczFunction f;
    f.family_ = OrliczFamily::power_log;
    f.p_ = p;
    f.buildTables();
    return f;
}

OrliczFunction OrliczFunction::fromId(const std::string& id) {
    const std::size_t colon = id.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad orlicz id: " + id);
    const std::string family = id.substr(0, colon);
    const double p = parseParam(id, colon);
    if (family == "power") return power(p);
    if (family == "power_log") return powerLog(p);
    throw std::invalid_argument("unknown orlicz family: " + family);
}

std::string OrliczFunction::name() const {
    const char* fam = family_ == OrliczFamily::power ? "power" : "power_log";
    return std::string(fam) + ":" + std::to_string(p_);
}

double OrliczFunction::operator()(double t) const {
    if (t < 0.0) throw std::domain_error("phi: negative argument");
    if (t == 0.0) return 0.0;
    if (family_ == OrliczFamily::power) return std::pow(t, p_);
    return std::pow(t, p_) * std::log1p(t) / kLn2;
}

double OrliczFunction::deriv(double t) const {
    if (t < 0.0) throw std::domain_error("phi': negative argument");
    if (t == 0.0) return 0.0;
    if (family_ == OrliczFamily::power) return p_ * std::pow(t, p_ - 1.0);
    return std::pow(t, p_ - 1.0) * (p_ * std::log1p(t) + t / (1.0 + t)) / kLn2;
}

double OrliczFunction::inverse(double y) const {
    if (y < 0.0) throw std::domain_error("phi^{-1}: negative argument");
    if (y == 0.0) return 0.0;
    double hi = std::max(1.0, 2.0 * std::pow(y, 1.0 / idx_.pMinus));
    int guard = 0;
    while ((*this)(hi) < y) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("phi^{-1}: bracket expansion failed");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(mid) < y)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double OrliczFunction::conjugate(double s) const {
    if (s < 0.0) throw std::domain_error("phi*: negative argument");
    if (s == 0.0) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (deriv(hi) < s) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("phi*: bracket expansion failed");
    }
    double lo = 0.0;
    auto objective = [&](double t) { return s * t - (*this)(t); };
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (objective(m1) < objective(m2))
            lo = m1;
        else
            hi = m2;
    }
    return std::max(0.0, objective(0.5 * (lo + hi)));
}

double OrliczFunction::logPrimitive(double tau) const {
    if (tau < 0.0) throw std::domain_error("logPrimitive: negative argument");
    if (tau == 0.0) return 0.0;
    if (family_ == OrliczFamily::power) return std::pow(tau, p_) / p_;
    const double lt = std::log(tau);
    const double pos = (lt - htabLogMin_) / htabLogStep_;
    if (pos <= 0.0) {
        // below table: phi ~ t^{p+1}/ln2, so H scales like tau^{p+1}
        return htab_.front() * std::pow(tau / kHTableLo, p_ + 1.0);
    }
    const int last = static_cast<int>(htab_.size()) - 1;
    if (pos >= last) {
        return htab_.back() * std::pow(tau / kHTableHi, p_);
    }
    const int i = static_cast<int>(pos);
    const double frac = pos - i;
    // log-log interpolation (exact on pure powers)
    const double la = std::log(htab_[i]), lb = std::log(htab_[i + 1]);
    return std::exp(la + frac * (lb - la));
}

void OrliczFunction::buildTables() {
    // growth indices and Delta_2 constant from a dense log grid
    GrowthIndices idx;
    idx.pMinus = std::numeric_limits<double>::infinity();
    idx.pPlus = 0.0;
    idx.delta2 = 0.0;
    const double step = std::log(kIndexGridHi / kIndexGridLo) / (kIndexGridSize - 1);
    // needs eval/deriv before idx_ is set; family closed forms only
    auto phi = [&](double t) { return std::pow(t, p_) * std::log1p(t) / kLn2; };
    auto dphi = [&](double t) {
        return std::pow(t, p_ - 1.0) * (p_ * std::log1p(t) + t / (1.0 + t)) / kLn2;
    };
    for (int i = 0; i < kIndexGridSize; ++i) {
        const double t = kIndexGridLo * std::exp(i * step);
        const double ratio = t * dphi(t) / phi(t);
        idx.pMinus = std::min(idx.pMinus, ratio);
        idx.pPlus = std::max(idx.pPlus, ratio);
        idx.delta2 = std::max(idx.delta2, phi(2.0 * t) / phi(t));
    }
    if (!(idx.pMinus > 1.0 && idx.pPlus >= idx.pMinus && std::isfinite(idx.pPlus)))
        throw std::runtime_error("growth condition (L) violated");
    if (!(idx.delta2 > 2.0 && idx.delta2 <= std::exp2(idx.pPlus) * (1.0 + 1e-9)))
        throw std::runtime_error("Delta_2 bound 2 < C <= 2^{p+} violated");
    idx_ = idx;

    // H(tau) accumulated over the log grid, Simpson per interval
    htab_.resize(kHTableSize);
    const double lstep = std::log(kHTableHi / kHTableLo) / (kHTableSize - 1);
    htabLogMin_ = std::log(kHTableLo);
    htabLogStep_ = lstep;
    // analytic seed: phi(xi) ~ xi^{p+1}/ln2 for xi -> 0
    htab_[0] = std::pow(kHTableLo, p_ + 1.0) / ((p_ + 1.0) * kLn2);
    for (int i = 1; i < kHTableSize; ++i) {
        const double la = htabLogMin_ + (i - 1) * lstep;
        double inc = 0.0;
        const int panels = 8;
        const double h = lstep / panels;
        double prev = phi(std::exp(la));
        for (int k = 0; k < panels; ++k) {
            const double mid = phi(std::exp(la + (k + 0.5) * h));
            const double next = phi(std::exp(la + (k + 1.0) * h));
            inc += h / 6.0 * (prev + 4.0 * mid + next);
            prev = next;
        }
        htab_[i] = htab_[i - 1] + inc;
    }
}

PhiTildeResult phiTilde(const OrliczFunction& phi, const CarnotGroup& g,
                        const HomogeneousGauge& ng, double t,
                        const std::vector<double>& sGrid, bool directional,
                        const std::array<double, 3>* v, const QuadratureSpec& spec) {
    if (!(t >= 0.0)) throw std::invalid_argument("phi_tilde: t must be nonnegative");
    if (directional && v == nullptr)
        throw std::invalid_argument("phi_tilde: directional form needs a vector");
    spec.validate();
    auto gc = gaugeConstants(g, ng, spec.seed);
    const SphereRule& rule = gc->sphere;

    // integrand scale per node: t ||z'|| or |v . z'|
    const int m = g.horizontalDim();
    auto nodeScale = [&](const SphereNode& n) {
        if (!directional) return t * n.horizNorm;
        double dot = 0.0;
        for (int j = 0; j < m; ++j) dot += (*v)[j] * n.z[j];
        return std::fabs(dot);
    };
    double base = t;
    if (directional) {
        double vv = 0.0;
        for (int j = 0; j < m; ++j) vv += (*v)[j] * (*v)[j];
        base = std::sqrt(vv);
    }

    PhiTildeResult out;
    const GrowthIndices& idx = phi.indices();

    if (phi.family() == OrliczFamily::power) {
        // r-integral in closed form: (1-s) \int_0^1 k^p r^{(1-s)p - 1} dr = k^p / p
        const double p = phi.p();
        IntegralValue mv = rule.integrate(
            [&](const SphereNode& n) { return std::pow(nodeScale(n), p); });
        out.value = mv.value / p;
        out.residual = mv.err / p;
    } else {
        // sweep: geometric r grid adapted to 1-s (nodes r_k = rho_k^{1/(1-s)})
        const std::vector<double> grid =
            sGrid.empty() ? std::vector<double>{0.90, 0.95, 0.975, 0.99} : sGrid;
        // batch-aligned subset of the rule keeps it a valid quadrature
        std::size_t cap = 20000;
        std::size_t nodeEnd = rule.nodes.size();
        double subTotalScale = 1.0;
        if (rule.nodes.size() > cap) {
            int keepBatches = 0;
            for (int b = 0; b < rule.batches; ++b)
                if (rule.batchOffsets[b + 1] <= cap) keepBatches = b + 1;
            keepBatches = std::max(1, keepBatches);
            nodeEnd = rule.batchOffsets[keepBatches];
            subTotalScale = static_cast<double>(rule.batches) / keepBatches;
        }
        constexpr int kRhoNodes = 256;
        constexpr double kRhoFloor = 1e-9;
        const double lstep = -std::log(kRhoFloor) / (kRhoNodes - 1);
        double maxTail = 0.0;
        for (double s : grid) {
            if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("phi_tilde: s grid");
            double acc = 0.0;
            for (std::size_t i = 0; i < nodeEnd; ++i) {
                const SphereNode& n = rule.nodes[i];
                const double k = nodeScale(n);
                if (k <= 0.0) continue;
                // trapezoid in log rho of phi(k rho), rho = r^{1-s}
                double inner = 0.0;
                double prev = phi(k * kRhoFloor);
                for (int j = 1; j < kRhoNodes; ++j) {
                    const double rho = kRhoFloor * std::exp(j * lstep);
                    const double cur = phi(k * rho);
                    inner += 0.5 * (prev + cur) * lstep;
                    prev = cur;
                }
                // sub-floor remainder bounded via (phi1)
                const double tailBound = phi(k * kRhoFloor) / idx.pMinus;
                inner += 0.5 * tailBound;
                maxTail = std::max(maxTail, n.weight * tailBound * subTotalScale);
                acc += n.weight * inner * subTotalScale;
            }
            out.sweep.emplace_back(s, acc);
        }
        // linear fit in (1-s)
        const std::size_t np = out.sweep.size();
        if (np < 3) {
            out.value = out.sweep.back().second;
            out.residual = std::fabs(out.value) * 0.01;
        } else {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto& [s, val] : out.sweep) {
                const double x = 1.0 - s;
                sx += x;
                sy += val;
                sxx += x * x;
                sxy += x * val;
            }
            const double det = np * sxx - sx * sx;
            out.value = (sy * sxx - sx * sxy) / det;
            const double slope = (np * sxy - sx * sy) / det;
            double rms = 0.0;
            for (auto& [s, val] : out.sweep) {
                const double r = val - (out.value + slope * (1.0 - s));
                rms += r * r;
            }
            out.residual = std::sqrt(rms / np) + maxTail;
        }
        if (!(std::isfinite(out.value)) || out.residual > 0.05 * std::max(1e-300, std::fabs(out.value)))
            throw std::runtime_error("phi_tilde: extrapolation did not converge");
    }

    // sandwich with sphere-moment constants (reduce to QC_b/p± when ||z'|| = 1
    // sigma-a.e., i.e. the Euclidean instances)
    auto kappaMoment = [&](double q) {
        double sum = 0.0;
        for (const auto& n : rule.nodes) {
            const double kappa = directional ? n.horizFirstAbs : n.horizNorm;
            sum += n.weight * std::pow(kappa, q);
        }
        return sum;
    };
    out.c1 = kappaMoment(idx.pPlus) / idx.pPlus;
    out.c2 = kappaMoment(idx.pMinus) / idx.pMinus;
    if (base > 0.0) {
        const double pb = phi(base);
        const double slack = 3.0 * out.residual + 1e-9 * pb;
        out.sandwichOk = out.c1 * pb <= out.value + slack && out.value <= out.c2 * pb + slack;
    } else {
        out.sandwichOk = out.value == 0.0;
    }
    return out;
}

}  // namespace subfrac
