#include "subfrac/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subfrac/parallel.hpp"

namespace subfrac {

SobolSequence::SobolSequence(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxQmcDim)
        throw std::invalid_argument("SobolSequence: dimension must be in [1,6]");
    // Primitive polynomials / initial direction numbers for 6 dimensions.
    static constexpr int mdeg[kMaxQmcDim] = {1, 2, 3, 3, 4, 4};
    static constexpr std::uint32_t poly[kMaxQmcDim] = {0, 1, 1, 2, 1, 4};
    static constexpr std::uint32_t init[kMaxQmcDim][4] = {
        {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 3, 7, 0},
        {1, 3, 3, 0}, {1, 1, 3, 13}, {1, 1, 5, 9}};
    for (int d = 0; d < dim_; ++d) {
        const int m = mdeg[d];
        for (int j = 0; j < m; ++j) dirs_[d][j] = init[d][j] << (31 - j);
        for (int j = m; j < 32; ++j) {
            std::uint32_t v = dirs_[d][j - m];
            v ^= v >> m;
            std::uint32_t pp = poly[d];
            for (int l = m - 1; l >= 1; --l) {
                if (pp & 1) v ^= dirs_[d][j - l];
                pp >>= 1;
            }
            dirs_[d][j] = v;
        }
    }
}

void SobolSequence::point(std::uint64_t index, double* out) const {
    const std::uint64_t gray = index ^ (index >> 1);
    for (int d = 0; d < dim_; ++d) {
        std::uint32_t x = 0;
        std::uint64_t bits = gray;
        for (int j = 0; bits && j < 32; ++j, bits >>= 1)
            if (bits & 1) x ^= dirs_[d][j];
        out[d] = x * 0x1p-32;
    }
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (salt * 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

double Box::volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= hi[d] - lo[d];
    return v;
}

Box unitCube(int dim) {
    Box b;
    b.dim = dim;
    for (int d = 0; d < dim; ++d) {
        b.lo[d] = 0.0;
        b.hi[d] = 1.0;
    }
    return b;
}

MultiEstimate qmcIntegrateMulti(const Box& box, int nout,
                                const std::function<void(const double*, double*)>& f,
                                std::size_t samples, std::uint64_t seed, int batches) {
    if (box.dim < 1 || box.dim > kMaxQmcDim)
        throw std::invalid_argument("qmcIntegrateMulti: bad dimension");
    if (samples < 1) throw std::invalid_argument("qmcIntegrateMulti: samples >= 1");
    for (int d = 0; d < box.dim; ++d)
        if (!(std::isfinite(box.lo[d]) && std::isfinite(box.hi[d])))
            throw std::invalid_argument("qmcIntegrateMulti: unbounded box");

    const int B = std::max(1, batches);
    const std::size_t per = std::max<std::size_t>(1, (samples + B - 1) / B);
    const SobolSequence sobol(box.dim);
    const double vol = box.volume();

    MultiEstimate est;
    est.batches = B;
    est.samplesPerBatch = per;
    est.batchMeans.assign(B, std::vector<double>(nout, 0.0));

    forEachChunk(static_cast<std::size_t>(B), [&](std::size_t b) {
        std::uint64_t st = seed ^ (0xD1B54A32D192ED03ULL * (b + 1));
        double shift[kMaxQmcDim];
        for (int d = 0; d < box.dim; ++d)
            shift[d] = (splitmix64(st) >> 11) * 0x1p-53;
        std::vector<double> acc(nout, 0.0);
        double pt[kMaxQmcDim], x[kMaxQmcDim];
        const std::uint64_t base = static_cast<std::uint64_t>(b) * per;
        for (std::size_t i = 0; i < per; ++i) {
            sobol.point(base + i, pt);
            for (int d = 0; d < box.dim; ++d) {
                double u = pt[d] + shift[d];
                if (u >= 1.0) u -= 1.0;
                x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u;
            }
            f(x, acc.data());
        }
        const double scale = vol / static_cast<double>(per);
        for (int k = 0; k < nout; ++k) est.batchMeans[b][k] = acc[k] * scale;
    });

    est.value.assign(nout, 0.0);
    est.err.assign(nout, 0.0);
    for (int k = 0; k < nout; ++k) {
        double mean = 0.0;
        for (int b = 0; b < B; ++b) mean += est.batchMeans[b][k];
        mean /= B;
        double var = 0.0;
        for (int b = 0; b < B; ++b) {
            const double d = est.batchMeans[b][k] - mean;
            var += d * d;
        }
        est.value[k] = mean;
        est.err[k] = B > 1 ? std::sqrt(var / (B * (B - 1.0))) : 0.0;
    }
    return est;
}

BatchedValue qmcIntegrate(const Box& box, const std::function<double(const double*)>& f,
                          std::size_t samples, std::uint64_t seed, int batches) {
    auto est = qmcIntegrateMulti(
        box, 1, [&f](const double* x, double* acc) { acc[0] += f(x); }, samples, seed,
        batches);
    return BatchedValue{est.value[0], est.err[0]};
}

BatchedValue gridIntegrate(const Box& box, const std::function<double(const double*)>& f,
                           std::size_t samples) {
    auto level = [&](std::size_t perAxis) {
        std::size_t total = 1;
        for (int d = 0; d < box.dim; ++d) total *= perAxis;
        double sum = 0.0;
        std::vector<std::size_t> idx(box.dim, 0);
        double x[kMaxQmcDim];
        for (std::size_t i = 0; i < total; ++i) {
            std::size_t rem = i;
            for (int d = 0; d < box.dim; ++d) {
                idx[d] = rem % perAxis;
                rem /= perAxis;
                const double u = (idx[d] + 0.5) / perAxis;
                x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u;
            }
            sum += f(x);
        }
        return sum / static_cast<double>(total) * box.volume();
    };
    std::size_t perAxis = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(std::pow(
               static_cast<double>(samples), 1.0 / box.dim))));
    const double fine = level(perAxis);
    const double coarse = level(std::max<std::size_t>(1, perAxis / 2));
    return BatchedValue{fine, std::fabs(fine - coarse)};
}

namespace {

double simpsonStep(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpsonStep(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpsonStep(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptiveSimpson(const std::function<double(double)>& f, double a, double b,
                       double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(1.0, std::fabs(whole));
    return simpsonStep(f, a, b, fa, fm, fb, whole, tol * scale, 48);
}

}  // namespace subfrac
