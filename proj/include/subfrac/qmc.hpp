#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace subfrac {

inline constexpr int kMaxQmcDim = 6;

// Sobol points with random access (Gray-code direct evaluation, 32-bit
// precision, up to 6 dimensions).
class SobolSequence {
public:
    explicit SobolSequence(int dim);
    int dim() const { return dim_; }
    void point(std::uint64_t index, double* out) const;

private:
    int dim_;
    std::uint32_t dirs_[kMaxQmcDim][32];
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t salt);

struct Box {
    int dim = 0;
    std::array<double, kMaxQmcDim> lo{};
    std::array<double, kMaxQmcDim> hi{};
    double volume() const;
};

Box unitCube(int dim);

struct BatchedValue {
    double value = 0.0;
    double err = 0.0;  // standard error across batches
};

struct MultiEstimate {
    std::vector<double> value;                   // per output
    std::vector<double> err;                     // per output
    std::vector<std::vector<double>> batchMeans; // [batch][output], volume applied
    int batches = 0;
    std::size_t samplesPerBatch = 0;
};

// Randomized QMC over a box: Sobol blocks with per-batch Cranley-Patterson
// shifts. f adds its contributions for one point into acc[0..nout). Batches
// are fixed-size and reduced in batch order, so the result is bit-identical
// for any worker count.
MultiEstimate qmcIntegrateMulti(const Box& box, int nout,
                                const std::function<void(const double*, double*)>& f,
                                std::size_t samples, std::uint64_t seed,
                                int batches = 32);

BatchedValue qmcIntegrate(const Box& box, const std::function<double(const double*)>& f,
                          std::size_t samples, std::uint64_t seed, int batches = 32);

// Midpoint product rule with ~samples total nodes; err from a coarse/fine
// difference.
BatchedValue gridIntegrate(const Box& box, const std::function<double(const double*)>& f,
                           std::size_t samples);

// Adaptive Simpson on [a,b], relative tolerance tol.
double adaptiveSimpson(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-10);

}  // namespace subfrac
