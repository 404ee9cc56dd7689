#pragma once

#include <cstdint>

#include "adavaw/series.hpp"

namespace adavaw::gen {

enum class Kind {
    PiecewisePoly,
    SampledContinuous,
    Sobolev,
    Holder,
    ExactSparse,
    Alternating,
    Constant,
};

enum class NoiseKind { Gaussian, UniformBounded };

// Ground-truth generator configuration. Only the fields of the selected kind
// are read; every generated sequence is re-verified against its declared
// class and generation fails loudly on violation.
struct GeneratorSpec {
    Kind kind = Kind::Constant;
    int n = 0;
    int k = 0;
    double B = 1.0;
    std::uint64_t seed = 0;

    int knots = 1;            // piecewise_poly / exact_sparse J
    double coeff_range = 1.0; // piecewise_poly
    bool continuous = true;   // piecewise_poly: C^{k-1} splines vs free pieces
    int segments = 4;         // sampled_continuous
    double radius = 1.0;      // sampled_continuous / sobolev / holder
    double constant = 0.0;    // constant
    int alternating_steps = 0; // alternating M

    void validate() const;
};

series::TimeSeries generate(const GeneratorSpec& spec);

series::TimeSeries add_noise(const series::TimeSeries& ts, double sigma, NoiseKind kind,
                             std::uint64_t seed);

// Stable per-cell seed derivation for experiment sweeps.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

} // namespace adavaw::gen
