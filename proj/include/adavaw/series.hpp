#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace adavaw::series {

// Ground truth and/or observations of one forecasting run. Time is 1-based
// at the API level: theta[0] is the value at t = 1.
struct TimeSeries {
    std::optional<std::vector<double>> theta;
    std::optional<std::vector<double>> y;
    int n = 0;

    void validate() const; // throws dimension_error on inconsistency
};

// The four variational functionals of a sequence at TV order k, all derived
// from the same (k+1)-th order difference vector.
struct VariationalProfile {
    int k = 0;
    double tv_k = 0.0;    // n^k * ||D^{k+1} theta||_1
    double sobolev = 0.0; // n^k * ||D^{k+1} theta||_2
    double holder = 0.0;  // n^k * ||D^{k+1} theta||_inf
    int jumps = 0;        // ||D^{k+1} theta||_0 up to tolerance
};

// Applies the first-difference operator `order` times: result[i] = x[i+1]-x[i]
// iterated. Output length is x.size() - order. Requires x.size() > order.
std::vector<double> diff_op(std::span<const double> x, int order);

// n^k * ||D^{k+1} theta||_1. Requires theta.size() >= k + 2.
double tv_k(std::span<const double> theta, int k);

VariationalProfile variational_profile(std::span<const double> theta, int k);

} // namespace adavaw::series
