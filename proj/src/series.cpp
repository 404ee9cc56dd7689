#include "adavaw/series.hpp"

#include <cmath>
#include <string>

#include "adavaw/errors.hpp"
#include "adavaw/linalg.hpp"

namespace adavaw::series {

void TimeSeries::validate() const {
    if (!theta && !y) throw dimension_error("TimeSeries: neither theta nor y present");
    if (n <= 0) throw dimension_error("TimeSeries: horizon must be positive");
    if (theta && static_cast<int>(theta->size()) != n)
        throw dimension_error("TimeSeries: theta length != n");
    if (y && static_cast<int>(y->size()) != n)
        throw dimension_error("TimeSeries: y length != n");
}

std::vector<double> diff_op(std::span<const double> x, int order) {
    if (order < 1) throw dimension_error("diff_op: order must be positive");
    if (x.size() <= static_cast<std::size_t>(order))
        throw dimension_error("diff_op: vector of length " + std::to_string(x.size()) +
                              " too short for order " + std::to_string(order));
    std::vector<double> cur(x.begin(), x.end());
    for (int pass = 0; pass < order; ++pass) {
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = cur[i + 1] - cur[i];
        cur.pop_back();
    }
    return cur;
}

double tv_k(std::span<const double> theta, int k) {
    if (theta.size() < static_cast<std::size_t>(k) + 2)
        throw dimension_error("tv_k: need length >= k + 2");
    const auto d = diff_op(theta, k + 1);
    return std::pow(static_cast<double>(theta.size()), k) * linalg::norm1(d);
}

VariationalProfile variational_profile(std::span<const double> theta, int k) {
    if (theta.size() < static_cast<std::size_t>(k) + 2)
        throw dimension_error("variational_profile: need length >= k + 2");
    const auto d = diff_op(theta, k + 1);
    const double scale = std::pow(static_cast<double>(theta.size()), k);
    VariationalProfile p;
    p.k = k;
    p.tv_k = scale * linalg::norm1(d);
    p.sobolev = scale * linalg::norm2(d);
    p.holder = scale * linalg::norm_inf(d);
    // ||.||_0 needs a floating point threshold; scale it by the sequence size
    const double eps0 = 1e-10 * std::max(1.0, linalg::norm_inf(theta));
    int jumps = 0;
    for (double v : d)
        if (std::fabs(v) > eps0) ++jumps;
    p.jumps = jumps;
    return p;
}

} // namespace adavaw::series
