#include "adavaw/losses.hpp"

#include <cmath>

#include "adavaw/errors.hpp"

namespace adavaw::losses {

namespace {

// log(1 + e^x) without overflow
double softplus(double x) {
    if (x > 35.0) return x;
    if (x < -35.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

} // namespace

void Loss::validate() const {
    if (kind == Kind::Huber && !(omega > 0.0))
        throw config_error("huber loss requires omega > 0");
    if (kind == Kind::EpsLogistic && eps < 0.0)
        throw config_error("eps-insensitive logistic loss requires eps >= 0");
}

double Loss::gamma() const {
    switch (kind) {
    case Kind::Squared: return 2.0;
    case Kind::Huber: return 1.0;
    case Kind::LogCosh: return 1.0;
    case Kind::EpsLogistic: return 0.5;
    }
    return 2.0;
}

double loss_eval(const Loss& loss, double x, double theta) {
    loss.validate();
    const double d = x - theta;
    switch (loss.kind) {
    case Kind::Squared:
        return d * d;
    case Kind::Huber: {
        const double a = std::fabs(d);
        return a <= loss.omega ? 0.5 * d * d : loss.omega * (a - 0.5 * loss.omega);
    }
    case Kind::LogCosh: {
        // log cosh d = |d| + log(1 + e^{-2|d|}) - log 2, stable for large |d|
        const double a = std::fabs(d);
        return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    case Kind::EpsLogistic:
        return softplus(d - loss.eps) + softplus(-d - loss.eps) -
               2.0 * softplus(-loss.eps);
    }
    return d * d;
}

double loss_eval(const Loss& loss, std::span<const double> x, std::span<const double> theta) {
    if (x.size() != theta.size())
        throw dimension_error("loss_eval: vector length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += loss_eval(loss, x[i], theta[i]);
    return s;
}

} // namespace adavaw::losses
