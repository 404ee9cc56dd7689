#pragma once

#include <span>

namespace adavaw::losses {

enum class Kind { Squared, Huber, LogCosh, EpsLogistic };

// Pointwise loss configuration. omega is the Huber width, eps the logistic
// insensitivity. Each loss is minimized at x == theta with minimum 0.
struct Loss {
    Kind kind = Kind::Squared;
    double omega = 1.0;
    double eps = 0.0;

    void validate() const; // throws config_error on bad parameters

    // Gradient-smoothness constant gamma: loss(x,th) - loss(th,th) is bounded
    // by (gamma/2) (x-th)^2.
    double gamma() const;
};

double loss_eval(const Loss& loss, double x, double theta);

// Vector version: sum of coordinatewise losses.
double loss_eval(const Loss& loss, std::span<const double> x, std::span<const double> theta);

} // namespace adavaw::losses
