#pragma once

#include <span>
#include <vector>

#include "adavaw/linalg.hpp"

namespace adavaw::regress {

// Monomial feature [1, t_rel, ..., t_rel^k] for 1-based relative time.
struct MonomialFeature {
    int t_rel = 1;
    int k = 0;

    std::vector<double> vector() const;
};

// Vovk-Azoury-Warmuth accumulator over monomial features: inverse of
// A = I + sum x_s x_s^T plus b = sum y_s x_s. The feature of the current
// step is absorbed into A before its label arrives.
//
// The inverse is maintained by Sherman-Morrison updates in a power-of-two
// rescaled coordinate system (raw monomials of long bins are badly
// conditioned), and recomputed from the exact Gram accumulator by a fresh
// factorization every kRefreshInterval updates or whenever the scale grows.
class VawState {
public:
    static constexpr int kRefreshInterval = 256;

    explicit VawState(int k);

    int k() const { return k_; }
    int dim() const { return k_ + 1; }
    int count() const { return count_; }

    void absorb_feature(const MonomialFeature& x);
    void absorb_label(const MonomialFeature& x, double y);
    double predict(const MonomialFeature& x) const;

    // Raw-coordinate A^{-1} and b, reconstructed for diagnostics and tests.
    linalg::Mat a_inv() const;
    const std::vector<double>& b() const { return b_; }

private:
    void scaled_feature(const MonomialFeature& x, std::vector<double>& out) const;
    void refresh();

    int k_;
    double scale_ = 1.0;
    linalg::Mat gram_;       // raw sum x x^T
    std::vector<double> b_;  // raw sum y x
    linalg::Mat ainv_;       // inverse of S (I + gram) S, S = diag(scale^-j)
    int count_ = 0;
    int updates_ = 0;
};

// Reusable workspace for the per-step recenter of the policy loop: QR of the
// scaled monomial design built in place, no allocation once warmed up.
class RecenterEngine {
public:
    // Residual y - X (X \ y); the returned span aliases an internal buffer
    // valid until the next call.
    std::span<const double> residual(std::span<const double> y_window, int k);

private:
    std::vector<double> q_;   // column-major orthonormal basis, len x (k+1)
    std::vector<double> res_;
};

// OLS residual of a window against monomial features [1, i, ..., i^k] for
// i = 1..window length, solved via QR. Requires length >= k + 1.
std::vector<double> recenter(std::span<const double> y_window, int k);

struct DetResult {
    double value = 0.0;
    double log_value = 0.0; // log of |value|; -inf when value == 0
};

// det(X^T X) for the design X with rows [1, i, ..., i^{m-1}], i = 1..t,
// computed through a scaled factorization with log-domain accumulation.
// Guarded to m <= 5, t <= 200.
DetResult design_determinant(int t, int m);

} // namespace adavaw::regress
