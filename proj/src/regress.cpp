#include "adavaw/regress.hpp"

#include <cmath>
#include <limits>

#include "adavaw/errors.hpp"

namespace adavaw::regress {

std::vector<double> MonomialFeature::vector() const {
    std::vector<double> v(k + 1);
    double p = 1.0;
    for (int j = 0; j <= k; ++j) {
        v[j] = p;
        p *= t_rel;
    }
    return v;
}

VawState::VawState(int k) : k_(k) {
    if (k < 0) throw config_error("VawState: k must be nonnegative");
    const int m = k + 1;
    gram_ = linalg::Mat(m, m);
    b_.assign(m, 0.0);
    ainv_ = linalg::Mat::identity(m); // A = I, scale = 1
}

void VawState::scaled_feature(const MonomialFeature& x, std::vector<double>& out) const {
    out.resize(k_ + 1);
    const double r = x.t_rel / scale_;
    double p = 1.0;
    for (int j = 0; j <= k_; ++j) {
        out[j] = p;
        p *= r;
    }
}

void VawState::refresh() {
    const int m = k_ + 1;
    // scaled A = S (I + gram) S with S = diag(scale^-j)
    linalg::Mat a(m, m);
    std::vector<double> s(m);
    s[0] = 1.0;
    for (int j = 1; j < m; ++j) s[j] = s[j - 1] / scale_;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a(i, j) = s[i] * (gram_(i, j) + (i == j ? 1.0 : 0.0)) * s[j];
    ainv_ = linalg::cholesky_inverse(linalg::cholesky(a));
    updates_ = 0;
}

void VawState::absorb_feature(const MonomialFeature& x) {
    if (x.k != k_) throw dimension_error("absorb_feature: feature order mismatch");
    const int m = k_ + 1;
    const auto raw = x.vector();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) gram_(i, j) += raw[i] * raw[j];

    if (x.t_rel > scale_) {
        while (scale_ < x.t_rel) scale_ *= 2.0;
        refresh();
        return;
    }

    std::vector<double> xs;
    scaled_feature(x, xs);
    // Sherman-Morrison: ainv -= (ainv x)(x^T ainv) / (1 + x^T ainv x)
    std::vector<double> ax(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double v = 0.0;
        for (int j = 0; j < m; ++j) v += ainv_(i, j) * xs[j];
        ax[i] = v;
    }
    double denom = 1.0;
    for (int i = 0; i < m; ++i) denom += xs[i] * ax[i];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) ainv_(i, j) -= ax[i] * ax[j] / denom;

    if (++updates_ >= kRefreshInterval) refresh();
}

void VawState::absorb_label(const MonomialFeature& x, double y) {
    if (x.k != k_) throw dimension_error("absorb_label: feature order mismatch");
    const auto raw = x.vector();
    for (int j = 0; j <= k_; ++j) b_[j] += y * raw[j];
    ++count_;
}

double VawState::predict(const MonomialFeature& x) const {
    if (x.k != k_) throw dimension_error("predict: feature order mismatch");
    const int m = k_ + 1;
    std::vector<double> xs;
    scaled_feature(x, xs);
    // scaled b: (S b)_j = b_j * scale^-j
    double out = 0.0;
    double sj = 1.0;
    std::vector<double> bs(m);
    for (int j = 0; j < m; ++j) {
        bs[j] = b_[j] * sj;
        sj /= scale_;
    }
    for (int i = 0; i < m; ++i) {
        double v = 0.0;
        for (int j = 0; j < m; ++j) v += ainv_(i, j) * bs[j];
        out += xs[i] * v;
    }
    return out;
}

linalg::Mat VawState::a_inv() const {
    const int m = k_ + 1;
    linalg::Mat raw(m, m);
    std::vector<double> s(m);
    s[0] = 1.0;
    for (int j = 1; j < m; ++j) s[j] = s[j - 1] / scale_;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) raw(i, j) = s[i] * ainv_(i, j) * s[j];
    return raw;
}

std::span<const double> RecenterEngine::residual(std::span<const double> y_window, int k) {
    const std::size_t len = y_window.size();
    if (len < static_cast<std::size_t>(k) + 1)
        throw dimension_error("recenter: window shorter than k + 1");
    const int m = k + 1;
    q_.resize(len * m);
    // column j = scaled monomial ((i+1)/len)^j, orthonormalized against the
    // previous columns (MGS, two passes)
    for (int j = 0; j < m; ++j) {
        double* col = q_.data() + static_cast<std::size_t>(j) * len;
        for (std::size_t i = 0; i < len; ++i)
            col[i] = std::pow((i + 1.0) / static_cast<double>(len), j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int jj = 0; jj < j; ++jj) {
                const double* prev = q_.data() + static_cast<std::size_t>(jj) * len;
                double s = 0.0;
                for (std::size_t i = 0; i < len; ++i) s += prev[i] * col[i];
                for (std::size_t i = 0; i < len; ++i) col[i] -= s * prev[i];
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < len; ++i) nrm += col[i] * col[i];
        if (!(nrm > 0.0)) throw dimension_error("recenter: rank deficient design");
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < len; ++i) col[i] /= nrm;
    }
    res_.assign(y_window.begin(), y_window.end());
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < m; ++j) {
            const double* col = q_.data() + static_cast<std::size_t>(j) * len;
            double s = 0.0;
            for (std::size_t i = 0; i < len; ++i) s += col[i] * res_[i];
            for (std::size_t i = 0; i < len; ++i) res_[i] -= s * col[i];
        }
    }
    return std::span<const double>(res_.data(), len);
}

std::vector<double> recenter(std::span<const double> y_window, int k) {
    RecenterEngine engine;
    const auto r = engine.residual(y_window, k);
    return std::vector<double>(r.begin(), r.end());
}

DetResult design_determinant(int t, int m) {
    if (m < 1 || t < 1) throw config_error("design_determinant: need t, m >= 1");
    if (m > 5 || t > 200)
        throw config_error("design_determinant: guarded to m <= 5, t <= 200");
    if (t < m) {
        // rank deficient: X has fewer rows than columns
        return {0.0, -std::numeric_limits<double>::infinity()};
    }
    // scaled Gram G~(i,j) = sum_{s<=t} (s/t)^{i+j}; det(X^T X) = det(G~) t^{m(m-1)}
    linalg::Mat g(m, m);
    for (int s = 1; s <= t; ++s) {
        const double r = static_cast<double>(s) / t;
        std::vector<double> pw(m);
        double p = 1.0;
        for (int j = 0; j < m; ++j) {
            pw[j] = p;
            p *= r;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) g(i, j) += pw[i] * pw[j];
    }
    linalg::Mat l;
    try {
        l = linalg::cholesky(g);
    } catch (const dimension_error&) {
        return {0.0, -std::numeric_limits<double>::infinity()};
    }
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) logdet += std::log(l(i, i));
    logdet *= 2.0;
    logdet += static_cast<double>(m) * (m - 1) * std::log(static_cast<double>(t));
    return {std::exp(logdet), logdet};
}

} // namespace adavaw::regress
