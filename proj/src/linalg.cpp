#include "adavaw/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "adavaw/errors.hpp"

namespace adavaw::linalg {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw dimension_error("matmul: shape mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec matvec(const Mat& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw dimension_error("matvec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat cholesky(const Mat& a) {
    if (a.rows() != a.cols()) throw dimension_error("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Mat l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw dimension_error("cholesky: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Vec cholesky_solve(const Mat& l, std::span<const double> rhs) {
    const std::size_t n = l.rows();
    if (rhs.size() != n) throw dimension_error("cholesky_solve: rhs size mismatch");
    Vec y(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
        y[i] /= l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= l(k, ii) * y[k];
        y[ii] /= l(ii, ii);
    }
    return y;
}

Mat cholesky_inverse(const Mat& l) {
    const std::size_t n = l.rows();
    Mat inv(n, n);
    Vec e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e.assign(n, 0.0);
        e[j] = 1.0;
        Vec col = cholesky_solve(l, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    // symmetrize to remove column-wise rounding skew
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::fabs(v);
    return s;
}

double norm_inf(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::fabs(v));
    return s;
}

namespace {

// Modified Gram-Schmidt thin QR, reorthogonalized once. q is rows x cols
// column-orthonormal, r is cols x cols upper triangular.
void mgs_qr(const Mat& a, Mat& q, Mat& r) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw dimension_error("least_squares: system is underdetermined");
    q = a;
    r = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                double s = 0.0;
                for (std::size_t t = 0; t < m; ++t) s += q(t, i) * q(t, j);
                r(i, j) += s;
                for (std::size_t t = 0; t < m; ++t) q(t, j) -= s * q(t, i);
            }
        }
        double nrm = 0.0;
        for (std::size_t t = 0; t < m; ++t) nrm += q(t, j) * q(t, j);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) throw dimension_error("least_squares: rank deficient design");
        r(j, j) = nrm;
        for (std::size_t t = 0; t < m; ++t) q(t, j) /= nrm;
    }
}

} // namespace

Vec least_squares(const Mat& a, std::span<const double> y) {
    if (y.size() != a.rows()) throw dimension_error("least_squares: rhs size mismatch");
    Mat q, r;
    mgs_qr(a, q, r);
    const std::size_t m = a.rows(), n = a.cols();
    Vec qty(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < m; ++t) s += q(t, j) * y[t];
        qty[j] = s;
    }
    Vec w(n, 0.0);
    for (std::size_t jj = n; jj-- > 0;) {
        double s = qty[jj];
        for (std::size_t k = jj + 1; k < n; ++k) s -= r(jj, k) * w[k];
        w[jj] = s / r(jj, jj);
    }
    return w;
}

Vec least_squares_residual(const Mat& a, std::span<const double> y) {
    if (y.size() != a.rows()) throw dimension_error("least_squares: rhs size mismatch");
    Mat q, r;
    mgs_qr(a, q, r);
    const std::size_t m = a.rows(), n = a.cols();
    Vec res(y.begin(), y.end());
    // res -= q q^T y, one column at a time, twice for orthogonality to
    // working precision
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t) s += q(t, j) * res[t];
            for (std::size_t t = 0; t < m; ++t) res[t] -= s * q(t, j);
        }
    }
    return res;
}

} // namespace adavaw::linalg
