#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adavaw::linalg {

using Vec = std::vector<double>;

// Small dense row-major matrix. Sized for the (k+1)-dimensional systems of
// the regression modules; not a general-purpose linear algebra type.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, std::span<const double> x);

// Cholesky factorization of a symmetric positive definite matrix.
// Throws dimension_error if the matrix is not SPD to working precision.
Mat cholesky(const Mat& a);

// Solves a x = rhs given the Cholesky factor l (lower triangular).
Vec cholesky_solve(const Mat& l, std::span<const double> rhs);

// Inverse from a Cholesky factor.
Mat cholesky_inverse(const Mat& l);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm1(std::span<const double> a);
double norm_inf(std::span<const double> a);

// Thin-QR least squares on a tall matrix (rows x cols, rows >= cols) via
// modified Gram-Schmidt with one reorthogonalization pass. Returns the
// coefficient vector minimizing ||a w - y||_2.
Vec least_squares(const Mat& a, std::span<const double> y);

// Residual y - a (a \ y) computed through the same QR path.
Vec least_squares_residual(const Mat& a, std::span<const double> y);

} // namespace adavaw::linalg
