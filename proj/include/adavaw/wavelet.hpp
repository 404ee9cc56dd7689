#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adavaw::wavelet {

// Orthonormal DWT matrix for a dyadic length with k+1 discrete vanishing
// moments. Rows are stored structurally: a dense coarse block of polynomial
// rows followed by per-level detail patterns that repeat across the dyadic
// blocks of that level (each detail row is supported on one block).
class DwtBasis {
public:
    struct Level {
        int level = 0;     // 0 = widest detail rows (support = length)
        int block_len = 0; // support of each row at this level
        int blocks = 0;    // number of dyadic blocks
        // patterns[p] has block_len entries; row for block b is the pattern
        // translated to offset b*block_len
        std::vector<std::vector<double>> patterns;
    };

    DwtBasis(int length, int k); // use build_basis / cached_basis instead

    int length() const { return length_; }
    int k() const { return k_; }
    int coarse_count() const { return coarse_count_; }
    int rows() const { return length_; }
    int num_levels() const { return static_cast<int>(levels_.size()); }
    const std::vector<Level>& levels() const { return levels_; }

    // -1 for coarse rows, else the detail level of the row
    int level_of_row(int i) const;

    // Dense copy of row i (length() entries), mainly for tests and dumps.
    std::vector<double> row(int i) const;

    // Support of row i as [offset, offset + values.size()).
    struct RowView {
        std::size_t offset;
        std::span<const double> values;
    };
    RowView row_view(int i) const;

private:
    int length_;
    int k_;
    int coarse_count_;
    std::vector<std::vector<double>> coarse_; // dense rows
    std::vector<Level> levels_;
};

struct CoefficientVector {
    std::vector<double> values;
    int basis_length = 0;
};

int coarse_count_for(int k);

DwtBasis build_basis(int length, int k);

// Process-wide immutable cache, safe for concurrent lookup.
std::shared_ptr<const DwtBasis> cached_basis(int length, int k);

// coefficients = W x
CoefficientVector forward(const DwtBasis& basis, std::span<const double> x);
void forward_serial(const DwtBasis& basis, std::span<const double> x, std::span<double> out);
void forward_parallel(const DwtBasis& basis, std::span<const double> x, std::span<double> out);

// x = W^T coefficients
std::vector<double> inverse(const DwtBasis& basis, std::span<const double> coef);

CoefficientVector soft_threshold(const CoefficientVector& c, double lambda);
double soft_threshold_scalar(double x, double lambda);

// Sum of squares of the soft-thresholded coefficients, without materializing
// the output (policy hot path).
double thresholded_sq_norm(std::span<const double> coef, double lambda);

// Two overlapping dyadic segments covering u: u[1:2^l] and u[L-2^l+1:L] with
// l = floor(log2 L). Views alias the input.
struct PackView {
    std::span<const double> first;
    std::span<const double> second;
};
PackView pack_view(std::span<const double> u);
std::pair<std::vector<double>, std::vector<double>> pack(std::span<const double> u);

// MAD noise estimate: median(|finest detail coefficients|)/0.6745 on the
// largest dyadic prefix of y.
double estimate_sigma_mad(std::span<const double> y, int k);

// Row-major dense dump with 17 significant digits.
void dump_csv(const DwtBasis& basis, const std::string& path);

} // namespace adavaw::wavelet
