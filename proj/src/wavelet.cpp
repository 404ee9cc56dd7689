#include "adavaw/wavelet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <string>

#include "adavaw/errors.hpp"

namespace adavaw::wavelet {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

int floor_log2(int v) { return std::bit_width(static_cast<unsigned>(v)) - 1; }

// Orthonormalize `vec` against the already-orthonormal rows in `ortho`
// (modified Gram-Schmidt, two passes), then normalize. Returns false if the
// vector is numerically in the span of `ortho`.
bool gram_schmidt_append(std::vector<std::vector<double>>& ortho, std::vector<double> vec) {
    const std::size_t m = vec.size();
    double initial = 0.0;
    for (double v : vec) initial += v * v;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : ortho) {
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t) s += q[t] * vec[t];
            for (std::size_t t = 0; t < m; ++t) vec[t] -= s * q[t];
        }
    }
    double nrm = 0.0;
    for (double v : vec) nrm += v * v;
    if (!(nrm > 1e-24 * std::max(1.0, initial))) return false;
    nrm = std::sqrt(nrm);
    for (double& v : vec) v /= nrm;
    // sign convention: first entry clear of rounding noise is positive
    double amax = 0.0;
    for (double v : vec) amax = std::max(amax, std::fabs(v));
    for (double v : vec) {
        if (std::fabs(v) > 1e-10 * amax) {
            if (v < 0.0)
                for (double& w : vec) w = -w;
            break;
        }
    }
    ortho.push_back(std::move(vec));
    return true;
}

// P orthonormal wavelet patterns for a block of even length m: vectors that
// are polynomials of degree < P on each half-block and orthogonal to all
// whole-block polynomials of degree < P.
std::vector<std::vector<double>> block_patterns(int m, int p_count) {
    const int half = m / 2;
    // whole-block polynomial rows in the local coordinate t/m
    std::vector<std::vector<double>> span;
    for (int d = 0; d < p_count; ++d) {
        std::vector<double> v(m);
        for (int t = 0; t < m; ++t) v[t] = std::pow((t + 1.0) / m, d);
        if (!gram_schmidt_append(span, std::move(v)))
            throw dimension_error("build_basis: degenerate polynomial block");
    }
    std::vector<std::vector<double>> patterns;
    for (int d = 0; d < p_count; ++d) {
        std::vector<double> v(m, 0.0);
        for (int t = 0; t < half; ++t) v[t] = std::pow((t + 1.0) / m, d);
        for (int t = half; t < m; ++t) v[t] = -std::pow((t + 1.0) / m, d);
        if (!gram_schmidt_append(span, std::move(v)))
            throw dimension_error("build_basis: degenerate wavelet candidate");
        patterns.push_back(span.back());
    }
    return patterns;
}

} // namespace

int coarse_count_for(int k) {
    if (k < 0) throw config_error("TV order k must be nonnegative");
    int p = 1;
    while (p < k + 1) p *= 2;
    return p;
}

DwtBasis::DwtBasis(int length, int k) : length_(length), k_(k) {
    if (!is_pow2(length)) throw dimension_error("build_basis: length must be a power of two");
    coarse_count_ = coarse_count_for(k);
    if (length < 2 * coarse_count_)
        throw dimension_error("build_basis: length must be >= 2 * coarse_count");

    // coarse block: orthonormalized monomials of degree <= k, padded to
    // coarse_count with higher-degree completions
    for (int d = 0; d < coarse_count_; ++d) {
        std::vector<double> v(length);
        for (int t = 0; t < length; ++t) v[t] = std::pow((t + 1.0) / length, d);
        if (!gram_schmidt_append(coarse_, std::move(v)))
            throw dimension_error("build_basis: degenerate coarse block");
    }

    // detail levels, widest first; finest block length is 2 * coarse_count
    int block_len = length;
    int level = 0;
    while (block_len >= 2 * coarse_count_) {
        Level lv;
        lv.level = level;
        lv.block_len = block_len;
        lv.blocks = length / block_len;
        lv.patterns = block_patterns(block_len, coarse_count_);
        levels_.push_back(std::move(lv));
        block_len /= 2;
        ++level;
    }
}

int DwtBasis::level_of_row(int i) const {
    if (i < 0 || i >= length_) throw dimension_error("level_of_row: index out of range");
    if (i < coarse_count_) return -1;
    int idx = i - coarse_count_;
    for (const auto& lv : levels_) {
        const int count = lv.blocks * coarse_count_;
        if (idx < count) return lv.level;
        idx -= count;
    }
    throw dimension_error("level_of_row: index out of range");
}

DwtBasis::RowView DwtBasis::row_view(int i) const {
    if (i < 0 || i >= length_) throw dimension_error("row_view: index out of range");
    if (i < coarse_count_) return {0, std::span<const double>(coarse_[i])};
    int idx = i - coarse_count_;
    for (const auto& lv : levels_) {
        const int count = lv.blocks * coarse_count_;
        if (idx < count) {
            const int block = idx / coarse_count_;
            const int pat = idx % coarse_count_;
            return {static_cast<std::size_t>(block) * lv.block_len,
                    std::span<const double>(lv.patterns[pat])};
        }
        idx -= count;
    }
    throw dimension_error("row_view: index out of range");
}

std::vector<double> DwtBasis::row(int i) const {
    const RowView v = row_view(i);
    std::vector<double> dense(length_, 0.0);
    std::copy(v.values.begin(), v.values.end(), dense.begin() + v.offset);
    return dense;
}

DwtBasis build_basis(int length, int k) { return DwtBasis(length, k); }

std::shared_ptr<const DwtBasis> cached_basis(int length, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const DwtBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{length, k}];
    if (!slot) slot = std::make_shared<const DwtBasis>(length, k);
    return slot;
}

void forward_serial(const DwtBasis& basis, std::span<const double> x, std::span<double> out) {
    const int n = basis.length();
    if (static_cast<int>(x.size()) != n || static_cast<int>(out.size()) != n)
        throw dimension_error("forward: input length != basis length");
    int r = 0;
    for (int i = 0; i < basis.coarse_count(); ++i) {
        const auto v = basis.row_view(i);
        double s = 0.0;
        for (std::size_t t = 0; t < v.values.size(); ++t) s += v.values[t] * x[t];
        out[r++] = s;
    }
    for (const auto& lv : basis.levels()) {
        for (int b = 0; b < lv.blocks; ++b) {
            const double* xb = x.data() + static_cast<std::size_t>(b) * lv.block_len;
            for (const auto& pat : lv.patterns) {
                double s = 0.0;
                for (int t = 0; t < lv.block_len; ++t) s += pat[t] * xb[t];
                out[r++] = s;
            }
        }
    }
}

void forward_parallel(const DwtBasis& basis, std::span<const double> x, std::span<double> out) {
    const int n = basis.length();
    if (static_cast<int>(x.size()) != n || static_cast<int>(out.size()) != n)
        throw dimension_error("forward: input length != basis length");
    const int pc = basis.coarse_count();
    const auto& levels = basis.levels();
    std::vector<int> base(levels.size());
    int acc = pc;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        base[l] = acc;
        acc += levels[l].blocks * pc;
    }
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
        for (int i = 0; i < pc; ++i) {
            const auto v = basis.row_view(i);
            double s = 0.0;
            for (std::size_t t = 0; t < v.values.size(); ++t) s += v.values[t] * x[t];
            out[i] = s;
        }
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto& lv = levels[l];
#ifdef _OPENMP
#pragma omp for schedule(static) nowait
#endif
            for (int b = 0; b < lv.blocks; ++b) {
                const double* xb = x.data() + static_cast<std::size_t>(b) * lv.block_len;
                for (int p = 0; p < pc; ++p) {
                    double s = 0.0;
                    for (int t = 0; t < lv.block_len; ++t) s += lv.patterns[p][t] * xb[t];
                    out[base[l] + b * pc + p] = s;
                }
            }
        }
    }
}

CoefficientVector forward(const DwtBasis& basis, std::span<const double> x) {
    CoefficientVector c;
    c.basis_length = basis.length();
    c.values.resize(basis.length());
    forward_serial(basis, x, c.values);
    return c;
}

std::vector<double> inverse(const DwtBasis& basis, std::span<const double> coef) {
    const int n = basis.length();
    if (static_cast<int>(coef.size()) != n)
        throw dimension_error("inverse: coefficient length != basis length");
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double c = coef[i];
        if (c == 0.0) continue;
        const auto v = basis.row_view(i);
        for (std::size_t t = 0; t < v.values.size(); ++t) x[v.offset + t] += c * v.values[t];
    }
    return x;
}

double soft_threshold_scalar(double x, double lambda) {
    if (x > lambda) return x - lambda;
    if (x < -lambda) return x + lambda;
    return 0.0;
}

CoefficientVector soft_threshold(const CoefficientVector& c, double lambda) {
    if (lambda < 0.0) throw config_error("soft_threshold: lambda must be nonnegative");
    CoefficientVector out;
    out.basis_length = c.basis_length;
    out.values.reserve(c.values.size());
    for (double v : c.values) out.values.push_back(soft_threshold_scalar(v, lambda));
    return out;
}

double thresholded_sq_norm(std::span<const double> coef, double lambda) {
    if (lambda < 0.0) throw config_error("thresholded_sq_norm: lambda must be nonnegative");
    double s = 0.0;
    for (double v : coef) {
        const double t = soft_threshold_scalar(v, lambda);
        s += t * t;
    }
    return s;
}

PackView pack_view(std::span<const double> u) {
    if (u.size() < 2) throw dimension_error("pack: need length >= 2");
    const std::size_t seg = std::size_t{1} << floor_log2(static_cast<int>(u.size()));
    return {u.subspan(0, seg), u.subspan(u.size() - seg, seg)};
}

std::pair<std::vector<double>, std::vector<double>> pack(std::span<const double> u) {
    const PackView v = pack_view(u);
    return {std::vector<double>(v.first.begin(), v.first.end()),
            std::vector<double>(v.second.begin(), v.second.end())};
}

double estimate_sigma_mad(std::span<const double> y, int k) {
    const int pc = coarse_count_for(k);
    if (static_cast<int>(y.size()) < 2 * pc)
        throw dimension_error("estimate_sigma_mad: need length >= 2 * coarse_count");
    const int prefix = 1 << floor_log2(static_cast<int>(y.size()));
    auto basis = cached_basis(prefix, k);
    CoefficientVector c = forward(*basis, y.subspan(0, prefix));
    // the finest level contributes the last blocks*coarse_count coefficients
    const auto& finest = basis->levels().back();
    const int count = finest.blocks * pc;
    std::vector<double> mags;
    mags.reserve(count);
    for (int i = prefix - count; i < prefix; ++i) mags.push_back(std::fabs(c.values[i]));
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    double med = mags[mags.size() / 2];
    if (mags.size() % 2 == 0) {
        const double lo = *std::max_element(mags.begin(), mags.begin() + mags.size() / 2);
        med = 0.5 * (med + lo);
    }
    return med / 0.6745;
}

void dump_csv(const DwtBasis& basis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_csv: cannot open " + path);
    char buf[64];
    for (int i = 0; i < basis.rows(); ++i) {
        const auto dense = basis.row(i);
        for (int j = 0; j < basis.length(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", dense[j]);
            out << buf;
            out << (j + 1 == basis.length() ? '\n' : ',');
        }
    }
}

} // namespace adavaw::wavelet
