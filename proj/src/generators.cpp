#include "adavaw/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "adavaw/errors.hpp"
#include "adavaw/linalg.hpp"

namespace adavaw::gen {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// J sorted knot fractions in (lo, hi) with a minimum pairwise gap.
std::vector<double> knot_fractions(std::mt19937_64& rng, int count, double lo, double hi,
                                   double min_gap) {
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> c;
    int attempts = 0;
    while (static_cast<int>(c.size()) < count) {
        if (++attempts > 100000)
            throw generation_error("generator: could not place knots with the required gap");
        const double x = unif(rng);
        bool ok = true;
        for (double v : c)
            if (std::fabs(v - x) < min_gap) ok = false;
        if (ok) c.push_back(x);
    }
    std::sort(c.begin(), c.end());
    return c;
}

std::vector<double> truncated_power_series(int n, int k, const std::vector<double>& cuts,
                                           const std::vector<double>& coefs) {
    std::vector<double> theta(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1.0) / n;
        double v = 0.0;
        for (std::size_t j = 0; j < cuts.size(); ++j) {
            const double d = x - cuts[j];
            if (d > 0.0) v += coefs[j] * std::pow(d, k);
        }
        theta[i] = v;
    }
    return theta;
}

series::TimeSeries wrap(std::vector<double> theta) {
    series::TimeSeries ts;
    ts.n = static_cast<int>(theta.size());
    ts.theta = std::move(theta);
    return ts;
}

void check_bounded(const std::vector<double>& theta, double B, const char* kind) {
    const double m = linalg::norm_inf(theta);
    if (m > B + 1e-12)
        throw generation_error(std::string(kind) + ": generated sequence exceeds B (" +
                               std::to_string(m) + " > " + std::to_string(B) + ")");
}

std::vector<double> gen_piecewise_poly(const GeneratorSpec& spec, std::mt19937_64& rng) {
    const int n = spec.n, k = spec.k, J = spec.knots;
    std::uniform_real_distribution<double> coef(-spec.coeff_range, spec.coeff_range);
    std::vector<double> theta(n, 0.0);
    if (spec.continuous && k >= 1) {
        // spline with C^{k-1} smoothness: base polynomial plus kinked tails
        const auto cuts = knot_fractions(rng, J, 0.05, 0.95, (k + 2.0) * 2.0 / n);
        std::vector<double> amps(J);
        for (auto& a : amps) a = coef(rng);
        std::vector<double> base(k + 1);
        for (auto& c : base) c = coef(rng);
        theta = truncated_power_series(n, k, cuts, amps);
        for (int i = 0; i < n; ++i) {
            const double x = (i + 1.0) / n;
            double p = 0.0, xp = 1.0;
            for (int d = 0; d <= k; ++d) {
                p += base[d] * xp;
                xp *= x;
            }
            theta[i] += p;
        }
    } else {
        // independent polynomial pieces (k = 0 pieces are plain levels)
        std::vector<int> cut_idx;
        const auto cuts = knot_fractions(rng, J, 0.05, 0.95, (k + 2.0) * 2.0 / n);
        for (double c : cuts) cut_idx.push_back(static_cast<int>(c * n));
        cut_idx.push_back(n);
        int start = 0;
        for (int piece = 0; piece <= J; ++piece) {
            const int end = cut_idx[piece];
            std::vector<double> pc(k + 1);
            for (auto& c : pc) c = coef(rng);
            for (int i = start; i < end; ++i) {
                const double x = static_cast<double>(i - start + 1) / std::max(1, end - start);
                double p = 0.0, xp = 1.0;
                for (int d = 0; d <= k; ++d) {
                    p += pc[d] * xp;
                    xp *= x;
                }
                theta[i] = p;
            }
            start = end;
        }
    }
    // rescale into the sup-norm ball, preserving knots and degrees
    const double m = linalg::norm_inf(theta);
    if (m > spec.B) {
        const double s = 0.95 * spec.B / m;
        for (double& v : theta) v *= s;
    }
    return theta;
}

std::vector<double> gen_sampled_continuous(const GeneratorSpec& spec, std::mt19937_64& rng) {
    const int n = spec.n, k = spec.k;
    const int J = std::max(1, spec.segments - 1);
    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::bernoulli_distribution flip(0.5);
    const auto cuts = knot_fractions(rng, J, 0.1, 0.9, 0.25 / J);
    std::vector<double> amps(J);
    double total = 0.0;
    double sign = flip(rng) ? 1.0 : -1.0;
    for (auto& a : amps) {
        // alternating kink signs keep the zigzag profile inside the sup-norm
        // ball for any radius
        a = mag(rng) * sign;
        sign = -sign;
        total += std::fabs(a);
    }
    // continuous TV^k of sum a_j (x - c_j)_+^k is k! sum |a_j|; normalize
    // to the requested radius so the discrete tv_k converges to it
    const double scale = spec.radius / (factorial(k) * total);
    for (auto& a : amps) a *= scale;
    auto theta = truncated_power_series(n, k, cuts, amps);
    check_bounded(theta, spec.B, "sampled_continuous");
    return theta;
}

std::vector<double> gen_smoothness_ball(const GeneratorSpec& spec, std::mt19937_64& rng,
                                        bool sobolev) {
    const int n = spec.n, k = spec.k;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> g(n - k - 1);
    for (auto& v : g) v = gauss(rng);
    const double nk = std::pow(static_cast<double>(n), k);
    const double norm = sobolev ? linalg::norm2(g) : linalg::norm_inf(g);
    if (norm == 0.0) throw generation_error("smoothness ball: degenerate draw");
    const double s = spec.radius / (nk * norm);
    for (auto& v : g) v *= s;
    // integrate k+1 times with zero initial values
    std::vector<double> theta(g);
    for (int pass = 0; pass <= k; ++pass) {
        std::vector<double> next(theta.size() + 1, 0.0);
        for (std::size_t i = 0; i < theta.size(); ++i) next[i + 1] = next[i] + theta[i];
        theta = std::move(next);
    }
    if (linalg::norm_inf(theta) > spec.B)
        throw generation_error(
            "smoothness ball: radius forces sup norm above B; shrink the radius");
    return theta;
}

std::vector<double> gen_exact_sparse(const GeneratorSpec& spec, std::mt19937_64& rng) {
    const int n = spec.n, k = spec.k, J = spec.knots;
    if (J < 1) throw config_error("exact_sparse: J must be >= 1");
    const int per_step = k + 1;
    const int steps = J / per_step;
    const int rem = J % per_step;
    const int gap = 2 * (k + 2);
    const int tail = 12 * (k + 2); // reserved zone for the leftover component
    if (n < (steps + 2) * gap + tail + 2 * (k + 2))
        throw generation_error("exact_sparse: horizon too short for the requested J");

    // positions are drawn as horizon fractions so one seed describes the
    // same ground-truth shape at every n
    std::uniform_real_distribution<double> frac(0.02, 0.9);
    const double min_gap_frac = std::min(0.02, 0.4 / std::max(1, steps));
    std::vector<double> fracs;
    int attempts = 0;
    while (static_cast<int>(fracs.size()) < steps) {
        if (++attempts > 100000)
            throw generation_error("exact_sparse: could not place change points");
        const double f = frac(rng);
        bool ok = true;
        for (double v : fracs)
            if (std::fabs(v - f) < min_gap_frac) ok = false;
        if (ok) fracs.push_back(f);
    }
    std::sort(fracs.begin(), fracs.end());
    std::vector<int> at;
    for (double f : fracs)
        at.push_back(std::clamp(static_cast<int>(f * n), k + 2, n - tail - k - 2));
    for (std::size_t i = 1; i < at.size(); ++i)
        if (at[i] - at[i - 1] < gap)
            throw generation_error("exact_sparse: horizon too short for the drawn layout");

    std::uniform_real_distribution<double> mag(0.4, 1.0);
    std::bernoulli_distribution flip(0.5);
    std::vector<double> theta(n, 0.0);

    // level jumps contribute k+1 nonzeros of D^{k+1} each
    double level = 0.0;
    for (int s = 0; s < steps; ++s) {
        double h = mag(rng) * (flip(rng) ? 1.0 : -1.0) * spec.B * 0.6;
        if (std::fabs(level + h) > 0.8 * spec.B) h = -h;
        level += h;
        for (int i = at[s]; i <= n; ++i) theta[i - 1] += h;
    }
    // one truncated power of degree d = k+1-rem adds the remaining rem
    // nonzeros; it lives near the end so its difference entries stay well
    // above the jump-counting tolerance
    if (rem > 0) {
        const int d = k + 1 - rem;
        std::uniform_real_distribution<double> tf(0.0, 1.0);
        const int m = n - tail + static_cast<int>(tf(rng) * (tail - k - 2));
        const double reach = std::pow(static_cast<double>(n - m + d), d);
        const double a = (flip(rng) ? 1.0 : -1.0) * 0.15 * spec.B / reach;
        for (int i = m; i <= n; ++i) {
            // discrete truncated power: product form of C(i - m + d, d) * d!
            double v = 1.0;
            for (int q = 0; q < d; ++q) v *= (i - m + d - q);
            theta[i - 1] += a * v;
        }
    }
    const double m = linalg::norm_inf(theta);
    if (m > spec.B)
        for (double& v : theta) v *= 0.95 * spec.B / m;
    return theta;
}

std::vector<double> gen_alternating(const GeneratorSpec& spec, std::mt19937_64& rng) {
    const int n = spec.n;
    const int M = std::min(spec.alternating_steps, n);
    const double B = spec.B;
    std::uniform_int_distribution<int> three(0, 2);
    std::uniform_int_distribution<int> two(0, 1);
    const double states[3] = {-B, 0.0, B};
    std::vector<double> theta(n, 0.0);
    double cur = states[three(rng)];
    theta[0] = cur;
    for (int t = 2; t <= n; ++t) {
        if (t <= M) {
            double options[2];
            int c = 0;
            for (double s : states)
                if (s != cur) options[c++] = s;
            cur = options[two(rng)];
        }
        theta[t - 1] = cur;
    }
    return theta;
}

} // namespace

void GeneratorSpec::validate() const {
    if (n < k + 2) throw config_error("GeneratorSpec: need n >= k + 2");
    if (k < 0) throw config_error("GeneratorSpec: k must be nonnegative");
    if (B <= 0.0) throw config_error("GeneratorSpec: B must be positive");
    if (kind == Kind::Constant && std::fabs(constant) > B)
        throw config_error("GeneratorSpec: |constant| exceeds B");
}

series::TimeSeries generate(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::vector<double> theta;
    switch (spec.kind) {
    case Kind::Constant:
        theta.assign(spec.n, spec.constant);
        break;
    case Kind::PiecewisePoly:
        theta = gen_piecewise_poly(spec, rng);
        break;
    case Kind::SampledContinuous:
        theta = gen_sampled_continuous(spec, rng);
        break;
    case Kind::Sobolev:
        theta = gen_smoothness_ball(spec, rng, true);
        break;
    case Kind::Holder:
        theta = gen_smoothness_ball(spec, rng, false);
        break;
    case Kind::ExactSparse:
        theta = gen_exact_sparse(spec, rng);
        break;
    case Kind::Alternating:
        theta = gen_alternating(spec, rng);
        break;
    }
    check_bounded(theta, spec.B, "generate");

    // post-hoc class verification on the realized sequence
    const auto prof = series::variational_profile(theta, spec.k);
    switch (spec.kind) {
    case Kind::Constant:
        if (prof.jumps != 0 || prof.tv_k > 1e-9)
            throw generation_error("constant: nonzero variation");
        break;
    case Kind::ExactSparse:
        if (prof.jumps != spec.knots)
            throw generation_error("exact_sparse: realized jumps " +
                                   std::to_string(prof.jumps) + " != J " +
                                   std::to_string(spec.knots));
        break;
    case Kind::PiecewisePoly:
        if (prof.jumps > (spec.k + 2) * spec.knots)
            throw generation_error("piecewise_poly: too many realized jumps");
        break;
    case Kind::SampledContinuous:
        if (prof.tv_k < 0.5 * spec.radius || prof.tv_k > 2.0 * spec.radius)
            throw generation_error("sampled_continuous: tv_k far from target radius");
        break;
    case Kind::Sobolev: {
        const double got = prof.sobolev;
        if (std::fabs(got - spec.radius) > 1e-6 * spec.radius)
            throw generation_error("sobolev: realized radius mismatch");
        break;
    }
    case Kind::Holder: {
        const double got = prof.holder;
        if (std::fabs(got - spec.radius) > 1e-6 * spec.radius)
            throw generation_error("holder: realized radius mismatch");
        break;
    }
    case Kind::Alternating:
        break;
    }
    return wrap(std::move(theta));
}

series::TimeSeries add_noise(const series::TimeSeries& ts, double sigma, NoiseKind kind,
                             std::uint64_t seed) {
    ts.validate();
    if (!ts.theta) throw dimension_error("add_noise: theta missing");
    if (sigma < 0.0) throw config_error("add_noise: sigma must be nonnegative");
    series::TimeSeries out = ts;
    std::mt19937_64 rng(seed);
    std::vector<double> y(*ts.theta);
    if (sigma > 0.0) {
        if (kind == NoiseKind::Gaussian) {
            std::normal_distribution<double> gauss(0.0, sigma);
            for (auto& v : y) v += gauss(rng);
        } else {
            const double a = sigma * std::sqrt(3.0);
            std::uniform_real_distribution<double> unif(-a, a);
            for (auto& v : y) v += unif(rng);
        }
    }
    out.y = std::move(y);
    return out;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace adavaw::gen
