#include "adavaw/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "adavaw/errors.hpp"
#include "adavaw/wavelet.hpp"

namespace adavaw::baselines {

void BaselineConfig::validate() const {
    if (n < 1) throw config_error("BaselineConfig: horizon must be positive");
    if (kind == Kind::MovingAverage && window < 1)
        throw config_error("BaselineConfig: window must be >= 1");
    if (kind == Kind::RestartingOgd && batch_len < 0)
        throw config_error("BaselineConfig: batch_len must be >= 1 (or 0 for default)");
    if (kind == Kind::Ogd && step_scale <= 0.0)
        throw config_error("BaselineConfig: step_scale must be positive");
    if (kind == Kind::OfflineWavelet && sigma < 0.0)
        throw config_error("BaselineConfig: sigma must be nonnegative");
    if (B <= 0.0) throw config_error("BaselineConfig: B must be positive");
}

int BaselineConfig::effective_batch_len() const {
    if (batch_len > 0) return batch_len;
    const double c = std::max(1.0, C_n);
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n) / c)));
}

std::vector<double> wavelet_soft_threshold(std::span<const double> y, int k, double sigma) {
    const int n = static_cast<int>(y.size());
    const double lambda = sigma * std::sqrt(2.0 * std::log(static_cast<double>(std::max(n, 2))));
    const auto denoise = [&](std::span<const double> seg) {
        auto basis = wavelet::cached_basis(static_cast<int>(seg.size()), k);
        auto c = wavelet::forward(*basis, seg);
        for (auto& v : c.values) v = wavelet::soft_threshold_scalar(v, lambda);
        return wavelet::inverse(*basis, c.values);
    };
    if ((n & (n - 1)) == 0) return denoise(y);
    // non-dyadic length: denoise the pack segments, average on the overlap
    const auto segs = wavelet::pack_view(y);
    const auto a = denoise(segs.first);
    const auto b = denoise(segs.second);
    const int seg = static_cast<int>(a.size());
    const int off = n - seg;
    std::vector<double> out(n, 0.0);
    std::vector<double> wsum(n, 0.0);
    for (int i = 0; i < seg; ++i) {
        out[i] += a[i];
        wsum[i] += 1.0;
        out[off + i] += b[i];
        wsum[off + i] += 1.0;
    }
    for (int i = 0; i < n; ++i) out[i] /= wsum[i];
    return out;
}

policy::PolicyResult run_baseline(const BaselineConfig& config, std::span<const double> stream,
                                  std::span<const double> theta) {
    config.validate();
    if (static_cast<int>(stream.size()) < config.n)
        throw dimension_error("run_baseline: stream shorter than horizon");
    if (!theta.empty() && static_cast<int>(theta.size()) != config.n)
        throw dimension_error("run_baseline: theta length != horizon");

    const int n = config.n;
    policy::PolicyResult result;
    result.trace.reserve(n);
    double regret = 0.0;
    const auto start = std::chrono::steady_clock::now();

    auto account = [&](int t, double pred) {
        const double target = theta.empty() ? stream[t - 1] : theta[t - 1];
        regret += (pred - target) * (pred - target);
        policy::StepTrace tr;
        tr.t = t;
        tr.prediction = pred;
        tr.observation = stream[t - 1];
        tr.bin_id = 1;
        result.trace.push_back(tr);
    };

    switch (config.kind) {
    case Kind::MovingAverage: {
        std::deque<double> win;
        double sum = 0.0;
        for (int t = 1; t <= n; ++t) {
            account(t, win.empty() ? 0.0 : sum / win.size());
            win.push_back(stream[t - 1]);
            sum += stream[t - 1];
            if (static_cast<int>(win.size()) > config.window) {
                sum -= win.front();
                win.pop_front();
            }
        }
        break;
    }
    case Kind::Ogd:
    case Kind::RestartingOgd: {
        const int batch = config.kind == Kind::RestartingOgd ? config.effective_batch_len() : n;
        double x = 0.0;
        int t_in = 0;
        int restarts = 0;
        for (int t = 1; t <= n; ++t) {
            if (t_in == batch) {
                x = 0.0;
                t_in = 0;
                ++restarts;
            }
            ++t_in;
            account(t, x);
            const double grad = 2.0 * (x - stream[t - 1]);
            x -= config.step_scale / (2.0 * t_in) * grad;
            x = std::clamp(x, -config.B, config.B);
        }
        result.bins.push_back({1, n, 0.0});
        result.report.num_bins = restarts + 1;
        break;
    }
    case Kind::OfflineWavelet: {
        const auto fit = wavelet_soft_threshold(stream.subspan(0, n), config.k, config.sigma);
        for (int t = 1; t <= n; ++t) account(t, fit[t - 1]);
        break;
    }
    }

    const auto stop = std::chrono::steady_clock::now();
    result.report.regret = regret;
    result.report.n = n;
    result.report.k = config.kind == Kind::OfflineWavelet ? config.k : -1;
    if (result.report.num_bins == 0) result.report.num_bins = 1;
    result.report.beta = 0.0;
    result.report.sigma = config.sigma;
    result.report.seed = config.seed;
    result.report.wallclock_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    if (result.bins.empty()) result.bins.push_back({1, n, 0.0});
    return result;
}

} // namespace adavaw::baselines
