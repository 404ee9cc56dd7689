#include "adavaw/policy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "adavaw/errors.hpp"
#include "adavaw/wavelet.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adavaw::policy {

double AdaVawConfig::default_beta(double delta, int n) {
    return 24.0 + 8.0 * std::log(8.0 / delta) / std::log(static_cast<double>(std::max(n, 2)));
}

double AdaVawConfig::effective_beta() const {
    return beta > 0.0 ? beta : default_beta(delta, n);
}

void AdaVawConfig::validate() const {
    if (k < 0) throw config_error("AdaVawConfig: k must be nonnegative");
    if (n < 1) throw config_error("AdaVawConfig: horizon must be positive");
    if (sigma < 0.0) throw config_error("AdaVawConfig: sigma must be nonnegative");
    if (B <= 0.0) throw config_error("AdaVawConfig: B must be positive");
    if (delta <= 0.0 || delta > 1.0) throw config_error("AdaVawConfig: delta must be in (0, 1]");
}

AdaVaw::AdaVaw(const AdaVawConfig& config)
    : config_(config),
      sigma_(config.sigma),
      beta_(config.effective_beta()),
      coarse_count_(wavelet::coarse_count_for(config.k)),
      first_loop_t_(std::max(config.k, 1)),
      t_h_(std::max(config.k, 1)),
      vaw_(config.k) {
    config_.validate();
    ys_.reserve(config_.n);
}

regress::MonomialFeature AdaVaw::feature_for(int t) const {
    return {t - t_h_ + config_.k + 1, config_.k};
}

void AdaVaw::init_bin_state() {
    vaw_ = regress::VawState(config_.k);
    for (int s = std::max(1, t_h_ - config_.k); s < t_h_; ++s) {
        const auto f = feature_for(s);
        vaw_.absorb_feature(f);
        vaw_.absorb_label(f, ys_[s - 1]);
    }
    vaw_ready_ = true;
    last_stat_ = 0.0;
}

double AdaVaw::predict(int t) {
    if (awaiting_observe_) throw protocol_error("predict called twice without observe");
    if (t != next_t_)
        throw protocol_error("predict: expected t = " + std::to_string(next_t_) +
                             ", got " + std::to_string(t));
    if (t > config_.n) throw protocol_error("predict: horizon exhausted");

    double prediction = 0.0;
    if (t >= first_loop_t_) {
        if (!vaw_ready_) init_bin_state();
        const auto f = feature_for(t);
        vaw_.absorb_feature(f);
        prediction = vaw_.predict(f);
    }
    awaiting_observe_ = true;
    pending_prediction_ = prediction;
    return prediction;
}

void AdaVaw::evaluate_restart(StepTrace& trace) {
    const int t = trace.t;
    const int w_start = std::max(1, t_h_ - config_.k);
    const int len = t - w_start + 1;
    if (len < 2 * coarse_count_) {
        last_stat_ = 0.0;
        return;
    }
    const std::span<const double> window(ys_.data() + (w_start - 1), len);
    double wmax = 0.0;
    for (double v : window) wmax = std::max(wmax, std::fabs(v));

    const auto residual = recenter_.residual(window, config_.k);
    const auto segs = wavelet::pack_view(residual);
    const int seg_len = static_cast<int>(segs.first.size());
    const auto basis = wavelet::cached_basis(seg_len, config_.k);
    const double log_len = config_.threshold_log_base == ThresholdLogBase::Horizon
                               ? std::log(static_cast<double>(std::max(config_.n, 2)))
                               : std::log(static_cast<double>(seg_len));
    const double lambda = sigma_ * std::sqrt(beta_ * log_len);

    coef_buf_.resize(seg_len);
    wavelet::forward_serial(*basis, segs.first, coef_buf_);
    double stat = std::sqrt(wavelet::thresholded_sq_norm(coef_buf_, lambda));
    wavelet::forward_serial(*basis, segs.second, coef_buf_);
    stat += std::sqrt(wavelet::thresholded_sq_norm(coef_buf_, lambda));
    last_stat_ = stat;

    // the floor keeps sigma = 0 runs from restarting on OLS rounding noise
    const double floor = 1e-9 * (1.0 + wmax);
    if (stat > std::max(sigma_, floor)) {
        closed_bins_.push_back({t_h_, t, stat});
        trace.restarted = true;
        t_h_ = t + 1;
        ++bin_id_;
        vaw_ready_ = false;
    }
}

StepTrace AdaVaw::observe(double y) {
    if (!awaiting_observe_) throw protocol_error("observe called before predict");
    const int t = next_t_;
    ys_.push_back(y);

    StepTrace trace;
    trace.t = t;
    trace.prediction = pending_prediction_;
    trace.observation = y;
    trace.restarted = false;
    trace.bin_id = t >= first_loop_t_ ? bin_id_ : 0;

    if (t >= first_loop_t_) {
        vaw_.absorb_label(feature_for(t), y);
        evaluate_restart(trace);
    }

    awaiting_observe_ = false;
    ++next_t_;
    return trace;
}

std::vector<BinRecord> AdaVaw::bins() const {
    std::vector<BinRecord> all = closed_bins_;
    const int last_t = next_t_ - 1;
    if (last_t >= t_h_) all.push_back({t_h_, last_t, last_stat_});
    return all;
}

PolicyResult run_policy(const AdaVawConfig& config, std::span<const double> stream,
                        std::span<const double> theta) {
    config.validate();
    if (static_cast<int>(stream.size()) < config.n)
        throw dimension_error("run_policy: stream shorter than horizon");
    if (!theta.empty() && static_cast<int>(theta.size()) != config.n)
        throw dimension_error("run_policy: theta length != horizon");

    AdaVawConfig effective = config;
    if (config.estimate_sigma) {
        const int prefix = std::min(config.n, 512);
        effective.sigma = wavelet::estimate_sigma_mad(stream.subspan(0, prefix), config.k);
        effective.estimate_sigma = false;
    }

    const auto start = std::chrono::steady_clock::now();
    AdaVaw policy(effective);
    PolicyResult result;
    result.trace.reserve(config.n);
    double regret = 0.0;
    for (int t = 1; t <= config.n; ++t) {
        const double p = policy.predict(t);
        const StepTrace tr = policy.observe(stream[t - 1]);
        const double target = theta.empty() ? stream[t - 1] : theta[t - 1];
        regret += (p - target) * (p - target);
        result.trace.push_back(tr);
    }
    const auto stop = std::chrono::steady_clock::now();

    result.bins = policy.bins();
    result.report.regret = regret;
    result.report.n = config.n;
    result.report.k = config.k;
    result.report.num_bins = static_cast<int>(result.bins.size());
    result.report.beta = effective.effective_beta();
    result.report.sigma = policy.sigma_used();
    result.report.seed = config.seed;
    result.report.wallclock_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    return result;
}

MetaResult meta_ewa(const AdaVawConfig& base, std::span<const double> stream,
                    std::span<const double> theta) {
    const int n = base.n;
    if (static_cast<int>(stream.size()) < n)
        throw dimension_error("meta_ewa: stream shorter than horizon");
    constexpr int kInstances = 4;

    const double envelope = base.B + std::sqrt(2.0 * std::log(2.0 * double(n) * double(n)));
    const double eta = 1.0 / (4.0 * envelope * envelope);

    std::vector<AdaVaw> instances;
    instances.reserve(kInstances);
    for (int k = 0; k < kInstances; ++k) {
        AdaVawConfig c = base;
        c.k = k;
        instances.emplace_back(c);
    }

    MetaResult result;
    result.eta = eta;
    result.instance_loss_y.assign(kInstances, 0.0);
    result.instance_regret.assign(kInstances, 0.0);
    result.trace.reserve(n);

    std::vector<double> log_w(kInstances, 0.0);
    std::vector<double> preds(kInstances, 0.0);
    double meta_regret = 0.0;

    const auto start = std::chrono::steady_clock::now();
    for (int t = 1; t <= n; ++t) {
        double lw_max = log_w[0];
        for (double v : log_w) lw_max = std::max(lw_max, v);
        double wsum = 0.0, meta_pred = 0.0;
        for (int i = 0; i < kInstances; ++i) {
            preds[i] = instances[i].predict(t);
            const double w = std::exp(log_w[i] - lw_max);
            wsum += w;
            meta_pred += w * preds[i];
        }
        meta_pred /= wsum;

        const double y = stream[t - 1];
        for (int i = 0; i < kInstances; ++i) {
            instances[i].observe(y);
            const double ly = (y - preds[i]) * (y - preds[i]);
            result.instance_loss_y[i] += ly;
            log_w[i] -= eta * ly;
            if (!theta.empty()) {
                const double d = preds[i] - theta[t - 1];
                result.instance_regret[i] += d * d;
            }
        }
        result.meta_loss_y += (y - meta_pred) * (y - meta_pred);
        const double target = theta.empty() ? y : theta[t - 1];
        meta_regret += (meta_pred - target) * (meta_pred - target);

        StepTrace tr;
        tr.t = t;
        tr.prediction = meta_pred;
        tr.observation = y;
        result.trace.push_back(tr);
    }
    const auto stop = std::chrono::steady_clock::now();

    double lw_max = log_w[0];
    for (double v : log_w) lw_max = std::max(lw_max, v);
    double wsum = 0.0;
    result.final_weights.assign(kInstances, 0.0);
    for (int i = 0; i < kInstances; ++i) {
        result.final_weights[i] = std::exp(log_w[i] - lw_max);
        wsum += result.final_weights[i];
    }
    for (double& w : result.final_weights) w /= wsum;

    result.report.regret = meta_regret;
    result.report.n = n;
    result.report.k = -1;
    result.report.num_bins = 0;
    result.report.beta = base.effective_beta();
    result.report.sigma = base.sigma;
    result.report.seed = base.seed;
    result.report.wallclock_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    return result;
}

MultidimResult run_multidim(const AdaVawConfig& config,
                            const std::vector<std::vector<double>>& streams,
                            const std::vector<std::vector<double>>& theta) {
    const int d = static_cast<int>(streams.size());
    if (d == 0) throw dimension_error("run_multidim: no streams");
    for (const auto& s : streams)
        if (static_cast<int>(s.size()) != config.n)
            throw dimension_error("run_multidim: ragged streams");
    if (!theta.empty() && static_cast<int>(theta.size()) != d)
        throw dimension_error("run_multidim: theta coordinate count mismatch");

    MultidimResult result;
    result.per_coordinate.resize(d);
    const auto start = std::chrono::steady_clock::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < d; ++i) {
        const std::span<const double> th =
            theta.empty() ? std::span<const double>{} : std::span<const double>(theta[i]);
        result.per_coordinate[i] = run_policy(config, streams[i], th).report;
    }
    const auto stop = std::chrono::steady_clock::now();

    result.total = result.per_coordinate[0];
    result.total.regret = 0.0;
    result.total.num_bins = 0;
    for (const auto& r : result.per_coordinate) {
        result.total.regret += r.regret;
        result.total.num_bins += r.num_bins;
    }
    result.total.wallclock_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    return result;
}

void write_trace_csv(std::ostream& out, std::span<const StepTrace> trace,
                     std::span<const double> theta) {
    out << "t,y,theta,prediction,restarted,bin_id\n";
    char buf[64];
    for (const auto& tr : trace) {
        out << tr.t << ',';
        std::snprintf(buf, sizeof buf, "%.17g", tr.observation);
        out << buf << ',';
        if (!theta.empty()) {
            std::snprintf(buf, sizeof buf, "%.17g", theta[tr.t - 1]);
            out << buf;
        }
        out << ',';
        std::snprintf(buf, sizeof buf, "%.17g", tr.prediction);
        out << buf << ',' << (tr.restarted ? 1 : 0) << ',' << tr.bin_id << '\n';
    }
}

std::string report_to_json(const RegretReport& report) {
    nlohmann::json j;
    j["regret"] = report.regret;
    j["n"] = report.n;
    j["k"] = report.k;
    j["num_bins"] = report.num_bins;
    j["beta"] = report.beta;
    j["sigma"] = report.sigma;
    j["seed"] = report.seed;
    j["wallclock_ms"] = report.wallclock_ms;
    return j.dump(2);
}

} // namespace adavaw::policy
