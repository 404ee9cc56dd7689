#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adavaw/regress.hpp"

namespace adavaw::policy {

enum class ThresholdLogBase { SegmentLength, Horizon };

struct AdaVawConfig {
    int k = 0;
    int n = 0;
    double sigma = 1.0;
    double B = 1.0;
    double beta = 0.0; // <= 0 means: use default_beta(delta, n)
    double delta = 0.1;
    ThresholdLogBase threshold_log_base = ThresholdLogBase::SegmentLength;
    std::uint64_t seed = 0;
    bool estimate_sigma = false; // pre-pass MAD estimate replaces sigma

    static double default_beta(double delta, int n);
    double effective_beta() const;
    void validate() const;
};

struct StepTrace {
    int t = 0;
    double prediction = 0.0;
    double observation = 0.0;
    bool restarted = false;
    int bin_id = 0; // 1-based; 0 for the predict-zero prefix steps
};

struct BinRecord {
    int start = 0;
    int end = 0;
    double restart_statistic = 0.0;
};

struct RegretReport {
    double regret = 0.0;
    int n = 0;
    int k = 0;
    int num_bins = 0;
    double beta = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    double wallclock_ms = 0.0;
};

// One Ada-VAW instance driven through the two-phase protocol: predict(t)
// must be called before observe(y_t), once per step, t = 1..n.
class AdaVaw {
public:
    explicit AdaVaw(const AdaVawConfig& config);

    double predict(int t);
    StepTrace observe(double y);

    // Bins discovered so far including the currently open one.
    std::vector<BinRecord> bins() const;
    int steps_done() const { return next_t_ - 1; }
    double sigma_used() const { return sigma_; }
    const AdaVawConfig& config() const { return config_; }

private:
    regress::MonomialFeature feature_for(int t) const;
    void init_bin_state();
    void evaluate_restart(StepTrace& trace);

    AdaVawConfig config_;
    double sigma_;
    double beta_;
    int coarse_count_;
    int first_loop_t_;

    int next_t_ = 1;
    bool awaiting_observe_ = false;
    double pending_prediction_ = 0.0;

    int t_h_;
    int bin_id_ = 1;
    bool vaw_ready_ = false;
    regress::VawState vaw_;
    double last_stat_ = 0.0;

    std::vector<double> ys_;
    std::vector<BinRecord> closed_bins_;
    regress::RecenterEngine recenter_;
    std::vector<double> coef_buf_;
};

struct PolicyResult {
    RegretReport report;
    std::vector<StepTrace> trace;
    std::vector<BinRecord> bins;
};

// Runs one instance over a full stream. Regret is against theta when
// provided, else against the observations.
PolicyResult run_policy(const AdaVawConfig& config, std::span<const double> stream,
                        std::span<const double> theta = {});

struct MetaResult {
    RegretReport report;              // meta dynamic regret when theta known
    double eta = 0.0;
    double meta_loss_y = 0.0;         // cumulative (y - meta prediction)^2
    std::vector<double> instance_loss_y;     // per k = 0..3
    std::vector<double> instance_regret;     // vs theta when known
    std::vector<double> final_weights;
    std::vector<StepTrace> trace;
};

// Exponentially weighted aggregation over Ada-VAW instances with k = 0..3.
MetaResult meta_ewa(const AdaVawConfig& base, std::span<const double> stream,
                    std::span<const double> theta = {});

struct MultidimResult {
    RegretReport total;
    std::vector<RegretReport> per_coordinate;
};

// d independent instances, one per coordinate stream; total regret is the
// sum of the coordinate regrets.
MultidimResult run_multidim(const AdaVawConfig& config,
                            const std::vector<std::vector<double>>& streams,
                            const std::vector<std::vector<double>>& theta = {});

// CSV serialization: header t,y,theta,prediction,restarted,bin_id. theta
// written blank when unknown.
void write_trace_csv(std::ostream& out, std::span<const StepTrace> trace,
                     std::span<const double> theta = {});
std::string report_to_json(const RegretReport& report);

} // namespace adavaw::policy
