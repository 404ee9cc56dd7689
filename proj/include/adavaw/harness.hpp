#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adavaw/baselines.hpp"
#include "adavaw/generators.hpp"
#include "adavaw/policy.hpp"

namespace adavaw::harness {

// One forecaster entry of a sweep. sigma/B default to the experiment's
// observation model; C_n = 0 derives the budget from the realized theta.
struct PolicySpec {
    std::string name;
    std::string type; // adavaw | meta | moving_average | ogd | restarting_ogd | offline_wavelet
    int k = 0;
    double sigma = -1.0;
    double B = 0.0;
    double beta = 0.0;
    double delta = 0.1;
    bool estimate_sigma = false;
    policy::ThresholdLogBase threshold_log_base = policy::ThresholdLogBase::SegmentLength;
    int window = 8;
    int batch_len = 0;
    double C_n = 0.0;
};

struct ExperimentConfig {
    gen::GeneratorSpec generator; // n is overridden by the grid entries
    double sigma = 0.25;
    gen::NoiseKind noise = gen::NoiseKind::Gaussian;
    std::vector<PolicySpec> policies;
    std::vector<int> n_grid;
    std::vector<std::uint64_t> seeds;
    std::string output_dir; // empty: keep results in memory only
    int threads = 1;

    void validate() const;
};

struct CellResult {
    std::string policy;
    int n = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    policy::RegretReport report;
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> points; // (log n, log median regret)
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    // median regret per (policy, n)
    std::map<std::string, std::map<int, double>> medians;
    std::string summary_csv;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Least squares on (log n, log median regret). Requires >= 4 horizons
// spanning at least a factor of 16.
ScalingFit fit_scaling(const std::map<int, double>& median_by_n);

struct PaddingDemo {
    double packed_tv = 0.0; // max over the two pack segments
    double zero_pad_tv = 0.0;
    double mirror_pad_tv = 0.0;
    bool degenerate = false; // window length already a power of two
};

// Compares the TV order-k cost of the packing scheme against zero and
// mirror padding on a raw window.
PaddingDemo padding_demo(std::span<const double> window, int k);

// Recomputes sum (prediction - theta)^2 from a trace.csv written by the
// policy runner; used to cross-check regret accounting.
double regret_from_trace_csv(const std::string& path);

// Runs one cell: generate, add noise, run the configured forecaster.
CellResult run_cell(const ExperimentConfig& config, const PolicySpec& spec, int n,
                    std::uint64_t seed, bool write_files);

} // namespace adavaw::harness
