#pragma once

#include <span>

#include "adavaw/policy.hpp"

namespace adavaw::baselines {

enum class Kind { MovingAverage, Ogd, RestartingOgd, OfflineWavelet };

struct BaselineConfig {
    Kind kind = Kind::MovingAverage;
    int n = 0;
    int window = 1;      // moving_average
    int batch_len = 0;   // restarting_ogd; 0 means derive from C_n
    double step_scale = 1.0; // ogd step = step_scale / (2 t)
    int k = 0;           // offline_wavelet
    double B = 1.0;      // projection bound for OGD variants
    double sigma = 0.0;  // offline_wavelet threshold scale
    double C_n = 1.0;    // variational budget for the batch length default
    std::uint64_t seed = 0;

    void validate() const;
    int effective_batch_len() const;
};

// Runs a comparator forecaster over a stream. offline_wavelet is a batch
// oracle: it sees the whole stream and reports its MSE as regret.
policy::PolicyResult run_baseline(const BaselineConfig& config, std::span<const double> stream,
                                  std::span<const double> theta = {});

// The batch estimator behind the offline_wavelet baseline: DWT, soft
// threshold at sigma sqrt(2 log n), inverse. Handles non-dyadic lengths by
// denoising the two pack segments and averaging them on the overlap.
std::vector<double> wavelet_soft_threshold(std::span<const double> y, int k, double sigma);

} // namespace adavaw::baselines
