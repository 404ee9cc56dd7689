#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adavaw/baselines.hpp"
#include "adavaw/errors.hpp"
#include "adavaw/generators.hpp"
#include "adavaw/harness.hpp"
#include "adavaw/io.hpp"
#include "adavaw/policy.hpp"
#include "adavaw/wavelet.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adavaw;

namespace {

gen::Kind generator_kind(const std::string& s) {
    if (s == "piecewise_poly") return gen::Kind::PiecewisePoly;
    if (s == "sampled_continuous") return gen::Kind::SampledContinuous;
    if (s == "sobolev") return gen::Kind::Sobolev;
    if (s == "holder") return gen::Kind::Holder;
    if (s == "exact_sparse") return gen::Kind::ExactSparse;
    if (s == "alternating") return gen::Kind::Alternating;
    if (s == "constant") return gen::Kind::Constant;
    throw config_error("unknown generator kind: " + s);
}

int cmd_generate(const CLI::App* cmd, const std::string& config_path, std::string kind,
                 int n, int k, double B, std::uint64_t seed, int knots, int segments,
                 double radius, double constant, int alt_steps, double coeff_range,
                 bool discontinuous, double sigma, std::string noise, const std::string& out) {
    gen::GeneratorSpec spec;
    double eff_sigma = 0.0;
    if (!config_path.empty()) {
        const auto cfg = harness::parse_experiment_config(io::read_file(config_path));
        spec = cfg.generator;
        eff_sigma = cfg.sigma;
    }
    // flags passed on the command line override the config block
    if (cmd->count("--kind")) spec.kind = generator_kind(kind);
    else if (config_path.empty()) spec.kind = generator_kind(kind);
    if (cmd->count("--n") || config_path.empty() || spec.n <= 0) spec.n = n;
    if (cmd->count("--k") || config_path.empty()) spec.k = k;
    if (cmd->count("--B") || config_path.empty()) spec.B = B;
    if (cmd->count("--knots") || config_path.empty()) spec.knots = knots;
    if (cmd->count("--segments") || config_path.empty()) spec.segments = segments;
    if (cmd->count("--radius") || config_path.empty()) spec.radius = radius;
    if (cmd->count("--constant") || config_path.empty()) spec.constant = constant;
    if (cmd->count("--M") || config_path.empty()) spec.alternating_steps = alt_steps;
    if (cmd->count("--coeff-range") || config_path.empty()) spec.coeff_range = coeff_range;
    if (cmd->count("--discontinuous") || config_path.empty()) spec.continuous = !discontinuous;
    if (cmd->count("--sigma")) eff_sigma = sigma;
    spec.seed = seed;

    auto ts = gen::generate(spec);
    if (eff_sigma > 0.0) {
        const auto nk = noise == "uniform_bounded" ? gen::NoiseKind::UniformBounded
                                                   : gen::NoiseKind::Gaussian;
        ts = gen::add_noise(ts, eff_sigma, nk, gen::mix_seed(seed, 0xad, 0x0e));
    }
    io::write_series_csv(out, *ts.theta, ts.y ? &*ts.y : nullptr);
    std::printf("wrote %s (n=%d)\n", out.c_str(), ts.n);
    return 0;
}

int cmd_run(const std::string& input, const std::string& out_dir, const std::string& type,
            int k, double sigma, double B, double beta, double delta, bool estimate_sigma,
            const std::string& log_base, int window, int batch_len, double c_n,
            std::uint64_t seed) {
    const auto data = io::read_series_csv(input);
    if (!data.y) throw config_error("run: input file has no y column");
    const int n = static_cast<int>(data.y->size());
    const std::span<const double> stream(*data.y);
    const std::span<const double> theta =
        data.theta ? std::span<const double>(*data.theta) : std::span<const double>{};

    policy::PolicyResult res;
    if (type == "adavaw" || type == "meta") {
        policy::AdaVawConfig pc;
        pc.k = k;
        pc.n = n;
        pc.sigma = sigma;
        pc.B = B;
        pc.beta = beta;
        pc.delta = delta;
        pc.seed = seed;
        pc.estimate_sigma = estimate_sigma;
        pc.threshold_log_base = log_base == "horizon" ? policy::ThresholdLogBase::Horizon
                                                      : policy::ThresholdLogBase::SegmentLength;
        if (type == "adavaw") {
            res = policy::run_policy(pc, stream, theta);
        } else {
            auto meta = policy::meta_ewa(pc, stream, theta);
            res.report = meta.report;
            res.trace = std::move(meta.trace);
        }
    } else {
        baselines::BaselineConfig bc;
        bc.n = n;
        bc.window = window;
        bc.batch_len = batch_len;
        bc.k = k;
        bc.B = B;
        bc.sigma = sigma;
        bc.C_n = c_n;
        bc.seed = seed;
        if (type == "moving_average") bc.kind = baselines::Kind::MovingAverage;
        else if (type == "ogd") bc.kind = baselines::Kind::Ogd;
        else if (type == "restarting_ogd") bc.kind = baselines::Kind::RestartingOgd;
        else if (type == "offline_wavelet") bc.kind = baselines::Kind::OfflineWavelet;
        else throw config_error("unknown policy type: " + type);
        res = baselines::run_baseline(bc, stream, theta);
    }

    const auto report_json = policy::report_to_json(res.report);
    if (!out_dir.empty()) {
        std::ostringstream trace;
        policy::write_trace_csv(trace, res.trace, theta);
        io::atomic_write((fs::path(out_dir) / "trace.csv").string(), trace.str());
        io::atomic_write((fs::path(out_dir) / "report.json").string(), report_json + "\n");
    }
    std::cout << report_json << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int threads,
              bool emit_plot_data) {
    auto cfg = harness::parse_experiment_config(io::read_file(config_path));
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    const auto result = harness::run_experiment(cfg);

    int failures = 0;
    for (const auto& c : result.cells)
        if (!c.ok) {
            ++failures;
            std::fprintf(stderr, "cell %s n=%d seed=%llu failed: %s\n", c.policy.c_str(), c.n,
                         static_cast<unsigned long long>(c.seed), c.error.c_str());
        }

    json fits = json::object();
    for (const auto& [policy, by_n] : result.medians) {
        if (by_n.size() >= 4 && by_n.rbegin()->first >= 16 * by_n.begin()->first) {
            const auto fit = harness::fit_scaling(by_n);
            fits[policy] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
        }
    }
    if (!cfg.output_dir.empty() && !fits.empty())
        io::atomic_write((fs::path(cfg.output_dir) / "fits.json").string(), fits.dump(2) + "\n");

    if (emit_plot_data && !cfg.output_dir.empty()) {
        std::ostringstream tidy;
        tidy << "policy,n,median_regret\n";
        for (const auto& [policy, by_n] : result.medians)
            for (const auto& [n, med] : by_n) tidy << policy << ',' << n << ',' << med << '\n';
        io::atomic_write((fs::path(cfg.output_dir) / "medians.csv").string(), tidy.str());
    }

    if (cfg.output_dir.empty()) std::cout << result.summary_csv;
    std::cout << fits.dump(2) << "\n";
    return failures == 0 ? 0 : 3;
}

int cmd_bench(int n, int k, std::uint64_t seed, int reps, bool kernels, double sigma) {
    json out;
    if (kernels) {
        // forward transform: row-parallel kernel against the serial reference
        json rows = json::array();
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int len : {1024, 4096, 16384}) {
            auto basis = wavelet::cached_basis(len, k);
            std::vector<double> x(len), buf(len);
            for (auto& v : x) v = gauss(rng);
            const int iters = 20000000 / (len * 14) + 1;
            auto time_it = [&](auto&& fn) {
                double best = 1e100;
                for (int r = 0; r < reps; ++r) {
                    const auto t0 = std::chrono::steady_clock::now();
                    for (int it = 0; it < iters; ++it) fn();
                    const auto t1 = std::chrono::steady_clock::now();
                    best = std::min(best,
                                    std::chrono::duration<double, std::milli>(t1 - t0).count());
                }
                return best / iters;
            };
            const double serial = time_it([&] { wavelet::forward_serial(*basis, x, buf); });
            const double parallel = time_it([&] { wavelet::forward_parallel(*basis, x, buf); });
            rows.push_back({{"length", len},
                            {"serial_ms", serial},
                            {"parallel_ms", parallel},
                            {"speedup", serial / parallel}});
        }
        out["forward_kernel"] = rows;
        std::cout << out.dump(2) << "\n";
        return 0;
    }

#ifdef _OPENMP
    omp_set_num_threads(1); // scaling numbers are single-threaded
#endif
    // policy runtime: one horizon doubling, best-of-reps wallclock
    auto run_once = [&](int horizon) {
        gen::GeneratorSpec gs;
        gs.kind = gen::Kind::SampledContinuous;
        gs.k = std::max(1, k);
        gs.segments = 4;
        gs.n = horizon;
        gs.seed = gen::mix_seed(seed, static_cast<std::uint64_t>(horizon), 1);
        const auto truth = gen::generate(gs);
        const auto noisy =
            gen::add_noise(truth, sigma, gen::NoiseKind::Gaussian,
                           gen::mix_seed(seed, static_cast<std::uint64_t>(horizon), 2));
        policy::AdaVawConfig pc;
        pc.k = k;
        pc.n = horizon;
        pc.sigma = sigma;
        pc.seed = seed;
        double best = 1e100;
        for (int r = 0; r < reps; ++r) {
            const auto res = policy::run_policy(pc, *noisy.y, *noisy.theta);
            best = std::min(best, res.report.wallclock_ms);
        }
        return best;
    };
    const double t_half = run_once(n / 2);
    const double t_full = run_once(n);
    out["n"] = n;
    out["k"] = k;
    out["wallclock_ms_half"] = t_half;
    out["wallclock_ms_full"] = t_full;
    out["doubling_ratio"] = t_full / t_half;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_padding_demo(int len, int k, const std::string& kind, std::uint64_t seed) {
    std::vector<double> window(len);
    if (kind == "linear") {
        for (int i = 0; i < len; ++i) window[i] = 0.2 + 0.1 * (i + 1);
    } else if (kind == "constant") {
        for (auto& v : window) v = 0.75;
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& v : window) v = gauss(rng);
    }
    const auto demo = harness::padding_demo(window, k);
    json j{{"packed_tv", demo.packed_tv},
           {"zero_pad_tv", demo.zero_pad_tv},
           {"mirror_pad_tv", demo.mirror_pad_tv},
           {"degenerate", demo.degenerate}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive online forecaster for trend-bounded sequences"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "write a synthetic series to CSV");
    std::string g_config, g_kind, g_noise = "gaussian", g_out = "series.csv";
    int g_n = 1024, g_k = 0, g_knots = 3, g_segments = 4, g_alt = 0;
    double g_B = 1.0, g_radius = 1.0, g_constant = 0.0, g_coeff = 1.0, g_sigma = 0.0;
    std::uint64_t g_seed = 0;
    bool g_disc = false;
    generate->add_option("--config", g_config, "experiment JSON supplying the generator block");
    generate->add_option("--kind", g_kind, "generator kind");
    generate->add_option("--n", g_n, "horizon");
    generate->add_option("--k", g_k, "TV order");
    generate->add_option("--B", g_B, "sup-norm bound");
    generate->add_option("--knots", g_knots, "knot / jump count");
    generate->add_option("--segments", g_segments, "continuous pieces");
    generate->add_option("--radius", g_radius, "variational radius");
    generate->add_option("--constant", g_constant, "constant level");
    generate->add_option("--M", g_alt, "alternating steps");
    generate->add_option("--coeff-range", g_coeff, "coefficient range");
    generate->add_flag("--discontinuous", g_disc, "independent polynomial pieces");
    generate->add_option("--sigma", g_sigma, "noise level (emit y column when > 0)");
    generate->add_option("--noise", g_noise, "gaussian | uniform_bounded");
    generate->add_option("--out", g_out, "output CSV path");
    generate->add_option("--seed", g_seed, "rng seed")->required();

    auto* run = app.add_subcommand("run", "run one forecaster over a series CSV");
    std::string r_input, r_out, r_type = "adavaw", r_logbase = "segment_length";
    int r_k = 0, r_window = 8, r_batch = 0;
    double r_sigma = 0.25, r_B = 1.0, r_beta = 0.0, r_delta = 0.1, r_cn = 1.0;
    std::uint64_t r_seed = 0;
    bool r_est = false;
    std::string r_config;
    run->add_option("--config", r_config, "experiment JSON supplying policy defaults");
    run->add_option("--input", r_input, "input CSV (t,y[,theta])")->required();
    run->add_option("--out", r_out, "output directory for trace.csv and report.json");
    run->add_option("--policy", r_type,
                    "adavaw | meta | moving_average | ogd | restarting_ogd | offline_wavelet");
    run->add_option("--k", r_k, "TV order");
    run->add_option("--sigma", r_sigma, "noise level");
    run->add_option("--B", r_B, "sup-norm bound");
    run->add_option("--beta", r_beta, "threshold hyper-parameter (0 = default)");
    run->add_option("--delta", r_delta, "failure probability for the default beta");
    run->add_flag("--estimate-sigma", r_est, "MAD pre-pass replaces sigma");
    run->add_option("--threshold-log-base", r_logbase, "segment_length | horizon");
    run->add_option("--window", r_window, "moving average window");
    run->add_option("--batch-len", r_batch, "restarting OGD batch length (0 = derived)");
    run->add_option("--C-n", r_cn, "variational budget for derived batch lengths");
    run->add_option("--seed", r_seed, "rng seed")->required();

    auto* sweep = app.add_subcommand("sweep", "run an experiment grid from a JSON config");
    std::string s_config, s_out;
    int s_threads = 0;
    bool s_plot = false;
    sweep->add_option("--config", s_config, "experiment JSON")->required();
    sweep->add_option("--out", s_out, "output directory (overrides config)");
    sweep->add_option("--threads", s_threads, "worker count");
    sweep->add_flag("--emit-plot-data", s_plot, "write tidy medians.csv");

    auto* bench = app.add_subcommand("bench", "runtime scaling and kernel benchmarks");
    int b_n = 8192, b_k = 2, b_reps = 3;
    double b_sigma = 0.25;
    std::uint64_t b_seed = 0;
    bool b_kernels = false;
    std::string b_config;
    bench->add_option("--config", b_config, "experiment JSON (sigma default)");
    bench->add_option("--n", b_n, "horizon (compared against n/2)");
    bench->add_option("--k", b_k, "TV order");
    bench->add_option("--reps", b_reps, "repetitions (best taken)");
    bench->add_option("--sigma", b_sigma, "noise level");
    bench->add_flag("--kernels", b_kernels, "compare serial vs parallel transform kernels");
    bench->add_option("--seed", b_seed, "rng seed")->required();

    auto* pad = app.add_subcommand("padding-demo", "compare packing against padding schemes");
    int p_len = 48, p_k = 1;
    std::string p_kind = "linear";
    std::uint64_t p_seed = 1;
    std::string p_config;
    pad->add_option("--config", p_config, "experiment JSON (unused fields ignored)");
    pad->add_option("--len", p_len, "window length");
    pad->add_option("--k", p_k, "TV order");
    pad->add_option("--kind", p_kind, "linear | constant | random");
    pad->add_option("--seed", p_seed, "rng seed for random windows")->required();

    try {
        app.parse(argc, argv);
        if (generate->parsed())
            return cmd_generate(generate, g_config, g_kind, g_n, g_k, g_B, g_seed, g_knots,
                                g_segments, g_radius, g_constant, g_alt, g_coeff, g_disc,
                                g_sigma, g_noise, g_out);
        if (run->parsed()) {
            if (!r_config.empty() && !run->count("--sigma"))
                r_sigma = harness::parse_experiment_config(io::read_file(r_config)).sigma;
            return cmd_run(r_input, r_out, r_type, r_k, r_sigma, r_B, r_beta, r_delta, r_est,
                           r_logbase, r_window, r_batch, r_cn, r_seed);
        }
        if (sweep->parsed()) return cmd_sweep(s_config, s_out, s_threads, s_plot);
        if (bench->parsed()) {
            if (!b_config.empty() && !bench->count("--sigma"))
                b_sigma = harness::parse_experiment_config(io::read_file(b_config)).sigma;
            return cmd_bench(b_n, b_k, b_seed, b_reps, b_kernels, b_sigma);
        }
        if (pad->parsed()) return cmd_padding_demo(p_len, p_k, p_kind, p_seed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
