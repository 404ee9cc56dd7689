#include "adavaw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adavaw/errors.hpp"
#include "adavaw/io.hpp"
#include "adavaw/series.hpp"
#include "adavaw/wavelet.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adavaw::harness {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentConfig::validate() const {
    if (policies.empty()) throw config_error("experiment: no policies configured");
    if (n_grid.empty()) throw config_error("experiment: empty n grid");
    if (seeds.empty()) throw config_error("experiment: empty seed list");
    if (sigma < 0.0) throw config_error("experiment: sigma must be nonnegative");
    int max_k = generator.k;
    for (const auto& p : policies) max_k = std::max(max_k, p.k);
    for (int n : n_grid)
        if (n < max_k + 2) throw config_error("experiment: horizon too small for max k");
}

namespace {

gen::Kind parse_kind(const std::string& s) {
    if (s == "piecewise_poly") return gen::Kind::PiecewisePoly;
    if (s == "sampled_continuous") return gen::Kind::SampledContinuous;
    if (s == "sobolev") return gen::Kind::Sobolev;
    if (s == "holder") return gen::Kind::Holder;
    if (s == "exact_sparse") return gen::Kind::ExactSparse;
    if (s == "alternating") return gen::Kind::Alternating;
    if (s == "constant") return gen::Kind::Constant;
    throw config_error("unknown generator kind: " + s);
}

} // namespace

gen::GeneratorSpec parse_generator(const json& g) {
    gen::GeneratorSpec spec;
    spec.kind = parse_kind(g.at("kind").get<std::string>());
    spec.k = g.value("k", 0);
    spec.n = g.value("n", 0);
    spec.B = g.value("B", 1.0);
    spec.seed = g.value("seed", std::uint64_t{0});
    spec.knots = g.value("knots", g.value("J", 1));
    spec.coeff_range = g.value("coeff_range", 1.0);
    spec.continuous = g.value("continuous", true);
    spec.segments = g.value("segments", 4);
    spec.radius = g.value("radius", 1.0);
    spec.constant = g.value("constant", 0.0);
    spec.alternating_steps = g.value("M", 0);
    return spec;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config JSON parse error: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.generator = parse_generator(j.at("generator"));
        cfg.sigma = j.value("sigma", 0.25);
        const std::string noise = j.value("noise", "gaussian");
        if (noise == "gaussian") cfg.noise = gen::NoiseKind::Gaussian;
        else if (noise == "uniform_bounded") cfg.noise = gen::NoiseKind::UniformBounded;
        else throw config_error("unknown noise kind: " + noise);

        for (const auto& p : j.at("policies")) {
            PolicySpec spec;
            spec.type = p.at("type").get<std::string>();
            spec.k = p.value("k", 0);
            spec.name = p.value("name", spec.type + (spec.type == "adavaw"
                                                         ? "_k" + std::to_string(spec.k)
                                                         : ""));
            spec.sigma = p.value("sigma", -1.0);
            spec.B = p.value("B", 0.0);
            spec.beta = p.value("beta", 0.0);
            spec.delta = p.value("delta", 0.1);
            spec.estimate_sigma = p.value("estimate_sigma", false);
            spec.threshold_log_base = p.value("threshold_log_base", std::string("segment_length")) ==
                                              std::string("horizon")
                                          ? policy::ThresholdLogBase::Horizon
                                          : policy::ThresholdLogBase::SegmentLength;
            spec.window = p.value("window", 8);
            spec.batch_len = p.value("batch_len", 0);
            spec.C_n = p.value("C_n", 0.0);
            cfg.policies.push_back(std::move(spec));
        }
        cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
        cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        cfg.output_dir = j.value("output_dir", "");
        cfg.threads = j.value("threads", 1);
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw config_error(std::string("config JSON: ") + e.what());
    }
}

CellResult run_cell(const ExperimentConfig& config, const PolicySpec& spec, int n,
                    std::uint64_t seed, bool write_files) {
    CellResult cell;
    cell.policy = spec.name;
    cell.n = n;
    cell.seed = seed;
    try {
        gen::GeneratorSpec gspec = config.generator;
        gspec.n = n;
        // the shape seed is horizon-independent: one seed describes one
        // underlying trend, sampled at whichever n the cell asks for
        gspec.seed = gen::mix_seed(seed, 0, 1);
        const auto truth = gen::generate(gspec);
        const auto noisy = gen::add_noise(truth, config.sigma, config.noise,
                                          gen::mix_seed(seed, static_cast<std::uint64_t>(n), 2));
        const std::span<const double> stream(*noisy.y);
        const std::span<const double> theta(*noisy.theta);

        const double sigma = spec.sigma >= 0.0 ? spec.sigma : config.sigma;
        const double B = spec.B > 0.0 ? spec.B : config.generator.B;

        policy::PolicyResult res;
        if (spec.type == "adavaw") {
            policy::AdaVawConfig pc;
            pc.k = spec.k;
            pc.n = n;
            pc.sigma = sigma;
            pc.B = B;
            pc.beta = spec.beta;
            pc.delta = spec.delta;
            pc.threshold_log_base = spec.threshold_log_base;
            pc.seed = seed;
            pc.estimate_sigma = spec.estimate_sigma;
            res = policy::run_policy(pc, stream, theta);
        } else if (spec.type == "meta") {
            policy::AdaVawConfig pc;
            pc.n = n;
            pc.sigma = sigma;
            pc.B = B;
            pc.beta = spec.beta;
            pc.delta = spec.delta;
            pc.seed = seed;
            auto meta = policy::meta_ewa(pc, stream, theta);
            res.report = meta.report;
            res.trace = std::move(meta.trace);
        } else {
            baselines::BaselineConfig bc;
            bc.n = n;
            bc.window = spec.window;
            bc.batch_len = spec.batch_len;
            bc.k = spec.k;
            bc.B = B;
            bc.sigma = sigma;
            bc.seed = seed;
            if (spec.type == "moving_average") bc.kind = baselines::Kind::MovingAverage;
            else if (spec.type == "ogd") bc.kind = baselines::Kind::Ogd;
            else if (spec.type == "restarting_ogd") bc.kind = baselines::Kind::RestartingOgd;
            else if (spec.type == "offline_wavelet") bc.kind = baselines::Kind::OfflineWavelet;
            else throw config_error("unknown policy type: " + spec.type);
            bc.C_n = spec.C_n > 0.0 ? spec.C_n
                                    : series::variational_profile(theta, config.generator.k).tv_k;
            res = baselines::run_baseline(bc, stream, theta);
        }

        if (write_files && !config.output_dir.empty()) {
            const fs::path dir = fs::path(config.output_dir) / spec.name /
                                 ("n" + std::to_string(n)) / ("s" + std::to_string(seed));
            std::ostringstream trace;
            policy::write_trace_csv(trace, res.trace, theta);
            io::atomic_write((dir / "trace.csv").string(), trace.str());
            io::atomic_write((dir / "report.json").string(),
                             policy::report_to_json(res.report) + "\n");
        }
        cell.report = res.report;
        cell.ok = true;
    } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
    }
    return cell;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    struct CellKey {
        const PolicySpec* spec;
        int n;
        std::uint64_t seed;
    };
    std::vector<CellKey> keys;
    for (const auto& p : config.policies)
        for (int n : config.n_grid)
            for (auto seed : config.seeds) keys.push_back({&p, n, seed});

    ExperimentResult result;
    result.cells.resize(keys.size());
    const bool write_files = !config.output_dir.empty();
    const int threads = std::max(1, config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (std::size_t i = 0; i < keys.size(); ++i) {
        result.cells[i] =
            run_cell(config, *keys[i].spec, keys[i].n, keys[i].seed, write_files);
    }

    // medians per (policy, n)
    std::map<std::string, std::map<int, std::vector<double>>> grouped;
    for (const auto& c : result.cells)
        if (c.ok) grouped[c.policy][c.n].push_back(c.report.regret);
    for (auto& [policy, by_n] : grouped)
        for (auto& [n, vals] : by_n) {
            std::sort(vals.begin(), vals.end());
            const std::size_t m = vals.size();
            result.medians[policy][n] =
                m % 2 ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
        }

    std::ostringstream summary;
    summary << "policy,n,seed,regret,num_bins,wallclock_ms\n";
    char buf[64];
    for (const auto& c : result.cells) {
        if (!c.ok) continue;
        std::snprintf(buf, sizeof buf, "%.17g", c.report.regret);
        summary << c.policy << ',' << c.n << ',' << c.seed << ',' << buf << ','
                << c.report.num_bins << ',' << c.report.wallclock_ms << '\n';
    }
    result.summary_csv = summary.str();
    if (write_files)
        io::atomic_write((fs::path(config.output_dir) / "summary.csv").string(),
                         result.summary_csv);
    return result;
}

ScalingFit fit_scaling(const std::map<int, double>& median_by_n) {
    if (median_by_n.size() < 4)
        throw config_error("fit_scaling: need at least 4 horizons");
    const double n_min = median_by_n.begin()->first;
    const double n_max = median_by_n.rbegin()->first;
    if (n_max < 16.0 * n_min)
        throw config_error("fit_scaling: horizons must span a factor of 16");
    ScalingFit fit;
    for (const auto& [n, r] : median_by_n) {
        if (!(r > 0.0)) throw config_error("fit_scaling: nonpositive regret");
        fit.points.emplace_back(std::log(static_cast<double>(n)), std::log(r));
    }
    const double m = static_cast<double>(fit.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : fit.points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / m;
    for (const auto& [x, y] : fit.points) {
        const double pred = fit.intercept + fit.slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

PaddingDemo padding_demo(std::span<const double> window, int k) {
    if (window.size() < static_cast<std::size_t>(k) + 2)
        throw dimension_error("padding_demo: window shorter than k + 2");
    PaddingDemo out;
    const std::size_t len = window.size();
    if ((len & (len - 1)) == 0) {
        out.degenerate = true;
        const double tv = series::tv_k(window, k);
        out.packed_tv = out.zero_pad_tv = out.mirror_pad_tv = tv;
        return out;
    }
    std::size_t pow2 = 1;
    while (pow2 < len) pow2 *= 2;

    const auto segs = wavelet::pack_view(window);
    out.packed_tv = std::max(series::tv_k(segs.first, k), series::tv_k(segs.second, k));

    std::vector<double> zero(window.begin(), window.end());
    zero.resize(pow2, 0.0);
    out.zero_pad_tv = series::tv_k(zero, k);

    std::vector<double> mirror(window.begin(), window.end());
    for (std::size_t i = 0; mirror.size() < pow2; ++i)
        mirror.push_back(window[len - 1 - i]);
    out.mirror_pad_tv = series::tv_k(mirror, k);
    return out;
}

double regret_from_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty trace file: " + path);
    if (line.rfind("t,y,theta,prediction", 0) != 0)
        throw config_error("unexpected trace header: " + line);
    double total = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ','); // t
        std::getline(ss, cell, ','); // y
        const double y = std::stod(cell);
        std::getline(ss, cell, ','); // theta (may be blank)
        const double target = cell.empty() ? y : std::stod(cell);
        std::getline(ss, cell, ','); // prediction
        const double pred = std::stod(cell);
        total += (pred - target) * (pred - target);
    }
    return total;
}

} // namespace adavaw::harness
