#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "adavaw/errors.hpp"
#include "adavaw/generators.hpp"
#include "adavaw/linalg.hpp"
#include "adavaw/policy.hpp"
#include "adavaw/regress.hpp"
#include "adavaw/series.hpp"
#include "adavaw/wavelet.hpp"

using namespace adavaw;

namespace {

std::vector<double> gaussian_stream(std::uint64_t seed, int n, double sigma,
                                    const std::vector<double>& theta) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<double> y(theta);
    for (auto& v : y) v += gauss(rng);
    return y;
}

policy::AdaVawConfig basic_config(int k, int n, double sigma, double B = 1.0) {
    policy::AdaVawConfig c;
    c.k = k;
    c.n = n;
    c.sigma = sigma;
    c.B = B;
    c.delta = 0.1;
    return c;
}

int count_restarts(const std::vector<policy::StepTrace>& trace) {
    int r = 0;
    for (const auto& tr : trace) r += tr.restarted ? 1 : 0;
    return r;
}

} // namespace

TEST_CASE("beta default exceeds 24") {
    CHECK(policy::AdaVawConfig::default_beta(0.1, 1024) > 24.0);
    CHECK(policy::AdaVawConfig::default_beta(1.0, 2) > 24.0);
    auto c = basic_config(0, 64, 0.1);
    CHECK(c.effective_beta() == doctest::Approx(policy::AdaVawConfig::default_beta(0.1, 64)));
    c.beta = 30.0;
    CHECK(c.effective_beta() == 30.0);
}

TEST_CASE("two-phase protocol violations raise protocol errors") {
    policy::AdaVaw p(basic_config(0, 4, 0.1));
    CHECK_THROWS_AS(p.observe(1.0), protocol_error); // observe before predict
    (void)p.predict(1);
    CHECK_THROWS_AS(p.predict(1), protocol_error); // predict twice
    p.observe(0.5);
    CHECK_THROWS_AS(p.predict(3), protocol_error); // skipping a step
    (void)p.predict(2);
    p.observe(0.5);
    (void)p.predict(3);
    p.observe(0.5);
    (void)p.predict(4);
    p.observe(0.5);
    CHECK_THROWS_AS(p.predict(5), protocol_error); // horizon exhausted
}

TEST_CASE("n=1 with k>=2 predicts zero") {
    auto cfg = basic_config(2, 1, 0.1);
    const std::vector<double> stream{0.7};
    const std::vector<double> theta{0.7};
    const auto res = policy::run_policy(cfg, stream, theta);
    CHECK(res.trace[0].prediction == 0.0);
    CHECK(res.report.regret == doctest::Approx(0.7 * 0.7));
}

TEST_CASE("short windows skip the restart check but still predict") {
    // k=3: coarse_count 4, so windows shorter than 8 skip the check
    auto cfg = basic_config(3, 6, 0.0);
    policy::AdaVaw p(cfg);
    for (int t = 1; t <= 6; ++t) {
        (void)p.predict(t);
        const auto tr = p.observe(static_cast<double>(t));
        CHECK_FALSE(tr.restarted);
    }
    const auto bins = p.bins();
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].restart_statistic == 0.0);
}

TEST_CASE("causality: identical prefixes give identical predictions") {
    const int n = 256;
    std::vector<double> theta(n, 0.0);
    for (int i = 128; i < n; ++i) theta[i] = 1.0;
    auto base = gaussian_stream(5, n, 0.25, theta);
    auto other = base;
    for (int i = 100; i < n; ++i) other[i] += 3.0; // diverge after t = 100

    auto cfg = basic_config(1, n, 0.25);
    policy::AdaVaw a(cfg), b(cfg);
    for (int t = 1; t <= n; ++t) {
        const double pa = a.predict(t);
        const double pb = b.predict(t);
        if (t <= 101) CHECK(pa == pb);
        a.observe(base[t - 1]);
        b.observe(other[t - 1]);
    }
}

TEST_CASE("determinism: identical inputs give bit-identical traces") {
    const int n = 512;
    gen::GeneratorSpec gs;
    gs.kind = gen::Kind::PiecewisePoly;
    gs.k = 1;
    gs.n = n;
    gs.knots = 3;
    gs.seed = 11;
    const auto truth = gen::generate(gs);
    const auto noisy = gen::add_noise(truth, 0.25, gen::NoiseKind::Gaussian, 12);
    auto cfg = basic_config(1, n, 0.25);
    const auto r1 = policy::run_policy(cfg, *noisy.y, *noisy.theta);
    const auto r2 = policy::run_policy(cfg, *noisy.y, *noisy.theta);
    REQUIRE(r1.trace.size() == r2.trace.size());
    for (std::size_t i = 0; i < r1.trace.size(); ++i) {
        CHECK(r1.trace[i].prediction == r2.trace[i].prediction);
        CHECK(r1.trace[i].restarted == r2.trace[i].restarted);
        CHECK(r1.trace[i].bin_id == r2.trace[i].bin_id);
    }
    CHECK(r1.report.regret == r2.report.regret);
}

TEST_CASE("bins partition the active horizon") {
    const int n = 2048;
    std::vector<double> theta(n, 0.0);
    for (int i = 700; i < 1400; ++i) theta[i] = 2.0;
    for (int i = 1400; i < n; ++i) theta[i] = -1.0;
    for (int k : {0, 1, 2}) {
        auto cfg = basic_config(k, n, 0.1, 2.0);
        const auto stream = gaussian_stream(17 + k, n, 0.1, theta);
        const auto res = policy::run_policy(cfg, stream, theta);
        REQUIRE_FALSE(res.bins.empty());
        CHECK(res.bins.front().start == std::max(k, 1));
        CHECK(res.bins.back().end == n);
        for (std::size_t i = 0; i < res.bins.size(); ++i) {
            CHECK(res.bins[i].start <= res.bins[i].end);
            if (i > 0) CHECK(res.bins[i].start == res.bins[i - 1].end + 1);
        }
        // restarted flags in the trace agree with the bin boundaries
        CHECK(count_restarts(res.trace) == static_cast<int>(res.bins.size()) - 1);
    }
}

TEST_CASE("restart statistic lower-bounds window variation") {
    // noiseless mechanism check: (||a1|| + ||a2||) / sqrt(L) <= c(k) tv_k
    const double c_env[4] = {2.0, 0.2, 0.05, 0.05};
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int k = 0; k <= 3; ++k) {
        for (int rep = 0; rep < 100; ++rep) {
            std::uniform_int_distribution<int> lenlaw(4 * wavelet::coarse_count_for(k), 300);
            const int L = lenlaw(rng);
            std::uniform_int_distribution<int> pos(2, L - 2);
            std::uniform_int_distribution<int> kn(1, 3);
            const int J = kn(rng);
            std::vector<int> cuts;
            while (static_cast<int>(cuts.size()) < J) cuts.push_back(pos(rng));
            std::sort(cuts.begin(), cuts.end());
            cuts.push_back(L);
            std::vector<double> th(L);
            int start = 0;
            for (int piece = 0; piece <= J; ++piece) {
                const int end = cuts[piece];
                std::vector<double> pc(k + 1);
                for (auto& c : pc) c = coef(rng);
                for (int i = start; i < end; ++i) {
                    double v = 0.0, xp = 1.0;
                    for (int d = 0; d <= k; ++d) {
                        v += pc[d] * xp;
                        xp *= (i - start + 1.0) / L;
                    }
                    th[i] = v;
                }
                start = end;
            }
            const double tv = series::tv_k(th, k);
            if (tv < 1e-9) continue;
            const auto res = regress::recenter(th, k);
            const auto segs = wavelet::pack_view(res);
            auto basis = wavelet::cached_basis(static_cast<int>(segs.first.size()), k);
            const auto c1 = wavelet::forward(*basis, segs.first);
            const auto c2 = wavelet::forward(*basis, segs.second);
            const double stat = linalg::norm2(c1.values) + linalg::norm2(c2.values);
            CHECK(stat / std::sqrt(static_cast<double>(L)) <= c_env[k] * tv);
        }
    }
}

TEST_CASE("constant truth keeps a single bin") {
    int clean = 0;
    for (int seed = 0; seed < 5; ++seed) {
        const int n = 1024;
        const std::vector<double> theta(n, 0.0);
        const auto stream = gaussian_stream(100 + seed, n, 0.1, theta);
        const auto res = policy::run_policy(basic_config(0, n, 0.1), stream, theta);
        if (count_restarts(res.trace) == 0) ++clean;
    }
    CHECK(clean >= 4);
}

TEST_CASE("a large jump triggers a restart quickly") {
    int detected = 0;
    for (int seed = 0; seed < 5; ++seed) {
        const int n = 1024;
        std::vector<double> theta(n, 0.0);
        for (int i = n / 2; i < n; ++i) theta[i] = 10.0;
        const auto stream = gaussian_stream(200 + seed, n, 0.1, theta);
        const auto res = policy::run_policy(basic_config(0, n, 0.1, 10.0), stream, theta);
        for (const auto& tr : res.trace) {
            if (tr.restarted && tr.t >= n / 2 && tr.t <= n / 2 + 64) {
                ++detected;
                break;
            }
        }
    }
    CHECK(detected >= 4);
}

TEST_CASE("noiseless polynomial run stays in one bin with tiny regret") {
    const int n = 512;
    const int k = 2;
    std::vector<double> theta(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1.0) / n;
        theta[i] = 0.2 - 0.5 * x + 0.9 * x * x;
    }
    auto cfg = basic_config(k, n, 0.0);
    const auto res = policy::run_policy(cfg, theta, theta);
    CHECK(count_restarts(res.trace) == 0);
    // VAW log-regret bound with exact polynomial labels
    CHECK(res.report.regret < 10.0);
}

TEST_CASE("meta: identical instances keep uniform weights") {
    // all four instances see a constant zero stream and predict identically
    const int n = 64;
    const std::vector<double> stream(n, 0.0);
    auto cfg = basic_config(0, n, 0.1);
    const auto meta = policy::meta_ewa(cfg, stream, stream);
    for (double w : meta.final_weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(meta.report.regret == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("meta: weights recompute from instance losses (oracle)") {
    const int n = 512;
    gen::GeneratorSpec gs;
    gs.kind = gen::Kind::PiecewisePoly;
    gs.k = 0;
    gs.continuous = false;
    gs.n = n;
    gs.knots = 4;
    gs.seed = 31;
    gs.B = 2.0;
    const auto truth = gen::generate(gs);
    const auto noisy = gen::add_noise(truth, 0.1, gen::NoiseKind::Gaussian, 32);
    auto cfg = basic_config(0, n, 0.1, 2.0);
    const auto meta = policy::meta_ewa(cfg, *noisy.y, *noisy.theta);
    // independent reweighting from the recorded cumulative losses
    double norm = 0.0;
    std::vector<double> want(4);
    double lmin = meta.instance_loss_y[0];
    for (double l : meta.instance_loss_y) lmin = std::min(lmin, l);
    for (int i = 0; i < 4; ++i) {
        want[i] = std::exp(-meta.eta * (meta.instance_loss_y[i] - lmin));
        norm += want[i];
    }
    for (int i = 0; i < 4; ++i)
        CHECK(meta.final_weights[i] == doctest::Approx(want[i] / norm).epsilon(1e-9));
}

TEST_CASE("meta weight concentrates on the dominant instance") {
    // square wave with large jumps: polynomial extrapolation of the wrong
    // order pays heavily, and the weight mass moves to the best instance
    const int n = 4096;
    const double B = 5.0;
    std::vector<double> theta(n);
    for (int i = 0; i < n; ++i) theta[i] = ((i / 32) % 2 == 0) ? 0.9 * B : -0.9 * B;
    const auto stream = gaussian_stream(91, n, 0.1, theta);
    auto cfg = basic_config(0, n, 0.1, B);
    const auto meta = policy::meta_ewa(cfg, stream, theta);
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (meta.instance_loss_y[i] < meta.instance_loss_y[best]) best = i;
    CHECK(meta.final_weights[best] >= 0.99);
}

TEST_CASE("meta regret bound against the best instance") {
    std::uint64_t seeds[3] = {41, 42, 43};
    for (int rep = 0; rep < 3; ++rep) {
        const int n = 1024;
        gen::GeneratorSpec gs;
        gs.kind = gen::Kind::SampledContinuous;
        gs.k = rep % 2;
        gs.n = n;
        gs.segments = 4;
        gs.seed = seeds[rep];
        const auto truth = gen::generate(gs);
        const auto noisy = gen::add_noise(truth, 0.1, gen::NoiseKind::Gaussian, seeds[rep] + 7);
        auto cfg = basic_config(0, n, 0.1);
        const auto meta = policy::meta_ewa(cfg, *noisy.y, *noisy.theta);
        double lmin = meta.instance_loss_y[0];
        for (double l : meta.instance_loss_y) lmin = std::min(lmin, l);
        CHECK(meta.meta_loss_y <= lmin + std::log(4.0) / meta.eta + 1e-9);
    }
}

TEST_CASE("multidim: one coordinate equals run_policy") {
    const int n = 256;
    std::vector<double> theta(n, 0.5);
    const auto stream = gaussian_stream(51, n, 0.1, theta);
    auto cfg = basic_config(0, n, 0.1);
    const auto single = policy::run_policy(cfg, stream, theta);
    const auto multi = policy::run_multidim(cfg, {stream}, {theta});
    CHECK(multi.total.regret == single.report.regret);
    CHECK(multi.total.num_bins == single.report.num_bins);
}

TEST_CASE("multidim: identical coordinates triple the regret exactly") {
    const int n = 256;
    std::vector<double> theta(n, 0.0);
    for (int i = 100; i < n; ++i) theta[i] = 1.0;
    const auto stream = gaussian_stream(53, n, 0.25, theta);
    auto cfg = basic_config(0, n, 0.25);
    const auto single = policy::run_policy(cfg, stream, theta);
    const auto multi = policy::run_multidim(cfg, {stream, stream, stream},
                                            {theta, theta, theta});
    CHECK(multi.total.regret == doctest::Approx(3.0 * single.report.regret).epsilon(1e-12));
}

TEST_CASE("multidim: flat coordinate beats wiggly coordinate") {
    const int n = 1024;
    std::vector<double> flat(n, 0.3);
    std::vector<double> wiggly(n);
    for (int i = 0; i < n; ++i) wiggly[i] = (i / 64) % 2 == 0 ? 0.8 : -0.8;
    const auto s_flat = gaussian_stream(61, n, 0.25, flat);
    const auto s_wig = gaussian_stream(62, n, 0.25, wiggly);
    auto cfg = basic_config(0, n, 0.25);
    const auto multi = policy::run_multidim(cfg, {s_flat, s_wig}, {flat, wiggly});
    CHECK(multi.per_coordinate[0].regret < multi.per_coordinate[1].regret);
    CHECK(multi.total.regret == doctest::Approx(multi.per_coordinate[0].regret +
                                                multi.per_coordinate[1].regret));
}

TEST_CASE("ragged multidim streams are rejected") {
    auto cfg = basic_config(0, 8, 0.1);
    std::vector<std::vector<double>> streams{std::vector<double>(8, 0.0),
                                             std::vector<double>(7, 0.0)};
    CHECK_THROWS_AS(policy::run_multidim(cfg, streams), dimension_error);
}

TEST_CASE("trace csv serialization") {
    std::vector<policy::StepTrace> trace;
    policy::StepTrace tr;
    tr.t = 1;
    tr.prediction = 0.5;
    tr.observation = 1.25;
    tr.restarted = true;
    tr.bin_id = 1;
    trace.push_back(tr);
    std::vector<double> theta{1.0};
    std::ostringstream with_theta;
    policy::write_trace_csv(with_theta, trace, theta);
    CHECK(with_theta.str() == "t,y,theta,prediction,restarted,bin_id\n1,1.25,1,0.5,1,1\n");
    std::ostringstream blank_theta;
    policy::write_trace_csv(blank_theta, trace);
    CHECK(blank_theta.str() == "t,y,theta,prediction,restarted,bin_id\n1,1.25,,0.5,1,1\n");
}

TEST_CASE("report json carries the pinned keys") {
    policy::RegretReport rep;
    rep.regret = 1.5;
    rep.n = 8;
    rep.k = 1;
    rep.num_bins = 2;
    rep.beta = 30.0;
    rep.sigma = 0.25;
    rep.seed = 7;
    rep.wallclock_ms = 1.0;
    const auto j = policy::report_to_json(rep);
    for (const char* key : {"\"regret\"", "\"n\"", "\"k\"", "\"num_bins\"", "\"beta\"",
                            "\"sigma\"", "\"seed\"", "\"wallclock_ms\""})
        CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("sigma can be estimated from a prefix") {
    const int n = 2048;
    const std::vector<double> theta(n, 0.7);
    const auto stream = gaussian_stream(71, n, 0.5, theta);
    auto cfg = basic_config(0, n, -1.0);
    cfg.sigma = 123.0; // ignored when estimate_sigma is on
    cfg.estimate_sigma = true;
    const auto res = policy::run_policy(cfg, stream, theta);
    CHECK(res.report.sigma > 0.35);
    CHECK(res.report.sigma < 0.65);
}

TEST_CASE("stream shorter than the horizon is rejected") {
    auto cfg = basic_config(0, 16, 0.1);
    CHECK_THROWS_AS(policy::run_policy(cfg, std::vector<double>(8, 0.0)), dimension_error);
}
