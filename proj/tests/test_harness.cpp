#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "adavaw/errors.hpp"
#include "adavaw/harness.hpp"
#include "adavaw/io.hpp"

using namespace adavaw;
namespace fs = std::filesystem;

namespace {

harness::ExperimentConfig small_config() {
    harness::ExperimentConfig cfg;
    cfg.generator.kind = gen::Kind::PiecewisePoly;
    cfg.generator.k = 0;
    cfg.generator.continuous = false;
    cfg.generator.knots = 2;
    cfg.generator.B = 1.0;
    cfg.sigma = 0.25;
    harness::PolicySpec ada;
    ada.type = "adavaw";
    ada.name = "adavaw_k0";
    ada.k = 0;
    cfg.policies.push_back(ada);
    cfg.n_grid = {128};
    cfg.seeds = {1};
    return cfg;
}

} // namespace

TEST_CASE("fit_scaling recovers exact power laws") {
    std::map<int, double> cube;
    std::map<int, double> flat;
    for (int n : {256, 512, 1024, 2048, 4096, 8192}) {
        cube[n] = std::pow(static_cast<double>(n), 1.0 / 3.0);
        flat[n] = 7.5;
    }
    const auto f1 = harness::fit_scaling(cube);
    CHECK(f1.slope == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(f1.r2 >= 0.999999);
    const auto f2 = harness::fit_scaling(flat);
    CHECK(std::fabs(f2.slope) < 1e-9);
}

TEST_CASE("fit_scaling demands enough span") {
    std::map<int, double> few{{256, 1.0}, {512, 2.0}, {1024, 3.0}};
    CHECK_THROWS_AS(harness::fit_scaling(few), config_error);
    std::map<int, double> narrow{{256, 1.0}, {300, 1.1}, {350, 1.2}, {400, 1.3}};
    CHECK_THROWS_AS(harness::fit_scaling(narrow), config_error);
}

TEST_CASE("single cell experiment") {
    auto cfg = small_config();
    const auto result = harness::run_experiment(cfg);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.cells[0].ok);
    CHECK(result.medians.at("adavaw_k0").at(128) == result.cells[0].report.regret);
}

TEST_CASE("experiment determinism modulo wallclock") {
    auto cfg = small_config();
    cfg.n_grid = {128, 256};
    cfg.seeds = {1, 2, 3};
    const auto a = harness::run_experiment(cfg);
    const auto b = harness::run_experiment(cfg);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].report.regret == b.cells[i].report.regret);
        CHECK(a.cells[i].report.num_bins == b.cells[i].report.num_bins);
    }
    CHECK(a.medians == b.medians);
}

TEST_CASE("policies share the generated streams") {
    auto cfg = small_config();
    harness::PolicySpec ma;
    ma.type = "moving_average";
    ma.name = "ma8";
    ma.window = 8;
    cfg.policies.push_back(ma);
    cfg.output_dir = (fs::temp_directory_path() / "adavaw_share_test").string();
    fs::remove_all(cfg.output_dir);
    const auto result = harness::run_experiment(cfg);
    REQUIRE(result.cells.size() == 2);
    // identical y columns in both traces
    const auto t1 = io::read_series_csv(cfg.output_dir + "/adavaw_k0/n128/s1/trace.csv");
    const auto t2 = io::read_series_csv(cfg.output_dir + "/ma8/n128/s1/trace.csv");
    REQUIRE(t1.y.has_value());
    REQUIRE(t2.y.has_value());
    CHECK(*t1.y == *t2.y);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("regret recomputes from the trace file") {
    auto cfg = small_config();
    cfg.output_dir = (fs::temp_directory_path() / "adavaw_regret_test").string();
    fs::remove_all(cfg.output_dir);
    const auto result = harness::run_experiment(cfg);
    const double from_csv =
        harness::regret_from_trace_csv(cfg.output_dir + "/adavaw_k0/n128/s1/trace.csv");
    CHECK(from_csv == doctest::Approx(result.cells[0].report.regret).epsilon(1e-9));
    // no stray temp files
    for (const auto& entry : fs::recursive_directory_iterator(cfg.output_dir))
        CHECK(entry.path().extension() != ".tmp");
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("summary medians ignore seed order") {
    auto cfg = small_config();
    cfg.seeds = {3, 1, 2};
    const auto a = harness::run_experiment(cfg);
    cfg.seeds = {1, 2, 3};
    const auto b = harness::run_experiment(cfg);
    CHECK(a.medians == b.medians);
}

TEST_CASE("config json parsing round trip") {
    const std::string text = R"({
        "generator": {"kind": "sampled_continuous", "k": 1, "segments": 5, "radius": 1.0, "B": 1.0},
        "sigma": 0.25,
        "noise": "gaussian",
        "policies": [
            {"type": "adavaw", "k": 1, "delta": 0.1},
            {"type": "restarting_ogd", "name": "rogd"},
            {"type": "offline_wavelet", "k": 1}
        ],
        "n_grid": [512, 1024],
        "seeds": [1, 2],
        "threads": 2
    })";
    const auto cfg = harness::parse_experiment_config(text);
    CHECK(cfg.generator.kind == gen::Kind::SampledContinuous);
    CHECK(cfg.policies.size() == 3);
    CHECK(cfg.policies[0].name == "adavaw_k1");
    CHECK(cfg.policies[1].name == "rogd");
    CHECK(cfg.threads == 2);

    CHECK_THROWS_AS(harness::parse_experiment_config("{not json"), config_error);
    CHECK_THROWS_AS(harness::parse_experiment_config("{}"), config_error);
    CHECK_THROWS_AS(harness::parse_experiment_config(
                        R"({"generator": {"kind": "nope"}, "policies": [], "n_grid": [8], "seeds": [1]})"),
                    config_error);
}

TEST_CASE("padding demo worked examples") {
    SUBCASE("linear trend window at k=1") {
        std::vector<double> win48(48), win96(96);
        for (int i = 0; i < 48; ++i) win48[i] = 0.2 + 0.1 * (i + 1);
        for (int i = 0; i < 96; ++i) win96[i] = 0.2 + 0.1 * (i + 1);
        const auto d48 = harness::padding_demo(win48, 1);
        const auto d96 = harness::padding_demo(win96, 1);
        CHECK(d48.packed_tv < 1e-9);
        CHECK(d48.zero_pad_tv > 0.0);
        CHECK(d96.zero_pad_tv > d48.zero_pad_tv); // grows with window length
        CHECK(d48.mirror_pad_tv > 0.0);
    }
    SUBCASE("constant window at k=0") {
        std::vector<double> win(12, 0.75);
        const auto d = harness::padding_demo(win, 0);
        CHECK(d.packed_tv == doctest::Approx(0.0));
        CHECK(d.zero_pad_tv == doctest::Approx(0.75)); // the boundary jump
        CHECK(d.mirror_pad_tv == doctest::Approx(0.0));
    }
    SUBCASE("power-of-two windows are degenerate") {
        std::vector<double> win(16);
        for (int i = 0; i < 16; ++i) win[i] = std::sin(0.3 * i);
        const auto d = harness::padding_demo(win, 1);
        CHECK(d.degenerate);
        CHECK(d.packed_tv == d.zero_pad_tv);
        CHECK(d.zero_pad_tv == d.mirror_pad_tv);
    }
}

TEST_CASE("series csv reads either column order") {
    const auto dir = fs::temp_directory_path() / "adavaw_io_test";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "a.csv");
        out << "t,y,theta\n1,0.5,0.4\n2,0.6,0.5\n";
    }
    const auto a = io::read_series_csv((dir / "a.csv").string());
    REQUIRE(a.y.has_value());
    REQUIRE(a.theta.has_value());
    CHECK((*a.y)[0] == 0.5);
    CHECK((*a.theta)[1] == 0.5);
    {
        std::ofstream out(dir / "b.csv");
        out << "t,theta\n1,0.4\n2,0.5\n";
    }
    const auto b = io::read_series_csv((dir / "b.csv").string());
    CHECK_FALSE(b.y.has_value());
    REQUIRE(b.theta.has_value());
    fs::remove_all(dir);
}

TEST_CASE("experiment reports per-cell errors without aborting") {
    auto cfg = small_config();
    harness::PolicySpec bad;
    bad.type = "moving_average";
    bad.name = "bad_ma";
    bad.window = -3; // invalid: surfaces as a per-cell error
    cfg.policies.push_back(bad);
    const auto result = harness::run_experiment(cfg);
    REQUIRE(result.cells.size() == 2);
    CHECK(result.cells[0].ok);
    CHECK_FALSE(result.cells[1].ok);
    CHECK_FALSE(result.cells[1].error.empty());
}
