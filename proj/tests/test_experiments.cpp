#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chirprange/experiments.hpp"

using namespace chirprange;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExperimentConfig single_receiver_config() {
    ExperimentConfig cfg;
    cfg.room.absorption = 0.9;
    cfg.receivers = {{4.653, 2.1, 1.0}};
    cfg.snr_db_list = {20.0};
    cfg.trials = 1;
    return cfg;
}

ExperimentConfig small_grid_config() {
    ExperimentConfig cfg;
    cfg.room.absorption = 0.9;
    GridSpec grid;
    grid.nx = 3;
    grid.ny = 2;
    grid.spacing_m = 0.5;
    grid.margin_m = 0.5;
    grid.z_m = 1.0;
    cfg.grid = grid;
    cfg.snr_db_list = {10.0};
    cfg.trials = 2;
    return cfg;
}

}  // namespace

TEST_CASE("grid positions run x fastest from the margin corner", "[experiments]") {
    GridSpec g;
    g.nx = 3;
    g.ny = 2;
    g.spacing_m = 0.5;
    g.margin_m = 0.25;
    g.z_m = 1.1;
    const auto pts = grid_positions(g);
    REQUIRE(pts.size() == 6);
    CHECK(pts[0].x == 0.25);
    CHECK(pts[0].y == 0.25);
    CHECK(pts[0].z == 1.1);
    CHECK(pts[1].x == 0.75);
    CHECK(pts[1].y == 0.25);
    CHECK(pts[2].x == 1.25);
    CHECK(pts[3].x == 0.25);
    CHECK(pts[3].y == 0.75);
    CHECK(pts[5].x == 1.25);
    CHECK(pts[5].y == 0.75);
}

TEST_CASE("parallel_for covers every index once for any thread count", "[experiments]") {
    for (unsigned threads : {0u, 1u, 3u, 16u}) {
        std::vector<int> hits(257, 0);
        std::atomic<int> calls{0};
        parallel_for(hits.size(), threads, [&](std::size_t i) {
            hits[i] += 1;
            calls.fetch_add(1);
        });
        CHECK(calls == 257);
        for (int h : hits) CHECK(h == 1);
    }

    // n = 0 never invokes the body
    parallel_for(0, 4, [](std::size_t) { throw std::logic_error("must not run"); });

    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 50) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("validate_config collects every violation", "[experiments]") {
    ExperimentConfig cfg;
    cfg.source = {10.0, 2.0, 1.0};            // outside the 6 m room
    cfg.receivers = {{1.0, 1.0, 1.0}, {7.0, 1.0, 1.0}};  // second outside
    cfg.trials = 0;
    cfg.adc_bits = 1;
    cfg.snr_db_list = {std::numeric_limits<double>::quiet_NaN()};
    EstimatorSpec bad;
    bad.method = EstimatorMethod::prominence;
    bad.ppf = 0.0;
    cfg.estimators = {bad};

    const auto violations = validate_config(cfg);
    CHECK(violations.size() >= 5);
    bool receiver_named = false, source_named = false;
    for (const auto& v : violations) {
        if (v.find("receiver 1") != std::string::npos) receiver_named = true;
        if (v.find("source") != std::string::npos) source_named = true;
    }
    CHECK(receiver_named);
    CHECK(source_named);

    CHECK_THROWS_AS(require_valid(cfg), std::invalid_argument);
    CHECK(validate_config(single_receiver_config()).empty());
}

TEST_CASE("grid sweep is bit-identical across thread counts", "[experiments]") {
    ExperimentConfig cfg = small_grid_config();
    cfg.estimators.clear();
    EstimatorSpec maximum;
    EstimatorSpec delta;
    delta.method = EstimatorMethod::delta_peak;
    cfg.estimators = {maximum, delta};

    cfg.threads = 1;
    const GridSweepResult serial = run_grid_sweep(cfg);
    cfg.threads = 4;
    const GridSweepResult parallel = run_grid_sweep(cfg);

    REQUIRE(serial.records.size() == parallel.records.size());
    REQUIRE(serial.records.size() == 6 * 2 * 2);  // receivers * estimators * trials
    for (std::size_t i = 0; i < serial.records.size(); ++i) {
        CHECK(serial.records[i].estimated_distance_m == parallel.records[i].estimated_distance_m);
        CHECK(serial.records[i].abs_error_m == parallel.records[i].abs_error_m);
        CHECK(serial.records[i].estimator == parallel.records[i].estimator);
        CHECK(serial.records[i].trial == parallel.records[i].trial);
    }
    for (std::size_t e = 0; e < serial.error_maps.size(); ++e)
        CHECK(serial.error_maps[e] == parallel.error_maps[e]);
}

TEST_CASE("free-field grid ranges every node within one sample", "[experiments]") {
    ExperimentConfig cfg;
    cfg.room = RoomSpec{12.0, 11.0, 10.0, 1.0, 340.0};
    cfg.source = {6.0, 5.5, 5.0};
    GridSpec grid;
    grid.nx = 4;
    grid.ny = 3;
    grid.spacing_m = 0.8;
    grid.margin_m = 0.5;
    grid.z_m = 5.0;
    cfg.grid = grid;
    cfg.snr_db_list = {kInf};
    cfg.trials = 1;

    const GridSweepResult result = run_grid_sweep(cfg);
    REQUIRE(result.records.size() == 12);
    const double one_sample_m = 340.0 / 196'000.0;
    for (const auto& rec : result.records) {
        CHECK(rec.abs_error_m <= one_sample_m + 1e-12);
        CHECK(rec.true_distance_m > 0.0);
    }
    REQUIRE(result.error_maps.size() == 1);
    REQUIRE(result.error_maps[0].size() == 12);
    for (std::size_t r = 0; r < 12; ++r)
        CHECK(result.error_maps[0][r] == result.records[r].abs_error_m);  // one trial each
}

TEST_CASE("noiseless Monte Carlo collapses to a point estimate", "[experiments]") {
    ExperimentConfig cfg = single_receiver_config();
    cfg.snr_db_list = {kInf};
    cfg.trials = 1;

    const MonteCarloResult result = run_monte_carlo(cfg);
    REQUIRE(result.records.size() == 1);
    REQUIRE(result.summaries.size() == 1);
    CHECK(result.summaries[0].stats.n == 1);
    CHECK(result.summaries[0].stats.sigma == 0.0);
    CHECK(result.summaries[0].stats.epsilon ==
          std::abs(result.records[0].estimated_distance_m - result.records[0].true_distance_m));
    CHECK(result.records[0].abs_error_m <= 0.01);
    CHECK_THAT(result.records[0].true_distance_m, WithinAbs(1.553, 1e-9));
}

TEST_CASE("Monte Carlo summaries carry stats and densities", "[experiments]") {
    ExperimentConfig cfg = single_receiver_config();
    cfg.trials = 50;
    cfg.snr_db_list = {20.0};

    const MonteCarloResult result = run_monte_carlo(cfg);
    REQUIRE(result.records.size() == 50);
    REQUIRE(result.summaries.size() == 1);
    const auto& s = result.summaries[0];
    CHECK(s.label == "maximum");
    CHECK(s.stats.n == 50);
    CHECK(s.stats.p95 <= 0.05);
    CHECK(s.stats.epsilon <= 0.02);
    CHECK(s.stats.sigma <= 0.05);
    CHECK(s.density.bandwidth > 0.0);
    REQUIRE_FALSE(s.density.grid.empty());
    CHECK_THAT(trapezoid_mass(s.density), WithinAbs(1.0, 0.01));

    // trial indices are sequential within the single receiver
    for (std::size_t t = 0; t < result.records.size(); ++t)
        CHECK(result.records[t].trial == static_cast<long>(t));
}

TEST_CASE("Monte Carlo requires exactly one receiver", "[experiments]") {
    ExperimentConfig cfg = single_receiver_config();
    cfg.receivers.push_back({1.0, 1.0, 1.0});
    CHECK_THROWS_AS(run_monte_carlo(cfg), std::invalid_argument);
}

TEST_CASE("records follow SNR-major, estimator, trial order", "[experiments]") {
    ExperimentConfig cfg = single_receiver_config();
    cfg.trials = 2;
    EstimatorSpec delta;
    delta.method = EstimatorMethod::delta_peak;
    cfg.estimators = {EstimatorSpec{}, delta};

    const CompareResult result = compare_estimators(cfg, {kInf, 20.0});
    REQUIRE(result.records.size() == 8);
    const std::vector<double> snrs{kInf, 20.0};
    const std::vector<std::string> labels{"maximum", "delta_peak"};
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t e = 0; e < 2; ++e)
            for (std::size_t t = 0; t < 2; ++t) {
                const auto& rec = result.records[(s * 2 + e) * 2 + t];
                CHECK(rec.snr_db == snrs[s]);
                CHECK(rec.estimator == labels[e]);
                CHECK(rec.trial == static_cast<long>(t));
                CHECK(rec.receiver.x == 4.653);
            }
    REQUIRE(result.stats.size() == 2);
    REQUIRE(result.stats[0].size() == 2);
    CHECK(result.estimators == labels);
}

TEST_CASE("more noise never improves the error tail", "[experiments]") {
    ExperimentConfig cfg = single_receiver_config();
    cfg.trials = 40;
    const CompareResult result = compare_estimators(cfg, {0.1, 20.0});
    CHECK(result.stats[1][0].p95 <= result.stats[0][0].p95);
}

TEST_CASE("compare and grid sweep agree on identical cells", "[experiments]") {
    ExperimentConfig cfg = small_grid_config();
    cfg.snr_db_list = {7.0};
    cfg.trials = 1;

    const GridSweepResult grid = run_grid_sweep(cfg);
    const CompareResult cmp = compare_estimators(cfg, {7.0});
    REQUIRE(grid.summaries.size() == 1);
    REQUIRE(cmp.stats.size() == 1);
    CHECK(cmp.stats[0][0].p95 == grid.summaries[0].stats.p95);
    CHECK(cmp.stats[0][0].p50 == grid.summaries[0].stats.p50);
    CHECK(cmp.stats[0][0].mean == grid.summaries[0].stats.mean);
    CHECK(cmp.stats[0][0].epsilon == grid.summaries[0].stats.epsilon);
    CHECK(cmp.stats[0][0].sigma == grid.summaries[0].stats.sigma);
}

TEST_CASE("PPF sweep picks the lowest-P95 threshold per SNR", "[experiments]") {
    ExperimentConfig cfg = single_receiver_config();
    cfg.trials = 3;
    cfg.snr_db_list = {20.0, 5.0};

    const PpfSweepResult sweep = run_ppf_sweep(cfg, {65.0, 10.0});
    CHECK(sweep.ppf_values == std::vector<double>{65.0, 10.0});
    REQUIRE(sweep.stats.size() == 2);
    REQUIRE(sweep.stats[0].size() == 2);
    CHECK(sweep.records.size() == 2 * 2 * 3);
    REQUIRE(sweep.per_snr.size() == 2);
    for (std::size_t s = 0; s < 2; ++s) {
        const auto& summary = sweep.per_snr[s];
        const double best_p95 = std::min(sweep.stats[s][0].p95, sweep.stats[s][1].p95);
        CHECK(summary.best.p95 == best_p95);
        bool optimal_in_band = false;
        for (double ppf : summary.band)
            if (ppf == summary.optimal_ppf) optimal_in_band = true;
        CHECK(optimal_in_band);
        for (std::size_t e = 0; e < 2; ++e)
            if (sweep.stats[s][e].p95 <= best_p95 + 0.25) {
                bool in_band = false;
                for (double ppf : summary.band)
                    if (ppf == sweep.ppf_values[e]) in_band = true;
                CHECK(in_band);
            }
    }

    CHECK_THROWS_AS(run_ppf_sweep(cfg, {}), std::invalid_argument);
}

TEST_CASE("exponential fit recovers a clean curve", "[experiments]") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {0.0, 2.0, 4.0, 8.0, 12.0, 20.0})
        pts.emplace_back(x, 3.0 * std::exp(-0.4 * x) + 5.0);
    const PpfFit fit = detail_exp::fit_exponential(pts);
    CHECK_THAT(fit.b, WithinAbs(-0.4, 1e-12));
    CHECK_THAT(fit.a, WithinAbs(3.0, 1e-6));
    CHECK_THAT(fit.c, WithinAbs(5.0, 1e-6));
    CHECK_THAT(ppf_fit_eval(fit, 2.0), WithinAbs(pts[1].second, 1e-6));

    // Degenerate inputs fall back to a flat line through the mean.
    const PpfFit flat = detail_exp::fit_exponential({{0.0, 2.0}, {1.0, 4.0}});
    CHECK(flat.a == 0.0);
    CHECK_THAT(flat.c, WithinAbs(3.0, 1e-12));
    CHECK(detail_exp::fit_exponential({}).c == 0.0);
}
