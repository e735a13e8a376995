#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "chirprange/estimators.hpp"
#include "chirprange/ranging.hpp"
#include "chirprange/results.hpp"
#include "chirprange/rng.hpp"
#include "chirprange/room.hpp"
#include "chirprange/signals.hpp"
#include "chirprange/stats.hpp"

namespace chirprange {

// Receiver lattice in one quadrant of the room at height z, margin m from the
// walls, x varying fastest.
struct GridSpec {
    std::size_t nx = 15;
    std::size_t ny = 10;
    double spacing_m = 0.2;
    double margin_m = 0.2;
    double z_m = 1.0;
};

inline std::vector<Vec3> grid_positions(const GridSpec& g) {
    std::vector<Vec3> pts;
    pts.reserve(g.nx * g.ny);
    for (std::size_t iy = 0; iy < g.ny; ++iy)
        for (std::size_t ix = 0; ix < g.nx; ++ix)
            pts.push_back({g.margin_m + g.spacing_m * static_cast<double>(ix),
                           g.margin_m + g.spacing_m * static_cast<double>(iy), g.z_m});
    return pts;
}

struct ExperimentConfig {
    RoomSpec room;
    ChirpSpec chirp;
    TimingSpec timing;
    Vec3 source{3.1, 2.1, 1.0};
    std::vector<Vec3> receivers;        // used when grid is not set
    std::optional<GridSpec> grid;
    std::vector<double> snr_db_list{20.0};
    std::vector<EstimatorSpec> estimators{EstimatorSpec{}};
    long trials = 1;
    std::uint64_t master_seed = 0xc0ffee;
    int adc_bits = 12;
    unsigned threads = 0;  // 0 = hardware concurrency
};

inline std::vector<Vec3> effective_receivers(const ExperimentConfig& cfg) {
    return cfg.grid ? grid_positions(*cfg.grid) : cfg.receivers;
}

// Collects every violated constraint instead of stopping at the first.
inline std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> bad;
    const auto check = [&bad](const std::function<void()>& f) {
        try {
            f();
        } catch (const std::exception& e) {
            bad.emplace_back(e.what());
        }
    };
    check([&] { validate(cfg.room); });
    check([&] { validate(cfg.chirp); });
    check([&] { validate(cfg.timing); });
    if (cfg.chirp.sample_rate_hz != cfg.timing.sample_rate_hz)
        bad.emplace_back("chirp and timing sample rates differ");
    if (cfg.trials < 1) bad.emplace_back("trials must be >= 1");
    if (cfg.adc_bits < 2 || cfg.adc_bits > 24) bad.emplace_back("adc_bits must be in [2, 24]");
    if (cfg.snr_db_list.empty()) bad.emplace_back("snr list is empty");
    for (double snr : cfg.snr_db_list)
        if (std::isnan(snr)) bad.emplace_back("snr is NaN");
    if (cfg.estimators.empty()) bad.emplace_back("estimator list is empty");
    for (const auto& est : cfg.estimators)
        check([&] { validate(est); });
    if (cfg.grid) {
        if (cfg.grid->nx < 1 || cfg.grid->ny < 1) bad.emplace_back("grid counts must be >= 1");
        if (!(cfg.grid->spacing_m > 0.0)) bad.emplace_back("grid spacing must be > 0");
        if (!(cfg.grid->margin_m > 0.0)) bad.emplace_back("grid margin must be > 0");
    }
    const auto receivers = effective_receivers(cfg);
    if (receivers.empty()) bad.emplace_back("no receivers configured");
    if (!inside(cfg.room, cfg.source)) bad.emplace_back("source is outside the room");
    for (std::size_t i = 0; i < receivers.size(); ++i)
        if (!inside(cfg.room, receivers[i]))
            bad.emplace_back("receiver " + std::to_string(i) + " is outside the room");
    return bad;
}

inline void require_valid(const ExperimentConfig& cfg) {
    const auto bad = validate_config(cfg);
    if (bad.empty()) return;
    std::string msg = "invalid experiment config:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw std::invalid_argument(msg);
}

// Runs body(0..n-1) across a small thread pool. Each index owns its output
// slot, so results are identical for any thread count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct EstimatorSummary {
    std::string label;
    ErrorStats stats;
    DensityEstimate density;  // filled by Monte Carlo post-processing only
};

struct MonteCarloResult {
    std::vector<ResultRecord> records;
    std::vector<EstimatorSummary> summaries;
};

struct GridSweepResult {
    std::vector<ResultRecord> records;
    std::vector<EstimatorSummary> summaries;
    std::optional<GridSpec> grid;
    // Per estimator: ny*nx mean absolute error, row-major by iy (matches
    // grid_positions order).
    std::vector<std::vector<double>> error_maps;
};

namespace detail_exp {

// Clean traces are independent of noise/estimator and get reused across
// trials, SNRs and PPF values.
inline std::vector<ReceivedTrace> clean_traces(const ExperimentConfig& cfg,
                                               const std::vector<Vec3>& receivers) {
    std::vector<ReceivedTrace> traces(receivers.size());
    parallel_for(receivers.size(), cfg.threads, [&](std::size_t r) {
        traces[r] = receive_clean(cfg.chirp, cfg.room, cfg.source, receivers[r],
                                  cfg.timing.wake_offset_s, cfg.timing.tau_rx_s);
    });
    return traces;
}

// Record order: SNR-major, then receiver, then estimator, then trial. The
// noise seed depends only on (master_seed, receiver, trial), so every SNR,
// estimator and PPF sees the same noise shape and runs stay bit-reproducible
// under any parallelism.
inline std::vector<ResultRecord> estimate_matrix(const ExperimentConfig& cfg,
                                                 const Waveform& chirp_wave,
                                                 const std::vector<Vec3>& receivers,
                                                 const std::vector<ReceivedTrace>& traces,
                                                 const std::vector<double>& snrs,
                                                 const std::vector<EstimatorSpec>& estimators) {
    const std::size_t nr = receivers.size();
    const std::size_t ns = snrs.size();
    const std::size_t ne = estimators.size();
    const auto nt = static_cast<std::size_t>(cfg.trials);
    std::vector<ResultRecord> records(ns * nr * ne * nt);
    parallel_for(ns * nr, cfg.threads, [&](std::size_t item) {
        const std::size_t s = item / nr;
        const std::size_t r = item % nr;
        const double true_d = distance(cfg.source, receivers[r]);
        for (std::size_t t = 0; t < nt; ++t) {
            NoiseSpec noise;
            noise.snr_db = snrs[s];
            noise.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r),
                                     static_cast<std::uint64_t>(t));
            const Waveform snippet = finish_reception(traces[r], noise, cfg.timing.wake_offset_s,
                                                      cfg.timing.tau_rx_s, cfg.adc_bits);
            const CorrelationSeries corr = pulse_compress(snippet, chirp_wave);
            for (std::size_t e = 0; e < ne; ++e) {
                const std::size_t lag = select_direct_lag(corr, estimators[e]);
                const double est_d = lag_to_distance_signed(static_cast<double>(lag), cfg.timing);
                records[((s * nr + r) * ne + e) * nt + t] =
                    make_record(receivers[r], true_d, estimators[e].label(), snrs[s],
                                static_cast<long>(t), est_d);
            }
        }
    });
    return records;
}

// Absolute-error metrics plus the Gaussian accuracy/precision of the signed
// errors. A single sample degenerates to sigma = 0.
inline ErrorStats summarize(const std::vector<double>& abs_errors,
                            const std::vector<double>& signed_errors) {
    ErrorStats stats = error_metrics(abs_errors);
    if (signed_errors.size() >= 2) {
        const GaussianFit fit = gaussian_fit(signed_errors);
        stats.epsilon = std::abs(fit.mean);
        stats.sigma = fit.sigma;
    } else if (signed_errors.size() == 1) {
        stats.epsilon = std::abs(signed_errors[0]);
        stats.sigma = 0.0;
    }
    return stats;
}

inline std::vector<EstimatorSummary> summarize_by_estimator(
    const std::vector<ResultRecord>& records, const std::vector<EstimatorSpec>& estimators,
    bool with_density) {
    std::vector<EstimatorSummary> out;
    out.reserve(estimators.size());
    for (const auto& est : estimators) {
        const std::string label = est.label();
        std::vector<double> abs_errors, signed_errors, estimates;
        for (const auto& rec : records) {
            if (rec.estimator != label) continue;
            abs_errors.push_back(rec.abs_error_m);
            signed_errors.push_back(rec.estimated_distance_m - rec.true_distance_m);
            estimates.push_back(rec.estimated_distance_m);
        }
        EstimatorSummary summary;
        summary.label = label;
        summary.stats = summarize(abs_errors, signed_errors);
        if (with_density && !estimates.empty()) {
            const double h = silverman_bandwidth(estimates);
            summary.density = epanechnikov_kde(estimates, h, kde_grid(estimates, h));
        }
        out.push_back(std::move(summary));
    }
    return out;
}

}  // namespace detail_exp

// Fixed single receiver, repeated noise draws (pipeline steps 1-2 once, 3-5
// per trial), then Gaussian fit and kernel density of the estimates.
inline MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg) {
    require_valid(cfg);
    const auto receivers = effective_receivers(cfg);
    if (receivers.size() != 1)
        throw std::invalid_argument("run_monte_carlo: exactly one receiver required");
    const Waveform chirp_wave = generate_chirp(cfg.chirp);
    const auto traces = detail_exp::clean_traces(cfg, receivers);
    MonteCarloResult result;
    result.records = detail_exp::estimate_matrix(cfg, chirp_wave, receivers, traces,
                                                 {cfg.snr_db_list.front()}, cfg.estimators);
    result.summaries = detail_exp::summarize_by_estimator(result.records, cfg.estimators, true);
    return result;
}

// One estimate per receiver per estimator per trial at the first configured
// SNR; emits per-estimator error heatmaps when a grid is configured.
inline GridSweepResult run_grid_sweep(const ExperimentConfig& cfg) {
    require_valid(cfg);
    const auto receivers = effective_receivers(cfg);
    const Waveform chirp_wave = generate_chirp(cfg.chirp);
    const auto traces = detail_exp::clean_traces(cfg, receivers);
    GridSweepResult result;
    result.grid = cfg.grid;
    result.records = detail_exp::estimate_matrix(cfg, chirp_wave, receivers, traces,
                                                 {cfg.snr_db_list.front()}, cfg.estimators);
    result.summaries = detail_exp::summarize_by_estimator(result.records, cfg.estimators, false);
    const std::size_t nr = receivers.size();
    const std::size_t ne = cfg.estimators.size();
    const auto nt = static_cast<std::size_t>(cfg.trials);
    result.error_maps.assign(ne, std::vector<double>(nr, 0.0));
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t e = 0; e < ne; ++e) {
            double acc = 0.0;
            for (std::size_t t = 0; t < nt; ++t)
                acc += result.records[(r * ne + e) * nt + t].abs_error_m;
            result.error_maps[e][r] = acc / static_cast<double>(nt);
        }
    return result;
}

struct PpfFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

inline double ppf_fit_eval(const PpfFit& f, double snr_db) {
    return f.a * std::exp(f.b * snr_db) + f.c;
}

struct PpfSnrSummary {
    double snr_db = 0.0;
    double optimal_ppf = 0.0;       // PPF with the lowest P95
    std::vector<double> band;       // PPFs whose P95 is within 0.25 m of the best
    ErrorStats best;
};

struct PpfSweepResult {
    std::vector<double> ppf_values;
    std::vector<double> snr_db;
    std::vector<std::vector<ErrorStats>> stats;  // [snr][ppf]
    std::vector<PpfSnrSummary> per_snr;
    std::vector<ResultRecord> records;
    PpfFit fit;
};

namespace detail_exp {

// Least squares for y = a*exp(b*x) + c: scan b, solve (a, c) linearly.
inline PpfFit fit_exponential(const std::vector<std::pair<double, double>>& points) {
    PpfFit fit;
    if (points.empty()) return fit;
    double mean_y = 0.0;
    for (const auto& [x, y] : points) mean_y += y;
    mean_y /= static_cast<double>(points.size());
    fit.c = mean_y;  // degenerate fallback: constant
    if (points.size() < 3) return fit;
    double best_sse = INFINITY;
    for (int bi = -2000; bi <= 2000; ++bi) {
        const double b = bi / 1000.0;
        if (bi == 0) continue;
        double su = 0, suu = 0, sy = 0, suy = 0;
        const auto n = static_cast<double>(points.size());
        bool overflow = false;
        for (const auto& [x, y] : points) {
            const double u = std::exp(b * x);
            if (!std::isfinite(u) || u > 1e12) {
                overflow = true;
                break;
            }
            su += u, suu += u * u, sy += y, suy += u * y;
        }
        if (overflow) continue;
        const double det = n * suu - su * su;
        if (std::abs(det) < 1e-12) continue;
        const double a = (n * suy - su * sy) / det;
        const double c = (sy * suu - su * suy) / det;
        double sse = 0.0;
        for (const auto& [x, y] : points) {
            const double r = a * std::exp(b * x) + c - y;
            sse += r * r;
        }
        if (sse < best_sse) best_sse = sse, fit = {a, b, c};
    }
    return fit;
}

}  // namespace detail_exp

// Prominence-threshold sweep: correlations are computed once per
// (receiver, trial, SNR) and re-picked for every PPF.
inline PpfSweepResult run_ppf_sweep(const ExperimentConfig& cfg,
                                    const std::vector<double>& ppf_values) {
    if (ppf_values.empty()) throw std::invalid_argument("run_ppf_sweep: no PPF values");
    ExperimentConfig sweep_cfg = cfg;
    sweep_cfg.estimators.clear();
    for (double ppf : ppf_values) {
        EstimatorSpec est;
        est.method = EstimatorMethod::prominence;
        est.ppf = ppf;
        sweep_cfg.estimators.push_back(est);
    }
    require_valid(sweep_cfg);
    const auto receivers = effective_receivers(sweep_cfg);
    const Waveform chirp_wave = generate_chirp(sweep_cfg.chirp);
    const auto traces = detail_exp::clean_traces(sweep_cfg, receivers);

    PpfSweepResult result;
    result.ppf_values = ppf_values;
    result.snr_db = sweep_cfg.snr_db_list;
    result.records = detail_exp::estimate_matrix(sweep_cfg, chirp_wave, receivers, traces,
                                                 sweep_cfg.snr_db_list, sweep_cfg.estimators);

    const std::size_t nr = receivers.size();
    const std::size_t ne = ppf_values.size();
    const auto nt = static_cast<std::size_t>(sweep_cfg.trials);
    std::vector<std::pair<double, double>> optima;
    for (std::size_t s = 0; s < result.snr_db.size(); ++s) {
        std::vector<ErrorStats> row;
        row.reserve(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            std::vector<double> abs_errors, signed_errors;
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t t = 0; t < nt; ++t) {
                    const auto& rec = result.records[((s * nr + r) * ne + e) * nt + t];
                    abs_errors.push_back(rec.abs_error_m);
                    signed_errors.push_back(rec.estimated_distance_m - rec.true_distance_m);
                }
            row.push_back(detail_exp::summarize(abs_errors, signed_errors));
        }
        PpfSnrSummary snr_summary;
        snr_summary.snr_db = result.snr_db[s];
        std::size_t best = 0;
        for (std::size_t e = 1; e < ne; ++e)
            if (row[e].p95 < row[best].p95) best = e;
        snr_summary.optimal_ppf = ppf_values[best];
        snr_summary.best = row[best];
        for (std::size_t e = 0; e < ne; ++e)
            if (row[e].p95 <= row[best].p95 + 0.25) snr_summary.band.push_back(ppf_values[e]);
        optima.emplace_back(result.snr_db[s], snr_summary.optimal_ppf);
        result.per_snr.push_back(std::move(snr_summary));
        result.stats.push_back(std::move(row));
    }
    result.fit = detail_exp::fit_exponential(optima);
    return result;
}

struct CompareResult {
    std::vector<double> snr_db;
    std::vector<std::string> estimators;
    std::vector<std::vector<ErrorStats>> stats;  // [snr][estimator]
    std::vector<ResultRecord> records;
};

// Full estimator-by-SNR error table over the configured receivers.
inline CompareResult compare_estimators(const ExperimentConfig& cfg,
                                        const std::vector<double>& snr_list) {
    if (snr_list.empty()) throw std::invalid_argument("compare_estimators: no SNR values");
    ExperimentConfig run_cfg = cfg;
    run_cfg.snr_db_list = snr_list;
    require_valid(run_cfg);
    const auto receivers = effective_receivers(run_cfg);
    const Waveform chirp_wave = generate_chirp(run_cfg.chirp);
    const auto traces = detail_exp::clean_traces(run_cfg, receivers);

    CompareResult result;
    result.snr_db = snr_list;
    for (const auto& est : run_cfg.estimators) result.estimators.push_back(est.label());
    result.records = detail_exp::estimate_matrix(run_cfg, chirp_wave, receivers, traces, snr_list,
                                                 run_cfg.estimators);
    const std::size_t nr = receivers.size();
    const std::size_t ne = run_cfg.estimators.size();
    const auto nt = static_cast<std::size_t>(run_cfg.trials);
    for (std::size_t s = 0; s < snr_list.size(); ++s) {
        std::vector<ErrorStats> row;
        for (std::size_t e = 0; e < ne; ++e) {
            std::vector<double> abs_errors, signed_errors;
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t t = 0; t < nt; ++t) {
                    const auto& rec = result.records[((s * nr + r) * ne + e) * nt + t];
                    abs_errors.push_back(rec.abs_error_m);
                    signed_errors.push_back(rec.estimated_distance_m - rec.true_distance_m);
                }
            row.push_back(detail_exp::summarize(abs_errors, signed_errors));
        }
        result.stats.push_back(std::move(row));
    }
    return result;
}

}  // namespace chirprange
