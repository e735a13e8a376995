// Command-line front end: one subcommand per pipeline stage, INI-style config
// with --set overrides, deterministic CSV/SVG emission.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chirprange/chirprange.hpp"

namespace cr = chirprange;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::string scale;
    std::string snr;
    std::string estimator;
    std::string ppf;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (INI-style sections)");
    cmd->add_option("--out", args.out_dir, "Output directory (default $CHIRPRANGE_OUT or '.')");
    cmd->add_option("--set", args.sets, "Override config entry, section.key=value")
        ->take_all();
    cmd->add_option("--scale", args.scale, "Workload scale: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--seed", args.seed, "Master seed for noise generation");
    cmd->add_option("--alpha", args.alpha, "Room absorption coefficient");
    cmd->add_option("--snr", args.snr, "SNR in dB (list allowed, 'inf' for noiseless)");
    cmd->add_option("--estimator", args.estimator,
                    "Estimator list: maximum window window_linear window_quad_pos "
                    "window_quad_neg window_exp prominence delta");
    cmd->add_option("--ppf", args.ppf, "Peak prominence factor (list allowed for 'ppf')");
    cmd->add_option("--threads", args.threads, "Worker threads (0 = hardware)");
}

cr::KvMap merged_config(const CommonArgs& args, bool ppf_is_list) {
    cr::KvMap kv;
    if (!args.config_path.empty()) kv = cr::load_config_file(args.config_path);
    for (const auto& assignment : args.sets) cr::apply_override(kv, assignment);
    if (!args.scale.empty()) kv["run.scale"] = args.scale;
    if (args.seed) kv["run.master_seed"] = std::to_string(*args.seed);
    if (args.alpha) kv["room.absorption"] = cr::detail::format_float(*args.alpha);
    if (!args.snr.empty()) kv["run.snr"] = args.snr;
    if (!args.estimator.empty()) kv["estimators.list"] = args.estimator;
    if (!args.ppf.empty() && !ppf_is_list) kv["estimators.ppf"] = args.ppf;
    if (args.threads) kv["run.threads"] = std::to_string(*args.threads);
    return kv;
}

std::string resolve_out_dir(const CommonArgs& args) {
    std::string dir = args.out_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("CHIRPRANGE_OUT")) dir = env;
    }
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

cr::WaveformFormat parse_format(const std::string& format) {
    if (format == "wav") return cr::WaveformFormat::wav_pcm16;
    if (format == "csv" || format.empty()) return cr::WaveformFormat::csv_float;
    throw cr::ConfigError("--format must be csv or wav, got '" + format + "'");
}

std::vector<cr::SummaryRow> summary_rows(const std::vector<cr::EstimatorSummary>& summaries,
                                         double snr_db) {
    std::vector<cr::SummaryRow> rows;
    for (const auto& s : summaries) rows.push_back({s.label, snr_db, s.stats});
    return rows;
}

void print_summary(const std::vector<cr::SummaryRow>& rows) {
    std::printf("%-18s %10s %8s %10s %10s %10s %10s %10s\n", "estimator", "snr_db", "n", "mean_m",
                "p50_m", "p95_m", "p100_m", "sigma_m");
    for (const auto& r : rows)
        std::printf("%-18s %10g %8zu %10.4f %10.4f %10.4f %10.4f %10.4f\n", r.estimator.c_str(),
                    r.snr_db, r.stats.n, r.stats.mean, r.stats.p50, r.stats.p95, r.stats.p100,
                    r.stats.sigma);
}

std::vector<cr::Series> ecdf_series(const std::vector<cr::ResultRecord>& records,
                                    const std::vector<std::string>& labels) {
    std::vector<cr::Series> series;
    for (const auto& label : labels) {
        std::vector<double> errors;
        for (const auto& rec : records)
            if (rec.estimator == label) errors.push_back(rec.abs_error_m);
        if (errors.empty()) continue;
        cr::Series s;
        s.label = label;
        s.step = true;
        for (const auto& [value, frac] : cr::empirical_cdf(errors)) s.points.emplace_back(value, frac);
        series.push_back(std::move(s));
    }
    return series;
}

std::vector<double> parse_ppf_list(const std::string& text) {
    std::vector<double> values;
    std::string cur;
    const auto flush = [&] {
        if (cur.empty()) return;
        values.push_back(std::strtod(cur.c_str(), nullptr));
        cur.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ')
            flush();
        else
            cur.push_back(c);
    }
    flush();
    return values;
}

int cmd_synth(const CommonArgs& args, const std::string& format) {
    const auto kv = merged_config(args, false);
    const auto cfg = cr::resolve_config(kv, cr::Purpose::single);
    const std::string dir = resolve_out_dir(args);
    const cr::Waveform chirp = cr::generate_chirp(cfg.chirp);
    const auto fmt = parse_format(format);
    const std::string path =
        join_path(dir, fmt == cr::WaveformFormat::csv_float ? "chirp.csv" : "chirp.wav");
    cr::save_waveform(chirp, path, fmt);
    const double df = std::abs(cfg.chirp.f_end_hz - cfg.chirp.f_start_hz);
    std::printf("template: %zu samples, %.6g s, %.6g -> %.6g Hz\n", chirp.size(),
                chirp.duration_s(), cfg.chirp.f_start_hz, cfg.chirp.f_end_hz);
    std::printf("compression ratio (full pulse): %.6g\n",
                cr::compression_ratio(cfg.timing.tau_tx_s, cfg.timing.tau_tx_s, df));
    std::printf("compression ratio (wake window): %.6g\n",
                cr::compression_ratio(cfg.timing.tau_rx_s, cfg.timing.tau_tx_s, df));
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_rir(const CommonArgs& args) {
    const auto kv = merged_config(args, false);
    const auto cfg = cr::resolve_config(kv, cr::Purpose::single);
    const std::string dir = resolve_out_dir(args);
    const cr::Vec3 receiver = cfg.receivers.front();
    const double length_s = cfg.timing.wake_offset_s + cfg.timing.tau_rx_s;
    const cr::ImpulseResponse rir =
        cr::compute_rir(cfg.room, cfg.source, receiver, cfg.timing.sample_rate_hz,
                        cr::default_max_order(cfg.room), length_s);
    const std::string path = join_path(dir, "rir.csv");
    cr::save_waveform_csv(rir.taps, path);
    const double d = cr::distance(cfg.source, receiver);
    std::printf("direct path: %.6g m (%.6g ms), reflection coefficient %.6g\n", d,
                1e3 * d / cfg.room.speed_of_sound_mps, cr::reflection_coefficient(cfg.room));
    std::printf("image sources: %zu (order <= %d), %zu taps\n",
                static_cast<std::size_t>(rir.image_count), rir.max_order, rir.taps.size());
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_range(const CommonArgs& args, const std::string& input, const std::string& format,
              const std::string& template_path) {
    cr::KvMap kv = merged_config(args, false);
    if (kv.find("estimators.list") == kv.end())
        kv["estimators.list"] = "maximum window_quad_pos prominence delta";
    const auto cfg = cr::resolve_config(kv, cr::Purpose::single);
    const std::string dir = resolve_out_dir(args);
    const auto fmt = parse_format(format);
    const cr::Waveform snippet = cr::load_waveform(input, fmt, cfg.timing.sample_rate_hz);
    cr::Waveform tmpl;
    if (template_path.empty() || template_path == "default")
        tmpl = cr::generate_chirp(cfg.chirp);
    else
        tmpl = cr::load_waveform(template_path, fmt, cfg.timing.sample_rate_hz);

    std::string body = "estimator,lag_samples,distance_m\n";
    const cr::CorrelationSeries corr = cr::pulse_compress(snippet, tmpl);
    for (const auto& est : cfg.estimators) {
        const std::size_t lag = cr::select_direct_lag(corr, est);
        const double distance =
            cr::lag_to_distance_signed(static_cast<double>(lag), cfg.timing);
        std::printf("%-18s lag %6zu  distance %.6g m\n", est.label().c_str(), lag, distance);
        body += est.label() + "," + std::to_string(lag) + "," +
                cr::detail::format_float(distance) + "\n";
    }
    const std::string path = join_path(dir, "range.csv");
    auto out = cr::detail::open_out(path);
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_mc(const CommonArgs& args) {
    const auto kv = merged_config(args, false);
    const auto cfg = cr::resolve_config(kv, cr::Purpose::monte_carlo);
    const std::string dir = resolve_out_dir(args);
    const cr::MonteCarloResult result = cr::run_monte_carlo(cfg);
    cr::save_results(result.records, join_path(dir, "mc_results.csv"));
    const auto rows = summary_rows(result.summaries, cfg.snr_db_list.front());
    cr::save_summary(rows, join_path(dir, "mc_summary.csv"));

    std::vector<cr::Series> density;
    for (const auto& s : result.summaries) {
        if (s.density.grid.empty()) continue;
        cr::Series curve;
        curve.label = s.label;
        for (std::size_t i = 0; i < s.density.grid.size(); ++i)
            curve.points.emplace_back(s.density.grid[i], s.density.density[i]);
        density.push_back(std::move(curve));
    }
    if (!density.empty())
        cr::svg_line_chart(join_path(dir, "mc_density.svg"), density,
                           "Estimated distance density", "distance (m)", "density (1/m)");
    std::vector<std::string> labels;
    for (const auto& s : result.summaries) labels.push_back(s.label);
    cr::svg_line_chart(join_path(dir, "mc_cdf.svg"), ecdf_series(result.records, labels),
                       "Absolute error CDF", "abs error (m)", "P(error <= x)");
    for (const auto& s : result.summaries)
        std::printf("%-18s epsilon %.6g m  sigma %.6g m  (n=%zu)\n", s.label.c_str(),
                    s.stats.epsilon, s.stats.sigma, s.stats.n);
    print_summary(rows);
    std::printf("wrote %s\n", join_path(dir, "mc_results.csv").c_str());
    return 0;
}

int cmd_grid(const CommonArgs& args) {
    const auto kv = merged_config(args, false);
    const auto cfg = cr::resolve_config(kv, cr::Purpose::grid);
    const std::string dir = resolve_out_dir(args);
    const cr::GridSweepResult result = cr::run_grid_sweep(cfg);
    cr::save_results(result.records, join_path(dir, "grid_results.csv"));
    const auto rows = summary_rows(result.summaries, cfg.snr_db_list.front());
    cr::save_summary(rows, join_path(dir, "grid_summary.csv"));
    if (result.grid) {
        const cr::GridSpec& g = *result.grid;
        for (std::size_t e = 0; e < result.summaries.size(); ++e)
            cr::svg_heatmap(join_path(dir, "heatmap_" + result.summaries[e].label + ".svg"),
                            result.error_maps[e], g.nx, g.ny, g.margin_m, g.margin_m,
                            g.spacing_m, g.spacing_m,
                            "Absolute error, " + result.summaries[e].label, "abs error (m)");
    }
    std::vector<std::string> labels;
    for (const auto& s : result.summaries) labels.push_back(s.label);
    cr::svg_line_chart(join_path(dir, "grid_cdf.svg"), ecdf_series(result.records, labels),
                       "Absolute error CDF", "abs error (m)", "P(error <= x)");
    print_summary(rows);
    std::printf("wrote %s\n", join_path(dir, "grid_results.csv").c_str());
    return 0;
}

int cmd_ppf(const CommonArgs& args) {
    const auto kv = merged_config(args, true);
    const auto cfg = cr::resolve_config(kv, cr::Purpose::grid);
    const std::string dir = resolve_out_dir(args);
    std::vector<double> ppf_values =
        args.ppf.empty() ? std::vector<double>{10, 20, 30, 40, 50, 60, 65, 70, 80, 90}
                         : parse_ppf_list(args.ppf);
    const cr::PpfSweepResult result = cr::run_ppf_sweep(cfg, ppf_values);
    cr::save_results(result.records, join_path(dir, "ppf_results.csv"));

    std::vector<cr::SummaryRow> rows;
    std::vector<cr::Series> p95_series;
    for (std::size_t s = 0; s < result.snr_db.size(); ++s) {
        cr::Series curve;
        curve.label = "snr " + cr::detail::fmt6(result.snr_db[s]) + " dB";
        for (std::size_t e = 0; e < result.ppf_values.size(); ++e) {
            rows.push_back({"prominence_" + cr::detail::fmt6(result.ppf_values[e]),
                            result.snr_db[s], result.stats[s][e]});
            curve.points.emplace_back(result.ppf_values[e], result.stats[s][e].p95);
        }
        p95_series.push_back(std::move(curve));
    }
    cr::save_summary(rows, join_path(dir, "ppf_stats.csv"));
    cr::svg_line_chart(join_path(dir, "ppf_p95.svg"), p95_series, "P95 error vs PPF", "PPF",
                       "P95 abs error (m)");

    std::string body = "snr_db,optimal_ppf,band_min,band_max,fit_ppf\n";
    for (const auto& snr : result.per_snr) {
        double band_min = snr.band.empty() ? snr.optimal_ppf : snr.band.front();
        double band_max = band_min;
        for (double v : snr.band) band_min = std::min(band_min, v), band_max = std::max(band_max, v);
        body += cr::detail::format_float(snr.snr_db) + "," +
                cr::detail::format_float(snr.optimal_ppf) + "," +
                cr::detail::format_float(band_min) + "," + cr::detail::format_float(band_max) +
                "," + cr::detail::format_float(cr::ppf_fit_eval(result.fit, snr.snr_db)) + "\n";
        std::printf("snr %g dB: optimal PPF %g (band %g..%g, P95 %.4f m)\n", snr.snr_db,
                    snr.optimal_ppf, band_min, band_max, snr.best.p95);
    }
    const std::string band_path = join_path(dir, "ppf_band.csv");
    auto out = cr::detail::open_out(band_path);
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + band_path);
    std::printf("fit: ppf_opt(snr) = %.6g * exp(%.6g * snr) + %.6g\n", result.fit.a, result.fit.b,
                result.fit.c);
    std::printf("wrote %s\n", band_path.c_str());
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    cr::KvMap kv = merged_config(args, false);
    if (kv.find("estimators.list") == kv.end())
        kv["estimators.list"] = "maximum window_quad_pos prominence delta";
    if (kv.find("run.snr") == kv.end()) kv["run.snr"] = "0.1 3 6 10 20 40 60";
    const auto cfg = cr::resolve_config(kv, cr::Purpose::grid);
    const std::string dir = resolve_out_dir(args);
    const cr::CompareResult result = cr::compare_estimators(cfg, cfg.snr_db_list);
    cr::save_results(result.records, join_path(dir, "compare_results.csv"));
    std::vector<cr::SummaryRow> rows;
    for (std::size_t s = 0; s < result.snr_db.size(); ++s)
        for (std::size_t e = 0; e < result.estimators.size(); ++e)
            rows.push_back({result.estimators[e], result.snr_db[s], result.stats[s][e]});
    cr::save_summary(rows, join_path(dir, "compare_summary.csv"));
    print_summary(rows);
    std::printf("wrote %s\n", join_path(dir, "compare_summary.csv").c_str());
    return 0;
}

int cmd_power(const CommonArgs& args) {
    const std::string dir = resolve_out_dir(args);
    const auto components = cr::default_components();
    const cr::PowerBreakdown breakdown =
        cr::duty_cycle_power(components, cr::kDefaultSupplyVoltage, 0.001, 1.0);
    std::string body = "component,active_current_ua,passive_current_ua,active_nw,passive_nw,total_nw\n";
    std::printf("%-14s %10s %11s %11s %12s %10s\n", "component", "I_act(uA)", "I_pass(uA)",
                "P_act(nW)", "P_pass(nW)", "P_tot(nW)");
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        const auto& p = breakdown.components[i];
        std::printf("%-14s %10.2f %11.2f %11.1f %12.1f %10.1f\n", c.name.c_str(),
                    c.active_current_ua, c.passive_current_ua, p.active_nw, p.passive_nw,
                    p.total_nw);
        body += c.name + "," + cr::detail::format_float(c.active_current_ua) + "," +
                cr::detail::format_float(c.passive_current_ua) + "," +
                cr::detail::format_float(p.active_nw) + "," +
                cr::detail::format_float(p.passive_nw) + "," +
                cr::detail::format_float(p.total_nw) + "\n";
    }
    std::printf("%-14s %10s %11s %11.1f %12.1f %10.1f\n", "TOTAL", "", "",
                breakdown.active_total_nw, breakdown.passive_total_nw, breakdown.grand_total_nw);
    body += "TOTAL,,," + cr::detail::format_float(breakdown.active_total_nw) + "," +
            cr::detail::format_float(breakdown.passive_total_nw) + "," +
            cr::detail::format_float(breakdown.grand_total_nw) + "\n";
    const double years = cr::battery_life(breakdown.grand_total_nw, cr::kCr2032CapacityMah,
                                          cr::kDefaultSupplyVoltage);
    std::printf("CR2032 battery life at 1 wake/s: %.2f years (shelf-life cap %.1f)\n", years,
                cr::kDefaultShelfLifeYears);
    const std::string path = join_path(dir, "power.csv");
    auto out = cr::detail::open_out(path);
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid RF-acoustic ranging toolkit: chirp pulse compression, image-source "
                 "room simulation, distance estimators, power model"};
    app.require_subcommand(1);

    CommonArgs synth_args, rir_args, range_args, mc_args, grid_args, ppf_args, compare_args,
        power_args;
    std::string synth_format = "csv", range_format = "csv", range_input, range_template;

    auto* synth = app.add_subcommand("synth", "Generate the chirp template waveform");
    add_common(synth, synth_args);
    synth->add_option("--format", synth_format, "Waveform format: csv or wav")
        ->check(CLI::IsMember({"csv", "wav"}));

    auto* rir = app.add_subcommand("rir", "Compute the room impulse response");
    add_common(rir, rir_args);

    auto* range = app.add_subcommand("range", "Estimate distance from a recorded snippet");
    add_common(range, range_args);
    range->add_option("--input", range_input, "Recorded wake-window waveform")->required();
    range->add_option("--format", range_format, "Waveform format: csv or wav")
        ->check(CLI::IsMember({"csv", "wav"}));
    range->add_option("--template", range_template,
                      "Template waveform file ('default' = synthesize from config)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo noise sweep at a fixed receiver");
    add_common(mc, mc_args);
    auto* grid = app.add_subcommand("grid", "Receiver-grid error sweep");
    add_common(grid, grid_args);
    auto* ppf = app.add_subcommand("ppf", "Prominence-factor sweep");
    add_common(ppf, ppf_args);
    auto* compare = app.add_subcommand("compare", "Estimator comparison across SNR levels");
    add_common(compare, compare_args);
    auto* power = app.add_subcommand("power", "Duty-cycle power budget and battery life");
    add_common(power, power_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_args, synth_format);
        if (rir->parsed()) return cmd_rir(rir_args);
        if (range->parsed())
            return cmd_range(range_args, range_input, range_format, range_template);
        if (mc->parsed()) return cmd_mc(mc_args);
        if (grid->parsed()) return cmd_grid(grid_args);
        if (ppf->parsed()) return cmd_ppf(ppf_args);
        if (compare->parsed()) return cmd_compare(compare_args);
        if (power->parsed()) return cmd_power(power_args);
    } catch (const cr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
