#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "waveform.hpp"

namespace chirprange {

// Broadcast/wake timing. The broadcast starts at T0 = 0 and lasts tau_tx; all
// nodes wake simultaneously wake_offset after T0 and sample for tau_rx.
struct TimingSpec {
    double tau_tx_s = 0.030;
    double tau_rx_s = 0.001;
    double wake_offset_s = 0.029;
    double speed_of_sound_mps = 340.0;
    double sample_rate_hz = 196'000.0;
};

enum class Scenario { late_wake, early_wake, post_broadcast_wake };

// Magnitude of the valid-overlap cross-correlation; index i is the template
// offset in samples.
struct CorrelationSeries {
    std::vector<double> values;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return values.size(); }
};

struct Coverage {
    double d_min_m = 0.0;
    double d_max_m = 0.0;
};

// Raised when a correlation lag implies the signal was heard before it could
// have arrived (spurious late peak).
struct NegativeDistanceError : std::domain_error {
    using std::domain_error::domain_error;
};

inline void validate(const TimingSpec& t) {
    if (!(t.tau_rx_s > 0.0) || !(t.tau_rx_s <= t.tau_tx_s))
        throw std::invalid_argument("timing: require 0 < tau_rx <= tau_tx");
    if (!(t.wake_offset_s >= 0.0)) throw std::invalid_argument("timing: wake_offset must be >= 0");
    if (!(t.sample_rate_hz > 0.0)) throw std::invalid_argument("timing: sample rate must be > 0");
    if (!(t.speed_of_sound_mps > 0.0)) throw std::invalid_argument("timing: speed of sound must be > 0");
}

// values[i] = |sum_n snippet[n] * template[i + n]| for every offset keeping the
// snippet fully inside the template. Direct O(n*m) evaluation: with a 196-sample
// snippet it beats transform methods and is exactly reproducible.
inline CorrelationSeries pulse_compress(const Waveform& snippet, const Waveform& tmpl) {
    require_same_rate(snippet, tmpl, "pulse_compress");
    const std::size_t m = snippet.samples.size();
    const std::size_t n = tmpl.samples.size();
    if (m == 0) throw std::invalid_argument("pulse_compress: empty snippet");
    if (m > n) throw std::invalid_argument("pulse_compress: snippet longer than template");

    CorrelationSeries out;
    out.sample_rate_hz = snippet.sample_rate_hz;
    out.values.resize(n - m + 1);
    const double* s = snippet.samples.data();
    const double* t = tmpl.samples.data();
    for (std::size_t i = 0; i + m <= n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) acc += s[k] * t[i + k];
        out.values[i] = std::abs(acc);
    }
    return out;
}

// Signed form of the lag->distance map; negative values flag spurious late
// peaks (the snippet would predate the broadcast reaching the node).
inline double lag_to_distance_signed(double lag_samples, const TimingSpec& timing) {
    return timing.speed_of_sound_mps * (timing.wake_offset_s - lag_samples / timing.sample_rate_hz);
}

inline double lag_to_distance(double lag_samples, const TimingSpec& timing) {
    validate(timing);
    if (lag_samples < 0.0) throw std::invalid_argument("lag_to_distance: lag must be >= 0");
    const double d = lag_to_distance_signed(lag_samples, timing);
    if (d < 0.0)
        throw NegativeDistanceError("lag_to_distance: lag exceeds wake offset (negative distance)");
    return d;
}

inline Scenario classify_scenario(const TimingSpec& t) {
    // Wake offsets are configured at microsecond-to-millisecond granularity; a
    // sub-nanosecond gap to the late-wake boundary is rounding noise from
    // subtracting the configured durations, not an intentional scenario choice.
    const double late = t.tau_tx_s - t.tau_rx_s;
    const double eps = 1e-9;
    if (t.wake_offset_s < late - eps) return Scenario::early_wake;
    if (t.wake_offset_s > late + eps) return Scenario::post_broadcast_wake;
    return Scenario::late_wake;
}

// Distances whose full tau_rx window is filled with direct-path signal.
inline Coverage coverage(const TimingSpec& t, Scenario scenario) {
    validate(t);
    const double c = t.speed_of_sound_mps;
    switch (scenario) {
        case Scenario::late_wake:
            return {0.0, c * (t.tau_tx_s - t.tau_rx_s)};
        case Scenario::early_wake:
            return {0.0, c * t.wake_offset_s};
        case Scenario::post_broadcast_wake:
            return {c * (t.wake_offset_s - (t.tau_tx_s - t.tau_rx_s)), c * t.wake_offset_s};
    }
    throw std::invalid_argument("coverage: unknown scenario");
}

inline Coverage coverage(const TimingSpec& t) { return coverage(t, classify_scenario(t)); }

// Maximum distance the broadcast itself spans (c * tau_tx).
inline double broadcast_span(const TimingSpec& t) {
    validate(t);
    return t.speed_of_sound_mps * t.tau_tx_s;
}

// Ratio of received pulse duration to compressed pulse width:
// tau_rx^2 * delta_f_tx / tau_tx (= tau_rx * delta_f_rx).
inline double compression_ratio(double tau_rx_s, double tau_tx_s, double delta_f_tx_hz) {
    if (!(tau_rx_s > 0.0) || !(tau_tx_s > 0.0) || !(delta_f_tx_hz > 0.0))
        throw std::invalid_argument("compression_ratio: all arguments must be > 0");
    return tau_rx_s * tau_rx_s * delta_f_tx_hz / tau_tx_s;
}

}  // namespace chirprange
