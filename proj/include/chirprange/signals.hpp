#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rng.hpp"
#include "waveform.hpp"

namespace chirprange {

// Linear chirp sweeping f_start -> f_end over duration_s. A descending sweep
// (f_start > f_end) is the default broadcast signal.
struct ChirpSpec {
    double f_start_hz = 45'000.0;
    double f_end_hz = 25'000.0;
    double duration_s = 0.030;
    double amplitude = 1.0;
    double sample_rate_hz = 196'000.0;
};

struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();  // +inf => no noise
    std::uint64_t seed = 0;
};

inline void validate(const ChirpSpec& c) {
    if (!(c.duration_s > 0.0)) throw std::invalid_argument("chirp: duration must be > 0");
    if (!(c.amplitude > 0.0)) throw std::invalid_argument("chirp: amplitude must be > 0");
    if (!(c.sample_rate_hz > 0.0)) throw std::invalid_argument("chirp: sample rate must be > 0");
    const double nyquist = c.sample_rate_hz / 2.0;
    if (!(c.f_start_hz > 0.0 && c.f_start_hz < nyquist) || !(c.f_end_hz > 0.0 && c.f_end_hz < nyquist))
        throw std::invalid_argument("chirp: endpoint frequencies must lie in (0, sample_rate/2)");
}

// Phase of the chirp at time t; instantaneous frequency is its derivative/2pi.
inline double chirp_phase(const ChirpSpec& c, double t) {
    const double rate = (c.f_end_hz - c.f_start_hz) / c.duration_s;
    return 2.0 * std::numbers::pi * (c.f_start_hz * t + 0.5 * rate * t * t);
}

inline double instantaneous_frequency(const ChirpSpec& c, double t) {
    return c.f_start_hz + (c.f_end_hz - c.f_start_hz) * (t / c.duration_s);
}

inline Waveform generate_chirp(const ChirpSpec& c) {
    validate(c);
    const auto n = static_cast<std::size_t>(std::llround(c.duration_s * c.sample_rate_hz));
    Waveform w;
    w.sample_rate_hz = c.sample_rate_hz;
    w.t0_s = 0.0;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = c.amplitude * std::cos(chirp_phase(c, static_cast<double>(i) / c.sample_rate_hz));
    return w;
}

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Closed-form magnitude envelope of the chirp autocorrelation over a pulse of
// the given duration: |A^2 * tau * tri(t/tau) * sinc(df_w * t * tri(t/tau))|,
// where tri(x) = max(0, 1-|x|) and df_w is the bandwidth swept within the
// window. Serves as the oracle for numeric pulse compression.
inline double analytic_autocorrelation(const ChirpSpec& c, double t, double window_s) {
    if (!(window_s > 0.0)) throw std::invalid_argument("analytic_autocorrelation: window must be > 0");
    const double tri = std::max(0.0, 1.0 - std::abs(t) / window_s);
    const double df_w = std::abs(c.f_end_hz - c.f_start_hz) * (window_s / c.duration_s);
    return std::abs(c.amplitude * c.amplitude * window_s * tri * sinc(df_w * t * tri));
}

inline double analytic_autocorrelation(const ChirpSpec& c, double t) {
    return analytic_autocorrelation(c, t, c.duration_s);
}

// Adds seeded white Gaussian noise with variance signal_power / 10^(snr/10).
// The reference power is an explicit argument so pipelines can reference the
// SNR to a span other than the waveform they pollute (see simulate_reception).
inline Waveform add_white_noise(const Waveform& w, const NoiseSpec& noise, double signal_power) {
    if (w.samples.empty()) throw std::invalid_argument("add_white_noise: empty waveform");
    if (std::isnan(noise.snr_db) || noise.snr_db == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("add_white_noise: snr_db must be finite or +inf");
    if (noise.snr_db == std::numeric_limits<double>::infinity()) return w;
    if (!(signal_power > 0.0))
        throw std::invalid_argument("add_white_noise: signal power must be > 0 for finite SNR");

    const double sigma = std::sqrt(signal_power / std::pow(10.0, noise.snr_db / 10.0));
    GaussianRng gauss(noise.seed);
    Waveform out = w;
    for (double& x : out.samples) x += sigma * gauss();
    return out;
}

// SNR referenced to the mean-square power of w itself.
inline Waveform add_white_noise(const Waveform& w, const NoiseSpec& noise) {
    if (w.samples.empty()) throw std::invalid_argument("add_white_noise: empty waveform");
    if (noise.snr_db == std::numeric_limits<double>::infinity()) return w;
    return add_white_noise(w, noise, mean_square(w.samples));
}

// Samples of w on [start, start+duration), zero-padded where w is undefined.
inline Waveform extract_window(const Waveform& w, double start_s, double duration_s) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("extract_window: duration must be > 0");
    if (!(w.sample_rate_hz > 0.0)) throw std::invalid_argument("extract_window: waveform has no sample rate");
    const auto n0 = std::llround((start_s - w.t0_s) * w.sample_rate_hz);
    const auto len = std::llround(duration_s * w.sample_rate_hz);
    Waveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.t0_s = start_s;
    out.samples.assign(static_cast<std::size_t>(std::max<long long>(len, 0)), 0.0);
    for (long long k = 0; k < len; ++k) {
        const long long idx = n0 + k;
        if (idx >= 0 && idx < static_cast<long long>(w.samples.size()))
            out.samples[static_cast<std::size_t>(k)] = w.samples[static_cast<std::size_t>(idx)];
    }
    return out;
}

// Mid-tread uniform quantizer with 2^bits levels on [-full_scale, +full_scale],
// clamping like an ADC whose gain was set for full_scale. Idempotent.
inline Waveform quantize(const Waveform& w, int bits, double full_scale) {
    if (bits < 2 || bits > 24) throw std::invalid_argument("quantize: bits must be in [2, 24]");
    if (!(full_scale > 0.0)) throw std::invalid_argument("quantize: full_scale must be > 0");
    const double step = 2.0 * full_scale / static_cast<double>(1LL << bits);
    const auto qmax = static_cast<long long>((1LL << (bits - 1)) - 1);
    const auto qmin = -static_cast<long long>(1LL << (bits - 1));
    Waveform out = w;
    for (double& x : out.samples) {
        const long long q = std::clamp(std::llround(x / step), qmin, qmax);
        x = static_cast<double>(q) * step;
    }
    return out;
}

}  // namespace chirprange
