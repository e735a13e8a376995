#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ranging.hpp"
#include "signals.hpp"
#include "waveform.hpp"

namespace chirprange {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

// Rectangular (shoebox) room with one energy absorption coefficient shared by
// all six walls.
struct RoomSpec {
    double lx_m = 6.0;
    double ly_m = 4.0;
    double lz_m = 2.5;
    double absorption = 0.3;          // alpha, fraction of energy absorbed per bounce
    double speed_of_sound_mps = 340.0;
};

struct ImpulseResponse {
    Waveform taps;
    Vec3 source;
    Vec3 receiver;
    int max_order = 0;
    std::size_t image_count = 0;  // lattice images summed (order <= max_order, within length)
};

inline void validate(const RoomSpec& r) {
    if (!(r.lx_m > 0.0 && r.ly_m > 0.0 && r.lz_m > 0.0))
        throw std::invalid_argument("room: dimensions must be > 0");
    if (!(r.absorption >= 0.0 && r.absorption <= 1.0))
        throw std::invalid_argument("room: absorption must be in [0, 1]");
    if (!(r.speed_of_sound_mps > 0.0)) throw std::invalid_argument("room: speed of sound must be > 0");
}

inline bool inside(const RoomSpec& r, Vec3 p) {
    return p.x > 0.0 && p.x < r.lx_m && p.y > 0.0 && p.y < r.ly_m && p.z > 0.0 && p.z < r.lz_m;
}

// Pressure reflection coefficient per bounce.
inline double reflection_coefficient(const RoomSpec& r) { return std::sqrt(1.0 - r.absorption); }

// Truncation order: smallest N with beta^N below 1e-3 of the direct-path
// amplitude (image paths are never shorter than the direct path, so the
// distance factor only attenuates further). Capped at 12, which covers every
// image able to reach a 30 ms window in the default room.
inline int default_max_order(const RoomSpec& room) {
    validate(room);
    const double beta = reflection_coefficient(room);
    for (int n = 0; n <= 12; ++n)
        if (std::pow(beta, n) < 1e-3) return n;
    return 12;
}

// Allen-Berkley image-source model: mirror the source across the wall lattice,
// sum beta^bounces / (4*pi*d) at the nearest sample to each image delay.
inline ImpulseResponse compute_rir(const RoomSpec& room, Vec3 source, Vec3 receiver,
                                   double sample_rate_hz, int max_order, double length_s) {
    validate(room);
    if (!inside(room, source)) throw std::invalid_argument("compute_rir: source outside room");
    if (!inside(room, receiver)) throw std::invalid_argument("compute_rir: receiver outside room");
    if (max_order < 0) throw std::invalid_argument("compute_rir: max_order must be >= 0");
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("compute_rir: sample rate must be > 0");

    const double c = room.speed_of_sound_mps;
    const double d_direct = distance(source, receiver);
    if (!(d_direct > 0.0)) throw std::invalid_argument("compute_rir: source and receiver coincide");
    if (!(length_s * c >= d_direct))
        throw std::invalid_argument("compute_rir: length shorter than the direct-path delay");

    const auto n_taps = static_cast<std::size_t>(std::llround(length_s * sample_rate_hz));
    ImpulseResponse rir;
    rir.taps.sample_rate_hz = sample_rate_hz;
    rir.taps.t0_s = 0.0;
    rir.taps.samples.assign(n_taps, 0.0);
    rir.source = source;
    rir.receiver = receiver;
    rir.max_order = max_order;

    const double beta = reflection_coefficient(room);
    std::vector<double> beta_pow(static_cast<std::size_t>(3 * max_order + 4), 1.0);
    for (std::size_t k = 1; k < beta_pow.size(); ++k) beta_pow[k] = beta_pow[k - 1] * beta;

    const double reach = length_s * c;  // images farther than this land past the last tap
    const auto lattice_bound = [&](double dim) {
        const int by_order = (max_order + 1) / 2;
        const int by_reach = static_cast<int>(reach / (2.0 * dim)) + 1;
        return std::min(by_order, by_reach);
    };
    const int bx = lattice_bound(room.lx_m);
    const int by = lattice_bound(room.ly_m);
    const int bz = lattice_bound(room.lz_m);

    const std::array<double, 3> s{source.x, source.y, source.z};
    const std::array<double, 3> r{receiver.x, receiver.y, receiver.z};
    const std::array<double, 3> dims{room.lx_m, room.ly_m, room.lz_m};

    for (int mx = -bx; mx <= bx; ++mx)
        for (int q = 0; q <= 1; ++q) {
            const int ox = std::abs(2 * mx - q);
            if (ox > max_order) continue;
            const double ix = (1 - 2 * q) * s[0] - r[0] + 2.0 * mx * dims[0];
            for (int my = -by; my <= by; ++my)
                for (int j = 0; j <= 1; ++j) {
                    const int oy = std::abs(2 * my - j);
                    if (ox + oy > max_order) continue;
                    const double iy = (1 - 2 * j) * s[1] - r[1] + 2.0 * my * dims[1];
                    for (int mz = -bz; mz <= bz; ++mz)
                        for (int k = 0; k <= 1; ++k) {
                            const int oz = std::abs(2 * mz - k);
                            if (ox + oy + oz > max_order) continue;
                            const double iz = (1 - 2 * k) * s[2] - r[2] + 2.0 * mz * dims[2];
                            const double d = std::sqrt(ix * ix + iy * iy + iz * iz);
                            const auto idx = std::llround(sample_rate_hz * d / c);
                            if (idx < 0 || idx >= static_cast<long long>(n_taps)) continue;
                            rir.taps.samples[static_cast<std::size_t>(idx)] +=
                                beta_pow[static_cast<std::size_t>(ox + oy + oz)] /
                                (4.0 * std::numbers::pi * d);
                            ++rir.image_count;
                        }
                }
        }
    return rir;
}

// Full linear convolution; exploits RIR sparsity (impulse taps, mostly zero).
inline Waveform convolve(const Waveform& signal, const ImpulseResponse& rir) {
    require_same_rate(signal, rir.taps, "convolve");
    if (signal.samples.empty() || rir.taps.samples.empty())
        throw std::invalid_argument("convolve: empty operand");
    Waveform out;
    out.sample_rate_hz = signal.sample_rate_hz;
    out.t0_s = signal.t0_s;
    out.samples.assign(signal.samples.size() + rir.taps.samples.size() - 1, 0.0);
    const auto n = signal.samples.size();
    for (std::size_t j = 0; j < rir.taps.samples.size(); ++j) {
        const double tap = rir.taps.samples[j];
        if (tap == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out.samples[i + j] += signal.samples[i] * tap;
    }
    return out;
}

// Clean (noiseless) reception products; reusable across noise trials.
struct ReceivedTrace {
    Waveform trace;               // chirp convolved with the RIR, t0 = 0
    double direct_delay_s = 0.0;
    double reference_power = 0.0;  // mean square over the direct-path-active span
    double full_scale = 0.0;       // max |clean trace|, the auto ADC gain
};

inline ReceivedTrace receive_clean(const ChirpSpec& chirp, const RoomSpec& room, Vec3 source,
                                   Vec3 receiver, double t_wake_s, double tau_rx_s,
                                   int max_order = -1) {
    if (!(t_wake_s >= 0.0)) throw std::invalid_argument("receive_clean: t_wake must be >= 0");
    if (!(tau_rx_s > 0.0)) throw std::invalid_argument("receive_clean: tau_rx must be > 0");
    if (max_order < 0) max_order = default_max_order(room);

    const double d = distance(source, receiver);
    const double direct_delay = d / room.speed_of_sound_mps;
    // Long enough for the wake window; far nodes still need their direct tap.
    const double length_s = std::max(t_wake_s + tau_rx_s, direct_delay + tau_rx_s);

    const Waveform tx = generate_chirp(chirp);
    const ImpulseResponse rir =
        compute_rir(room, source, receiver, chirp.sample_rate_hz, max_order, length_s);

    ReceivedTrace rt;
    rt.trace = convolve(tx, rir);
    rt.direct_delay_s = direct_delay;

    // SNR reference: signal power where the direct path is active. For a free
    // field this is exactly the (scaled) chirp power, so the wake-window SNR
    // equals the configured value.
    const auto i0 = std::min<std::size_t>(
        static_cast<std::size_t>(std::llround(direct_delay * chirp.sample_rate_hz)),
        rt.trace.samples.size());
    const auto i1 = std::min(i0 + tx.samples.size(), rt.trace.samples.size());
    double acc = 0.0;
    for (std::size_t i = i0; i < i1; ++i) acc += rt.trace.samples[i] * rt.trace.samples[i];
    rt.reference_power = i1 > i0 ? acc / static_cast<double>(i1 - i0) : 0.0;
    rt.full_scale = max_abs(rt.trace.samples);
    return rt;
}

// Noise + wake-window extraction + ADC quantization on a cached clean trace.
inline Waveform finish_reception(const ReceivedTrace& rt, const NoiseSpec& noise, double t_wake_s,
                                 double tau_rx_s, int adc_bits = 12) {
    Waveform noisy = noise.snr_db == std::numeric_limits<double>::infinity()
                         ? rt.trace
                         : add_white_noise(rt.trace, noise, rt.reference_power);
    Waveform snippet = extract_window(noisy, t_wake_s, tau_rx_s);
    if (rt.full_scale > 0.0) snippet = quantize(snippet, adc_bits, rt.full_scale);
    return snippet;
}

// One-shot pipeline: synth -> room -> noise -> wake window -> ADC.
inline Waveform simulate_reception(const ChirpSpec& chirp, const RoomSpec& room, Vec3 source,
                                   Vec3 receiver, const NoiseSpec& noise, double t_wake_s,
                                   double tau_rx_s, int max_order = -1, int adc_bits = 12) {
    const ReceivedTrace rt = receive_clean(chirp, room, source, receiver, t_wake_s, tau_rx_s, max_order);
    return finish_reception(rt, noise, t_wake_s, tau_rx_s, adc_bits);
}

}  // namespace chirprange
