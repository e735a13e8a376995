#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chirprange {

// Uniformly sampled mono signal. t0 is the absolute time of samples[0],
// so a wake-window snippet carries its own position on the broadcast axis.
struct Waveform {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    double t0_s = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

inline double mean_square(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc / static_cast<double>(v.size());
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_zero(const std::vector<double>& v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

inline void require_same_rate(const Waveform& a, const Waveform& b, const char* what) {
    if (a.sample_rate_hz != b.sample_rate_hz)
        throw std::invalid_argument(std::string(what) + ": sample rates differ");
}

}  // namespace chirprange
