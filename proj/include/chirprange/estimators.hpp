#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranging.hpp"
#include "waveform.hpp"

namespace chirprange {

enum class EstimatorMethod { maximum, windowed, prominence, delta_peak };

enum class WindowShape { linear, quadratic_pos, quadratic_neg, exponential };

struct WindowSpec {
    WindowShape shape = WindowShape::linear;
    double slope = -1.0;        // linear: w = 1 + slope*x, slope in [-1, 0]
    double half_life_s = 0.003;  // exponential: w = 2^(-t/half_life)
};

struct EstimatorSpec {
    EstimatorMethod method = EstimatorMethod::maximum;
    WindowSpec window;
    double ppf = 65.0;  // prominence threshold on the 0..100 normalized scale

    std::string label() const;
};

// Local maxima of a series; prominences get filled by peak_prominences.
struct PeakSet {
    std::vector<std::size_t> indices;
    std::vector<double> heights;
    std::vector<double> prominences;

    std::size_t size() const { return indices.size(); }
};

inline void validate(const WindowSpec& w) {
    switch (w.shape) {
        case WindowShape::linear:
            if (!(w.slope >= -1.0 && w.slope <= 0.0))
                throw std::invalid_argument("window: linear slope must be in [-1, 0]");
            break;
        case WindowShape::exponential:
            if (!(w.half_life_s > 0.0))
                throw std::invalid_argument("window: half_life must be > 0");
            break;
        case WindowShape::quadratic_pos:
        case WindowShape::quadratic_neg:
            break;
    }
}

inline void validate(const EstimatorSpec& e) {
    if (e.method == EstimatorMethod::windowed) validate(e.window);
    if (e.method == EstimatorMethod::prominence && !(e.ppf > 0.0))
        throw std::invalid_argument("estimator: ppf must be > 0");
}

// Interior local maxima; an ascending run followed by a drop yields one peak at
// the first index of its top plateau. Endpoints never qualify.
inline PeakSet find_local_maxima(const CorrelationSeries& corr) {
    const auto& v = corr.values;
    if (v.size() < 3) throw std::invalid_argument("find_local_maxima: need at least 3 values");
    PeakSet peaks;
    std::size_t i = 1;
    while (i + 1 < v.size()) {
        if (v[i] > v[i - 1]) {
            std::size_t j = i;  // end of the plateau starting at i
            while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
            if (j + 1 < v.size() && v[j + 1] < v[i]) {
                peaks.indices.push_back(i);
                peaks.heights.push_back(v[i]);
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    return peaks;
}

inline std::size_t pick_maximum(const CorrelationSeries& corr) {
    if (corr.values.empty()) throw std::invalid_argument("pick_maximum: empty series");
    return static_cast<std::size_t>(
        std::max_element(corr.values.begin(), corr.values.end()) - corr.values.begin());
}

inline CorrelationSeries apply_window(const CorrelationSeries& corr, const WindowSpec& w) {
    validate(w);
    CorrelationSeries out = corr;
    const std::size_t n = out.values.size();
    if (n == 0) return out;
    if (w.shape == WindowShape::exponential && !(out.sample_rate_hz > 0.0))
        throw std::invalid_argument("apply_window: exponential window needs a sample rate");
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / denom;
        double weight = 1.0;
        switch (w.shape) {
            case WindowShape::linear: weight = 1.0 + w.slope * x; break;
            case WindowShape::quadratic_pos: weight = (1.0 - x) * (1.0 - x); break;
            case WindowShape::quadratic_neg: weight = 1.0 - x * x; break;
            case WindowShape::exponential: {
                const double t = static_cast<double>(i) / out.sample_rate_hz;
                weight = std::exp2(-t / w.half_life_s);
                break;
            }
        }
        out.values[i] *= weight;
    }
    return out;
}

// Horizontal-line prominence: walk outward from each peak until a strictly
// higher value (or the series end), take the minimum of each side's interval,
// height minus the higher of the two minima.
inline PeakSet peak_prominences(const CorrelationSeries& corr, const PeakSet& peaks) {
    const auto& v = corr.values;
    PeakSet out = peaks;
    out.prominences.assign(peaks.indices.size(), 0.0);
    for (std::size_t p = 0; p < peaks.indices.size(); ++p) {
        const std::size_t idx = peaks.indices[p];
        const double h = v[idx];
        double left_min = h;
        for (std::size_t i = idx; i-- > 0;) {
            if (v[i] > h) break;
            left_min = std::min(left_min, v[i]);
        }
        double right_min = h;
        for (std::size_t i = idx + 1; i < v.size(); ++i) {
            if (v[i] > h) break;
            right_min = std::min(right_min, v[i]);
        }
        out.prominences[p] = h - std::max(left_min, right_min);
    }
    return out;
}

// First peak whose prominence reaches ppf on the series normalized to a global
// maximum of 100; falls back to the plain maximum when nothing qualifies.
inline std::size_t pick_prominence(const CorrelationSeries& corr, double ppf) {
    if (!(ppf > 0.0)) throw std::invalid_argument("pick_prominence: ppf must be > 0");
    if (corr.values.size() < 3) return pick_maximum(corr);
    const double peak_value = *std::max_element(corr.values.begin(), corr.values.end());
    if (!(peak_value > 0.0)) return pick_maximum(corr);
    const double scale = 100.0 / peak_value;
    const PeakSet peaks = peak_prominences(corr, find_local_maxima(corr));
    for (std::size_t p = 0; p < peaks.size(); ++p)
        if (peaks.prominences[p] * scale >= ppf) return peaks.indices[p];
    return pick_maximum(corr);
}

// Peak following the largest positive height difference between consecutive
// local maxima; degenerate peak sets fall back to the first peak, and a series
// without peaks falls back to the plain maximum.
inline std::size_t pick_delta(const CorrelationSeries& corr) {
    if (corr.values.size() < 3) return pick_maximum(corr);
    const PeakSet peaks = find_local_maxima(corr);
    if (peaks.size() == 0) return pick_maximum(corr);
    if (peaks.size() == 1) return peaks.indices[0];
    double best_diff = 0.0;
    std::size_t best = 0;  // 0 = no positive difference found yet
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
        const double diff = peaks.heights[i + 1] - peaks.heights[i];
        if (diff > best_diff) {
            best_diff = diff;
            best = i + 1;
        }
    }
    return peaks.indices[best_diff > 0.0 ? best : 0];
}

inline std::size_t select_lag(const CorrelationSeries& corr, const EstimatorSpec& spec) {
    validate(spec);
    switch (spec.method) {
        case EstimatorMethod::maximum: return pick_maximum(corr);
        case EstimatorMethod::windowed: return pick_maximum(apply_window(corr, spec.window));
        case EstimatorMethod::prominence: return pick_prominence(corr, spec.ppf);
        case EstimatorMethod::delta_peak: return pick_delta(corr);
    }
    throw std::invalid_argument("select_lag: unknown method");
}

// The selection methods scan in arrival order: the direct path is the nearest,
// earliest peak and every reflection lands after it. A valid-overlap
// correlation indexes by template offset, which runs opposite to arrival time
// (a larger offset means a shorter flight), so the series is flipped before
// selection and the picked index maps back to a template-offset lag.
inline CorrelationSeries arrival_order(const CorrelationSeries& corr) {
    CorrelationSeries out = corr;
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

inline std::size_t select_direct_lag(const CorrelationSeries& corr, const EstimatorSpec& spec) {
    if (corr.values.empty()) throw std::invalid_argument("select_direct_lag: empty series");
    const std::size_t pick = select_lag(arrival_order(corr), spec);
    return corr.values.size() - 1 - pick;
}

// Full chain: correlate, select the direct-path lag, convert to distance. A
// negative return value marks an out-of-range selection (spurious peak later
// than the wake offset allows); callers record it rather than dropping it.
inline double estimate_distance(const Waveform& snippet, const Waveform& tmpl,
                                const TimingSpec& timing, const EstimatorSpec& spec) {
    validate(timing);
    if (all_zero(snippet.samples)) throw std::domain_error("estimate_distance: snippet carries no signal");
    const CorrelationSeries corr = pulse_compress(snippet, tmpl);
    const std::size_t lag = select_direct_lag(corr, spec);
    return lag_to_distance_signed(static_cast<double>(lag), timing);
}

inline std::string EstimatorSpec::label() const {
    switch (method) {
        case EstimatorMethod::maximum: return "maximum";
        case EstimatorMethod::windowed:
            switch (window.shape) {
                case WindowShape::linear: return "window_linear";
                case WindowShape::quadratic_pos: return "window_quad_pos";
                case WindowShape::quadratic_neg: return "window_quad_neg";
                case WindowShape::exponential: return "window_exp";
            }
            return "window";
        case EstimatorMethod::prominence: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "prominence_%g", ppf);
            return buf;
        }
        case EstimatorMethod::delta_peak: return "delta_peak";
    }
    return "unknown";
}

}  // namespace chirprange
