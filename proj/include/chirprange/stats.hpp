#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace chirprange {

struct GaussianFit {
    double mean = 0.0;
    double sigma = 0.0;
};

// Absolute-error summary. epsilon/sigma describe the Gaussian fit of the
// signed estimates (accuracy/precision) and are filled by experiment drivers;
// error_metrics itself only sees absolute errors.
struct ErrorStats {
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double p100 = 0.0;
    double epsilon = 0.0;
    double sigma = 0.0;
    std::size_t n = 0;
};

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

inline GaussianFit gaussian_fit(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("gaussian_fit: need at least 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

// Nearest-rank percentile on a sorted ascending vector.
inline double percentile_nearest_rank(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("percentile: empty input");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

inline ErrorStats error_metrics(std::vector<double> abs_errors) {
    if (abs_errors.empty()) throw std::invalid_argument("error_metrics: empty input");
    ErrorStats s;
    s.n = abs_errors.size();
    for (double e : abs_errors) s.mean += e;
    s.mean /= static_cast<double>(s.n);
    std::sort(abs_errors.begin(), abs_errors.end());
    s.p50 = percentile_nearest_rank(abs_errors, 50.0);
    s.p95 = percentile_nearest_rank(abs_errors, 95.0);
    s.p100 = abs_errors.back();
    return s;
}

// Right-continuous ECDF: one (value, fraction <= value) step per distinct value.
inline std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("empirical_cdf: empty input");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> steps;
    const auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double frac = static_cast<double>(i + 1) / n;
        if (!steps.empty() && steps.back().first == values[i])
            steps.back().second = frac;
        else
            steps.emplace_back(values[i], frac);
    }
    return steps;
}

// Silverman's rule of thumb: 0.9 * min(sigma, IQR/1.34) * n^(-1/5). Degenerate
// spreads fall back to a tiny positive width so the KDE stays well defined.
inline double silverman_bandwidth(const std::vector<double>& samples) {
    if (samples.empty()) throw std::invalid_argument("silverman_bandwidth: empty input");
    if (samples.size() == 1) return 1e-9;
    const GaussianFit fit = gaussian_fit(samples);
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double iqr =
        percentile_nearest_rank(sorted, 75.0) - percentile_nearest_rank(sorted, 25.0);
    double spread = std::min(fit.sigma, iqr / 1.34);
    if (!(spread > 0.0)) spread = fit.sigma;
    if (!(spread > 0.0)) return 1e-9;
    return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

inline DensityEstimate epanechnikov_kde(const std::vector<double>& samples, double bandwidth,
                                        const std::vector<double>& grid) {
    if (samples.empty()) throw std::invalid_argument("epanechnikov_kde: empty input");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("epanechnikov_kde: bandwidth must be > 0");
    DensityEstimate out;
    out.grid = grid;
    out.bandwidth = bandwidth;
    out.density.assign(grid.size(), 0.0);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (double x : samples) {
            const double u = (grid[g] - x) / bandwidth;
            if (std::abs(u) <= 1.0) acc += 0.75 * (1.0 - u * u);
        }
        out.density[g] = acc * norm;
    }
    return out;
}

// Uniform grid covering all samples +- bandwidth (captures full kernel mass).
inline std::vector<double> kde_grid(const std::vector<double>& samples, double bandwidth,
                                    std::size_t points = 512) {
    if (samples.empty()) throw std::invalid_argument("kde_grid: empty input");
    if (points < 2) throw std::invalid_argument("kde_grid: need at least 2 points");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it - bandwidth;
    const double hi = *hi_it + bandwidth;
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

inline double trapezoid_mass(const DensityEstimate& d) {
    double mass = 0.0;
    for (std::size_t i = 1; i < d.grid.size(); ++i)
        mass += 0.5 * (d.density[i] + d.density[i - 1]) * (d.grid[i] - d.grid[i - 1]);
    return mass;
}

}  // namespace chirprange
