#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace cfl {

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Sample standard deviation (n-1 denominator); 0 for fewer than two points.
inline double sample_std(const std::vector<double>& xs) {
    size_t n = xs.size();
    if (n < 2) return 0.0;
    double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Linear-interpolation quantile between order statistics (R type 7).
// xs must be sorted ascending; p in [0, 1].
inline double quantile_sorted(const std::vector<double>& xs, double p) {
    if (xs.empty()) return 0.0;
    if (xs.size() == 1) return xs[0];
    double h = p * static_cast<double>(xs.size() - 1);
    size_t lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= xs.size()) return xs.back();
    double frac = h - static_cast<double>(lo);
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

// Ranks with average tie handling, 1-based.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
    size_t n = xs.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation with average-rank ties; 0 when undefined
// (fewer than two points or a constant vector).
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    size_t n = xs.size();
    if (n < 2 || ys.size() != n) return 0.0;
    auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    double mx = mean_of(rx), my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace cfl
