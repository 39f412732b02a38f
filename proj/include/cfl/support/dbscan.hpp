#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <vector>

namespace cfl {

constexpr int kDbscanNoise = -1;

// DBSCAN over a precomputed symmetric distance matrix. Neighborhoods count
// the point itself, so min_pts = 2 means "at least one neighbor within eps".
// Labels are cluster ids in discovery order, kDbscanNoise for noise.
inline std::vector<int> dbscan_distance_matrix(const std::vector<std::vector<double>>& dist,
                                               double eps, size_t min_pts) {
    size_t n = dist.size();
    constexpr int kUnvisited = -2;
    std::vector<int> label(n, kUnvisited);
    auto neighbors = [&](size_t p) {
        std::vector<size_t> out;
        for (size_t q = 0; q < n; ++q)
            if (dist[p][q] <= eps) out.push_back(q);
        return out;
    };
    int next_cluster = 0;
    for (size_t i = 0; i < n; ++i) {
        if (label[i] != kUnvisited) continue;
        auto nb = neighbors(i);
        if (nb.size() < min_pts) {
            label[i] = kDbscanNoise;
            continue;
        }
        int cid = next_cluster++;
        label[i] = cid;
        std::queue<size_t> frontier;
        for (size_t q : nb)
            if (q != i) frontier.push(q);
        while (!frontier.empty()) {
            size_t p = frontier.front();
            frontier.pop();
            if (label[p] == kDbscanNoise) label[p] = cid;  // border point
            if (label[p] != kUnvisited) continue;
            label[p] = cid;
            auto pn = neighbors(p);
            if (pn.size() >= min_pts)
                for (size_t q : pn) frontier.push(q);
        }
    }
    return label;
}

// Knee of the ascending k-nearest-neighbor distance curve: the point with the
// greatest perpendicular distance to the chord from first to last. Returns
// false when the curve is degenerate (too short or flat).
inline bool knee_of_curve(const std::vector<double>& ys, double& knee_value) {
    size_t n = ys.size();
    if (n < 3) return false;
    if (ys.front() == ys.back()) return false;
    double x0 = 0.0, y0 = ys.front();
    double x1 = static_cast<double>(n - 1), y1 = ys.back();
    double dx = x1 - x0, dy = y1 - y0;
    double norm = dx * dx + dy * dy;
    double best = -1.0;
    size_t best_i = 0;
    for (size_t i = 0; i < n; ++i) {
        double px = static_cast<double>(i) - x0, py = ys[i] - y0;
        double cross = px * dy - py * dx;
        double d2 = cross * cross / norm;
        if (d2 > best) {
            best = d2;
            best_i = i;
        }
    }
    knee_value = ys[best_i];
    return true;
}

}  // namespace cfl
