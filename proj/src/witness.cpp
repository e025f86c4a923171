#include "sctsa/witness.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "sctsa/errors.hpp"
#include "sctsa/rng.hpp"

namespace sctsa {

LandmarkSet maxmin_landmarks(const SymMatrix& d, std::size_t m, std::uint64_t seed, int nu) {
    const std::size_t n = d.size();
    if (m == 0 || m > n)
        throw config_error("maxmin_landmarks: m=" + std::to_string(m) +
                           " must be in [1, N] with N=" + std::to_string(n));
    if (nu < 0) throw config_error("maxmin_landmarks: nu must be non-negative");

    LandmarkSet lm;
    lm.nu = nu;
    Rng rng(seed);
    const auto first = static_cast<std::uint32_t>(rng.below(n));
    lm.indices.push_back(first);
    lm.radii.push_back(std::numeric_limits<double>::infinity());

    std::vector<double> min_dist(n);
    for (std::size_t i = 0; i < n; ++i) min_dist[i] = d(i, first);
    min_dist[first] = 0.0;

    while (lm.indices.size() < m) {
        std::size_t best = 0;
        double best_v = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (min_dist[i] > best_v) {  // strict: ties resolve to lowest index
                best_v = min_dist[i];
                best = i;
            }
        }
        lm.indices.push_back(static_cast<std::uint32_t>(best));
        lm.radii.push_back(best_v);
        for (std::size_t i = 0; i < n; ++i) min_dist[i] = std::min(min_dist[i], d(i, best));
    }
    lm.m_nu = witness_slack(d, lm.indices, nu);
    return lm;
}

std::vector<double> witness_slack(const SymMatrix& d, const std::vector<std::uint32_t>& landmarks,
                                  int nu) {
    const std::size_t n = d.size();
    std::vector<double> slack(n, 0.0);
    if (nu <= 0) return slack;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(nu), landmarks.size());

    std::vector<char> is_landmark(n, 0);
    for (const auto l : landmarks) is_landmark[l] = 1;

    std::vector<double> dist(landmarks.size());
    for (std::size_t x = 0; x < n; ++x) {
        if (is_landmark[x]) continue;
        for (std::size_t a = 0; a < landmarks.size(); ++a) dist[a] = d(x, landmarks[a]);
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         dist.end());
        slack[x] = dist[k - 1];
    }
    return slack;
}

SymMatrix witness_edge_births(const SymMatrix& d, const std::vector<std::uint32_t>& landmarks,
                              const std::vector<double>& slack) {
    const std::size_t n = d.size();
    const std::size_t m = landmarks.size();
    if (slack.size() != n) throw data_error("witness slack vector length mismatch");
    std::vector<char> is_landmark(n, 0);
    for (const auto l : landmarks) {
        if (l >= n) throw data_error("landmark index out of range");
        is_landmark[l] = 1;
    }

    SymMatrix births(m);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const std::uint32_t la = landmarks[a];
            const std::uint32_t lb = landmarks[b];
            double best = d(la, lb);
            for (std::size_t x = 0; x < n; ++x) {
                if (is_landmark[x]) continue;
                const double v = std::max(d(la, x), d(lb, x)) - slack[x];
                if (v < best) best = v;
            }
            births.set(a, b, std::max(best, 0.0));
        }
    }
    return births;
}

SimplexCountCurve lazy_witness_curve(const SymMatrix& d, const LandmarkSet& lm,
                                     const FiltrationParams& fp,
                                     const std::vector<int>& timestamps, int threads) {
    const SymMatrix births = witness_edge_births(d, lm.indices, lm.m_nu);
    std::vector<int> landmark_times;
    if (!timestamps.empty()) {
        if (timestamps.size() != d.size())
            throw data_error("timestamp vector length does not match matrix size");
        landmark_times.reserve(lm.indices.size());
        for (const auto l : lm.indices) landmark_times.push_back(timestamps[l]);
    }
    return simplex_count_curve(births, landmark_times, fp, threads);
}

}  // namespace sctsa
