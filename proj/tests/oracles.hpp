// Test-only reference implementations: brute-force and independently coded
// counterparts of the library's operations. These stay deliberately naive so
// they exercise different code paths than the implementations they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "sctsa/filtration.hpp"
#include "sctsa/homology.hpp"
#include "sctsa/sym_matrix.hpp"

namespace oracle {

// Two-pass Pearson correlation.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Exhaustive subset enumeration of (k+1)-cliques for all k <= max_dim.
inline std::vector<std::uint64_t> clique_counts(const sctsa::BitGraph& g, int max_dim) {
    const std::size_t n = g.size();
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_dim) + 1, 0);
    std::vector<std::uint32_t> subset;
    // Iterate all subsets of size 1..max_dim+1 via recursive selection.
    auto rec = [&](auto&& self, std::uint32_t from) -> void {
        if (!subset.empty()) {
            bool clique = true;
            for (std::size_t a = 0; a < subset.size() && clique; ++a)
                for (std::size_t b = a + 1; b < subset.size(); ++b)
                    if (!g.has_edge(subset[a], subset[b])) {
                        clique = false;
                        break;
                    }
            if (!clique) return;  // no superset can be a clique either
            ++counts[subset.size() - 1];
            if (static_cast<int>(subset.size()) == max_dim + 1) return;
        }
        for (std::uint32_t u = from; u < n; ++u) {
            subset.push_back(u);
            self(self, u + 1);
            subset.pop_back();
        }
    };
    rec(rec, 0);
    return counts;
}

// Naive full boundary-matrix reduction, no clearing. Returns intervals
// (dim, birth, death) including infinite bars, zero-length dropped.
inline std::vector<sctsa::PersistenceInterval> reduce_naive(const sctsa::FilteredComplex& fc,
                                                            bool keep_zero = false) {
    const auto& s = fc.simplices;
    const std::size_t n = s.size();

    auto find_index = [&](const sctsa::Simplex& key) -> std::size_t {
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i].dim != key.dim) continue;
            bool same = true;
            for (int k = 0; k <= key.dim && same; ++k)
                same = s[i].v[static_cast<std::size_t>(k)] == key.v[static_cast<std::size_t>(k)];
            if (same) return i;
        }
        return n;
    };

    std::vector<std::vector<std::size_t>> cols(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i].dim == 0) continue;
        sctsa::Simplex facet;
        facet.dim = static_cast<std::uint8_t>(s[i].dim - 1);
        for (int drop = 0; drop <= s[i].dim; ++drop) {
            std::size_t w = 0;
            for (int k = 0; k <= s[i].dim; ++k)
                if (k != drop) facet.v[w++] = s[i].v[static_cast<std::size_t>(k)];
            cols[i].push_back(find_index(facet));
        }
        std::sort(cols[i].begin(), cols[i].end());
    }

    std::vector<std::ptrdiff_t> low_of(n, -1);  // row -> column with that low
    std::vector<std::ptrdiff_t> paired(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
        auto& col = cols[j];
        while (!col.empty()) {
            const std::size_t low = col.back();
            if (low_of[low] < 0) {
                low_of[low] = static_cast<std::ptrdiff_t>(j);
                paired[low] = static_cast<std::ptrdiff_t>(j);
                paired[j] = static_cast<std::ptrdiff_t>(low);
                break;
            }
            const auto& other = cols[static_cast<std::size_t>(low_of[low])];
            std::vector<std::size_t> merged;
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(merged));
            col = std::move(merged);
        }
    }

    std::vector<sctsa::PersistenceInterval> out;
    const int hmax = fc.max_dim - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_destroyer = !cols[i].empty();
        if (is_destroyer) continue;
        if (s[i].dim > hmax) continue;
        if (paired[i] >= 0 && static_cast<std::size_t>(paired[i]) > i) {
            const double death = s[static_cast<std::size_t>(paired[i])].birth;
            if (s[i].birth == death && !keep_zero) continue;
            out.push_back({s[i].dim, s[i].birth, death});
        } else if (paired[i] < 0) {
            out.push_back({s[i].dim, s[i].birth, std::numeric_limits<double>::infinity()});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return out;
}

inline bool same_intervals(const std::vector<sctsa::PersistenceInterval>& a,
                           const std::vector<sctsa::PersistenceInterval>& b, double tol = 0.0) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].dim != b[i].dim) return false;
        if (std::abs(a[i].birth - b[i].birth) > tol) return false;
        const bool fa = a[i].finite(), fb = b[i].finite();
        if (fa != fb) return false;
        if (fa && std::abs(a[i].death - b[i].death) > tol) return false;
    }
    return true;
}

}  // namespace oracle

#include <Eigen/Dense>

namespace oracle {

// Procrustes residual: best orthogonal alignment of b onto a after
// centering, returned as the RMS coordinate error.
inline double procrustes_residual(const std::vector<double>& a, const std::vector<double>& b,
                                  std::size_t n, std::size_t k) {
    Eigen::MatrixXd A(n, k), B(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i * k + j];
            B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b[i * k + j];
        }
    A.rowwise() -= A.colwise().mean();
    B.rowwise() -= B.colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B.transpose() * A,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd r = svd.matrixU() * svd.matrixV().transpose();
    const Eigen::MatrixXd diff = B * r - A;
    return std::sqrt(diff.squaredNorm() / static_cast<double>(n));
}

}  // namespace oracle
