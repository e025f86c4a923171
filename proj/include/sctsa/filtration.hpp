#pragma once

#include <cstdint>
#include <vector>

#include "sctsa/sym_matrix.hpp"

namespace sctsa {

using count_t = std::uint64_t;

// Time-delay limit for edge formation; negative means unconstrained.
constexpr int kTauUnlimited = -1;

inline bool within_tau(int ti, int tj, int tau) {
    if (tau < 0) return true;
    const int d = ti > tj ? ti - tj : tj - ti;
    return d <= tau;
}

struct TimedPointCloud {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> coords;  // row-major
    std::vector<int> timestamps;
};

struct FiltrationParams {
    std::vector<double> grid;  // strictly increasing thresholds
    int tau = kTauUnlimited;
    int max_dim = 7;
    void validate() const;
};

// Dense undirected graph as bit rows; the clique counter's working
// representation.
class BitGraph {
public:
    explicit BitGraph(std::size_t n)
        : n_(n), words_((n + 63) / 64), bits_(n_ * words_, 0) {}

    std::size_t size() const { return n_; }
    std::size_t words() const { return words_; }
    const std::uint64_t* row(std::size_t v) const { return bits_.data() + v * words_; }

    void add_edge(std::size_t a, std::size_t b) {
        set_bit(a, b);
        set_bit(b, a);
    }
    bool has_edge(std::size_t a, std::size_t b) const {
        return (bits_[a * words_ + b / 64] >> (b % 64)) & 1u;
    }
    std::size_t degree(std::size_t v) const;
    std::size_t edge_count() const;

private:
    void set_bit(std::size_t a, std::size_t b) {
        bits_[a * words_ + b / 64] |= std::uint64_t(1) << (b % 64);
    }
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

// Edge (i, j) iff d(i, j) <= eps and |t_i - t_j| <= tau. Pass an empty
// timestamp vector to drop the temporal constraint.
BitGraph neighborhood_graph(const SymMatrix& d, const std::vector<int>& timestamps, double eps,
                            int tau);

// Exact per-dimension clique counts: counts[n] = number of (n+1)-cliques,
// n = 0..max_dim. Degeneracy-ordered vertex expansion with pivoting; cliques
// are counted through binomial contributions of the pivot tree, never
// materialized. Throws budget_error if a count overflows 64 bits.
std::vector<count_t> count_cliques(const BitGraph& g, int max_dim);

// Smallest vertex order by repeated minimum-degree removal.
std::vector<std::uint32_t> degeneracy_order(const BitGraph& g);

struct SimplexCountCurve {
    std::vector<double> grid;
    int max_dim = 7;
    std::vector<std::vector<count_t>> counts;  // [dim][step]
    std::vector<count_t> cumulative;           // per-dimension sum over steps
};

SimplexCountCurve simplex_count_curve(const SymMatrix& d, const std::vector<int>& timestamps,
                                      const FiltrationParams& fp, int threads = 1);
SimplexCountCurve simplex_count_curve(const TimedPointCloud& pc, const FiltrationParams& fp,
                                      int threads = 1);

// steps uniform thresholds from 0 (exclusive) to the maximum off-diagonal
// distance (inclusive); degenerates to {0} when all distances are zero.
std::vector<double> default_grid(const SymMatrix& d, int steps);

}  // namespace sctsa
