#include "sctsa/filtration.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "sctsa/embed.hpp"
#include "sctsa/errors.hpp"
#include "sctsa/parallel.hpp"

namespace sctsa {

void FiltrationParams::validate() const {
    if (grid.empty()) throw config_error("filtration grid must be nonempty");
    for (std::size_t s = 1; s < grid.size(); ++s)
        if (!(grid[s] > grid[s - 1]))
            throw config_error("filtration grid must be strictly increasing");
    if (max_dim < 1) throw config_error("max_dim must be at least 1");
}

std::size_t BitGraph::degree(std::size_t v) const {
    std::size_t d = 0;
    const std::uint64_t* r = row(v);
    for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(r[w]));
    return d;
}

std::size_t BitGraph::edge_count() const {
    std::size_t total = 0;
    for (std::size_t v = 0; v < n_; ++v) total += degree(v);
    return total / 2;
}

BitGraph neighborhood_graph(const SymMatrix& d, const std::vector<int>& timestamps, double eps,
                            int tau) {
    const std::size_t n = d.size();
    if (!timestamps.empty() && timestamps.size() != n)
        throw data_error("timestamp vector length does not match matrix size");
    BitGraph g(n);
    const bool timed = !timestamps.empty();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d(i, j) > eps) continue;
            if (timed && !within_tau(timestamps[i], timestamps[j], tau)) continue;
            g.add_edge(i, j);
        }
    return g;
}

std::vector<std::uint32_t> degeneracy_order(const BitGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (std::size_t v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        max_deg = std::max(max_deg, deg[v]);
    }
    // Bucketed min-degree removal.
    std::vector<std::vector<std::uint32_t>> buckets(max_deg + 1);
    for (std::size_t v = 0; v < n; ++v) buckets[deg[v]].push_back(static_cast<std::uint32_t>(v));
    std::vector<char> removed(n, 0);
    std::vector<std::uint32_t> order;
    order.reserve(n);
    for (std::size_t taken = 0; taken < n; ++taken) {
        std::uint32_t v = std::numeric_limits<std::uint32_t>::max();
        for (std::size_t b = 0; b <= max_deg; ++b) {
            auto& bucket = buckets[b];
            while (!bucket.empty()) {
                const std::uint32_t cand = bucket.back();
                if (removed[cand] || deg[cand] != b) {
                    bucket.pop_back();
                    continue;
                }
                v = cand;
                bucket.pop_back();
                break;
            }
            if (v != std::numeric_limits<std::uint32_t>::max()) break;
        }
        removed[v] = 1;
        order.push_back(v);
        const std::uint64_t* r = g.row(v);
        for (std::size_t w = 0; w < g.words(); ++w) {
            std::uint64_t bitsw = r[w];
            while (bitsw) {
                const std::size_t u = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsw));
                bitsw &= bitsw - 1;
                if (!removed[u]) {
                    --deg[u];
                    buckets[deg[u]].push_back(static_cast<std::uint32_t>(u));
                }
            }
        }
    }
    return order;
}

namespace {

inline void add_checked(count_t& acc, count_t v) {
    if (__builtin_add_overflow(acc, v, &acc))
        throw budget_error("simplex count exceeds the 64-bit range");
}

// Pivot-tree clique counter over a rank-relabelled graph. Leaves of the
// recursion hold h required vertices and p optional (pivot) vertices and
// contribute C(p, i) cliques of size h + i.
class CliqueCounter {
public:
    CliqueCounter(const BitGraph& g, int max_size)
        : g_(g), words_(g.words()), max_size_(max_size), counts_(max_size, 0) {
        build_binomials();
        scratch_.assign((g_.size() + 2) * 2 * words_, 0);
    }

    std::vector<count_t> run() {
        const std::size_t n = g_.size();
        if (n == 0) return counts_;
        const auto order = degeneracy_order(g_);
        std::vector<std::uint32_t> rank(n);
        for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<std::uint32_t>(r);
        BitGraph h(n);
        for (std::size_t v = 0; v < n; ++v) {
            const std::uint64_t* row = g_.row(v);
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t bitsw = row[w];
                while (bitsw) {
                    const std::size_t u = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsw));
                    bitsw &= bitsw - 1;
                    if (u > v) h.add_edge(rank[v], rank[u]);
                }
            }
        }
        ranked_ = &h;
        std::vector<std::uint64_t> cand(words_, 0);
        for (std::size_t v = 0; v < n; ++v) {
            // Forward neighborhood: ranks above v.
            const std::uint64_t* row = h.row(v);
            for (std::size_t w = 0; w < words_; ++w) cand[w] = row[w];
            mask_below(cand.data(), v + 1);
            recurse(cand.data(), 1, 0, 0);
        }
        return counts_;
    }

private:
    void build_binomials() {
        const std::size_t n = g_.size();
        binom_.assign((n + 1) * static_cast<std::size_t>(max_size_ + 1), 0);
        for (std::size_t p = 0; p <= n; ++p) {
            at(p, 0) = 1;
            for (int i = 1; i <= max_size_ && static_cast<std::size_t>(i) <= p; ++i) {
                const count_t a = at(p - 1, i - 1);
                const count_t b = at(p - 1, i);
                count_t sum = 0;
                if (a == kOverflow || b == kOverflow || __builtin_add_overflow(a, b, &sum))
                    at(p, i) = kOverflow;
                else
                    at(p, i) = sum;
            }
        }
    }
    count_t& at(std::size_t p, int i) {
        return binom_[p * static_cast<std::size_t>(max_size_ + 1) + static_cast<std::size_t>(i)];
    }
    count_t binom(std::size_t p, int i) const {
        const count_t v =
            binom_[p * static_cast<std::size_t>(max_size_ + 1) + static_cast<std::size_t>(i)];
        if (v == kOverflow) throw budget_error("simplex count exceeds the 64-bit range");
        return v;
    }

    void mask_below(std::uint64_t* bits, std::size_t from) const {
        // Clear bits [0, from).
        const std::size_t full = from / 64;
        for (std::size_t w = 0; w < full; ++w) bits[w] = 0;
        if (from % 64 && full < words_) bits[full] &= ~((std::uint64_t(1) << (from % 64)) - 1);
    }

    static std::size_t popcount_words(const std::uint64_t* a, std::size_t words) {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words; ++w) c += static_cast<std::size_t>(std::popcount(a[w]));
        return c;
    }

    std::size_t intersect_count(const std::uint64_t* a, const std::uint64_t* b) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w)
            c += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
        return c;
    }

    void emit(int held, std::size_t pivots) {
        const std::size_t limit =
            std::min<std::size_t>(pivots, static_cast<std::size_t>(max_size_ - held));
        for (std::size_t i = 0; i <= limit; ++i)
            add_checked(counts_[static_cast<std::size_t>(held) + i - 1],
                        binom(pivots, static_cast<int>(i)));
    }

    void recurse(const std::uint64_t* cand, int held, std::size_t pivots, std::size_t depth) {
        const std::size_t cand_size = popcount_words(cand, words_);
        if (cand_size == 0) {
            emit(held, pivots);
            return;
        }
        if (held == max_size_) {
            // Only the pure-pivot chain can still contribute: exactly one
            // clique of the tracked maximum size.
            add_checked(counts_[static_cast<std::size_t>(max_size_ - 1)], 1);
            return;
        }
        // Pivot: candidate covering the most of the candidate set.
        std::size_t pivot = 0, best = 0;
        bool first = true;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bitsw = cand[w];
            while (bitsw) {
                const std::size_t u = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsw));
                bitsw &= bitsw - 1;
                const std::size_t cover = intersect_count(cand, ranked_->row(u));
                if (first || cover > best) {
                    pivot = u;
                    best = cover;
                    first = false;
                }
            }
        }
        std::uint64_t* branch = scratch_.data() + depth * 2 * words_;
        std::uint64_t* rest = branch + words_;
        const std::uint64_t* prow = ranked_->row(pivot);
        for (std::size_t w = 0; w < words_; ++w) {
            branch[w] = cand[w] & prow[w];
            rest[w] = cand[w];
        }
        recurse(branch, held, pivots + 1, depth + 1);
        // Non-neighbors of the pivot (and the pivot itself) become held
        // vertices, processed in ascending order with earlier ones removed.
        rest[pivot / 64] &= ~(std::uint64_t(1) << (pivot % 64));
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bitsw = rest[w] & ~prow[w];
            while (bitsw) {
                const std::size_t u = w * 64 + static_cast<std::size_t>(std::countr_zero(bitsw));
                bitsw &= bitsw - 1;
                const std::uint64_t* urow = ranked_->row(u);
                for (std::size_t x = 0; x < words_; ++x) branch[x] = rest[x] & urow[x];
                recurse(branch, held + 1, pivots, depth + 1);
                rest[u / 64] &= ~(std::uint64_t(1) << (u % 64));
            }
        }
    }

    static constexpr count_t kOverflow = std::numeric_limits<count_t>::max();

    const BitGraph& g_;
    const BitGraph* ranked_ = nullptr;
    std::size_t words_;
    int max_size_;
    std::vector<count_t> counts_;
    std::vector<count_t> binom_;
    std::vector<std::uint64_t> scratch_;
};

}  // namespace

std::vector<count_t> count_cliques(const BitGraph& g, int max_dim) {
    if (max_dim < 1) throw config_error("count_cliques: max_dim must be at least 1");
    CliqueCounter counter(g, max_dim + 1);
    return counter.run();
}

SimplexCountCurve simplex_count_curve(const SymMatrix& d, const std::vector<int>& timestamps,
                                      const FiltrationParams& fp, int threads) {
    fp.validate();
    const std::size_t steps = fp.grid.size();
    SimplexCountCurve curve;
    curve.grid = fp.grid;
    curve.max_dim = fp.max_dim;
    curve.counts.assign(static_cast<std::size_t>(fp.max_dim) + 1,
                        std::vector<count_t>(steps, 0));
    std::vector<std::vector<count_t>> per_step(steps);
    parallel_for(steps, threads, [&](std::size_t s) {
        const BitGraph g = neighborhood_graph(d, timestamps, fp.grid[s], fp.tau);
        per_step[s] = count_cliques(g, fp.max_dim);
    });
    curve.cumulative.assign(static_cast<std::size_t>(fp.max_dim) + 1, 0);
    for (std::size_t s = 0; s < steps; ++s)
        for (int n = 0; n <= fp.max_dim; ++n) {
            curve.counts[static_cast<std::size_t>(n)][s] = per_step[s][static_cast<std::size_t>(n)];
            add_checked(curve.cumulative[static_cast<std::size_t>(n)],
                        per_step[s][static_cast<std::size_t>(n)]);
        }
    return curve;
}

SimplexCountCurve simplex_count_curve(const TimedPointCloud& pc, const FiltrationParams& fp,
                                      int threads) {
    const SymMatrix d = euclidean_distances_rows(pc.coords, pc.n, pc.dim);
    return simplex_count_curve(d, pc.timestamps, fp, threads);
}

std::vector<double> default_grid(const SymMatrix& d, int steps) {
    if (steps < 2) throw config_error("default_grid: need at least 2 steps");
    const double mx = d.max_value();
    if (mx <= 0.0) return {0.0};
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s)
        grid[static_cast<std::size_t>(s)] =
            mx * static_cast<double>(s + 1) / static_cast<double>(steps);
    grid.back() = mx;  // exact, independent of rounding
    return grid;
}

}  // namespace sctsa
