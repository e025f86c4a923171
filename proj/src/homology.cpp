#include "sctsa/homology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlohmann/json.hpp"
#include "sctsa/csv.hpp"
#include "sctsa/embed.hpp"
#include "sctsa/errors.hpp"

namespace sctsa {

namespace {

bool simplex_less(const Simplex& a, const Simplex& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.dim != b.dim) return a.dim < b.dim;
    for (int i = 0; i <= a.dim; ++i)
        if (a.v[static_cast<std::size_t>(i)] != b.v[static_cast<std::size_t>(i)])
            return a.v[static_cast<std::size_t>(i)] < b.v[static_cast<std::size_t>(i)];
    return false;
}

// Depth-first clique expansion over vertices above the current maximum,
// carrying the running birth (max edge value so far).
void expand(const SymMatrix& d, const BitGraph& g, std::vector<std::uint32_t>& clique,
            double birth, int max_size, std::size_t budget, FilteredComplex& out) {
    {
        if (out.simplices.size() >= budget)
            throw budget_error("filtered complex exceeds the simplex budget (" +
                               std::to_string(budget) + ")");
        Simplex s;
        s.dim = static_cast<std::uint8_t>(clique.size() - 1);
        s.birth = birth;
        for (std::size_t i = 0; i < clique.size(); ++i) s.v[i] = clique[i];
        out.simplices.push_back(s);
    }
    if (static_cast<int>(clique.size()) == max_size) return;
    const std::uint32_t last = clique.back();
    for (std::uint32_t u = last + 1; u < g.size(); ++u) {
        bool ok = true;
        double b = birth;
        for (const auto w : clique) {
            if (!g.has_edge(w, u)) {
                ok = false;
                break;
            }
            b = std::max(b, d(w, u));
        }
        if (!ok) continue;
        clique.push_back(u);
        expand(d, g, clique, b, max_size, budget, out);
        clique.pop_back();
    }
}

}  // namespace

FilteredComplex build_filtered_complex(const SymMatrix& d, const std::vector<int>& timestamps,
                                       int tau, int homology_max_dim, double threshold,
                                       std::size_t budget) {
    if (homology_max_dim < 0) throw config_error("homology_max_dim must be non-negative");
    const int max_size = homology_max_dim + 2;  // one extra dimension for deaths
    if (max_size > kMaxComplexVertices)
        throw config_error("homology_max_dim " + std::to_string(homology_max_dim) +
                           " exceeds the materialization cap of " +
                           std::to_string(kMaxComplexVertices - 2));
    const std::size_t n = d.size();

    BitGraph g(n);
    const bool timed = !timestamps.empty();
    if (timed && timestamps.size() != n)
        throw data_error("timestamp vector length does not match matrix size");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d(i, j) > threshold) continue;
            if (timed && !within_tau(timestamps[i], timestamps[j], tau)) continue;
            g.add_edge(i, j);
        }

    FilteredComplex fc;
    fc.n_points = n;
    fc.max_dim = max_size - 1;
    std::vector<std::uint32_t> clique;
    for (std::uint32_t v = 0; v < n; ++v) {
        clique.assign(1, v);
        expand(d, g, clique, 0.0, max_size, budget, fc);
    }
    std::sort(fc.simplices.begin(), fc.simplices.end(), simplex_less);
    return fc;
}

FilteredComplex build_filtered_complex(const TimedPointCloud& pc, const FiltrationParams& fp,
                                       int homology_max_dim, std::size_t budget) {
    fp.validate();
    const SymMatrix d = euclidean_distances_rows(pc.coords, pc.n, pc.dim);
    return build_filtered_complex(d, pc.timestamps, fp.tau, homology_max_dim, fp.grid.back(),
                                  budget);
}

namespace {

// Positions of the dim-1 facets of simplex s within the sorted complex.
// Facet births are recomputed (max over edges) so each lookup is a binary
// search rather than a hash probe.
struct FacetFinder {
    const FilteredComplex& fc;
    const SymMatrix* dist;

    std::uint32_t find(const Simplex& facet) const {
        const auto& v = fc.simplices;
        auto it = std::lower_bound(v.begin(), v.end(), facet, simplex_less);
        return static_cast<std::uint32_t>(it - v.begin());
    }

    void boundary(const Simplex& s, std::vector<std::uint32_t>& out) const {
        out.clear();
        Simplex facet;
        facet.dim = static_cast<std::uint8_t>(s.dim - 1);
        for (int drop = 0; drop <= s.dim; ++drop) {
            std::size_t w = 0;
            for (int i = 0; i <= s.dim; ++i)
                if (i != drop) facet.v[w++] = s.v[static_cast<std::size_t>(i)];
            double birth = 0.0;
            for (std::size_t a = 0; a < w; ++a)
                for (std::size_t b = a + 1; b < w; ++b)
                    birth = std::max(birth, (*dist)(facet.v[a], facet.v[b]));
            facet.birth = birth;
            out.push_back(find(facet));
        }
        std::sort(out.begin(), out.end());
    }
};

}  // namespace

Barcode reduce_persistence(const FilteredComplex& fc, bool keep_zero_length) {
    const auto& simplices = fc.simplices;
    const std::size_t n = simplices.size();
    const int hmax = fc.max_dim - 1;

    // Rebuild the distance view needed for facet births from the edges
    // themselves: d(i, j) is the birth of edge {i, j}.
    SymMatrix dist(fc.n_points);
    for (const auto& s : simplices)
        if (s.dim == 1) dist.set(s.v[0], s.v[1], s.birth);
    FacetFinder finder{fc, &dist};

    std::vector<std::int64_t> pivot_owner(n, -1);
    std::vector<char> cleared(n, 0);
    std::vector<char> is_destroyer(n, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (creator, destroyer)
    std::vector<std::vector<std::uint32_t>> reduced(n);

    std::vector<std::uint32_t> col, merged, bd;
    for (int d = fc.max_dim; d >= 1; --d) {
        for (std::size_t c = 0; c < n; ++c) {
            if (simplices[c].dim != d || cleared[c]) continue;
            finder.boundary(simplices[c], bd);
            col = bd;
            for (;;) {
                if (col.empty()) break;  // creator column
                const std::uint32_t low = col.back();
                const std::int64_t owner = pivot_owner[low];
                if (owner < 0) {
                    pivot_owner[low] = static_cast<std::int64_t>(c);
                    pairs.emplace_back(low, static_cast<std::uint32_t>(c));
                    cleared[low] = 1;
                    is_destroyer[c] = 1;
                    reduced[c] = std::move(col);
                    col.clear();
                    break;
                }
                // Z/2 column addition: symmetric difference.
                const auto& other = reduced[static_cast<std::size_t>(owner)];
                merged.clear();
                std::set_symmetric_difference(col.begin(), col.end(), other.begin(),
                                              other.end(), std::back_inserter(merged));
                col.swap(merged);
            }
        }
    }

    Barcode bc;
    bc.homology_max_dim = std::max(hmax, 0);
    for (const auto& [creator, destroyer] : pairs) {
        const auto& cs = simplices[creator];
        if (cs.dim > hmax) continue;
        const double birth = cs.birth;
        const double death = simplices[destroyer].birth;
        if (birth == death && !keep_zero_length) continue;
        bc.intervals.push_back({cs.dim, birth, death});
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (cleared[c] || is_destroyer[c]) continue;
        if (simplices[c].dim > hmax) continue;
        bc.intervals.push_back(
            {simplices[c].dim, simplices[c].birth, std::numeric_limits<double>::infinity()});
    }
    std::sort(bc.intervals.begin(), bc.intervals.end(),
              [](const PersistenceInterval& a, const PersistenceInterval& b) {
                  if (a.dim != b.dim) return a.dim < b.dim;
                  if (a.birth != b.birth) return a.birth < b.birth;
                  return a.death < b.death;
              });
    return bc;
}

BettiCurve betti_curve(const Barcode& b, const std::vector<double>& grid) {
    BettiCurve bc;
    bc.grid = grid;
    bc.betti.assign(static_cast<std::size_t>(b.homology_max_dim) + 1,
                    std::vector<std::uint32_t>(grid.size(), 0));
    for (const auto& iv : b.intervals) {
        if (iv.dim > b.homology_max_dim) continue;
        for (std::size_t s = 0; s < grid.size(); ++s)
            if (iv.birth <= grid[s] && grid[s] < iv.death)
                ++bc.betti[static_cast<std::size_t>(iv.dim)][s];
    }
    return bc;
}

std::vector<BettiFeatureRow> betti_features(const BettiCurve& bc) {
    std::vector<BettiFeatureRow> rows(bc.betti.size());
    const double step = bc.grid.size() >= 2 ? bc.grid[1] - bc.grid[0]
                        : bc.grid.empty()   ? 1.0
                                            : std::max(bc.grid[0], 1.0);
    for (std::size_t k = 0; k < bc.betti.size(); ++k) {
        double sum = 0.0, peak = 0.0;
        for (const auto v : bc.betti[k]) {
            sum += static_cast<double>(v);
            peak = std::max(peak, static_cast<double>(v));
        }
        rows[k].integral = sum * step;
        rows[k].peak = peak;
        rows[k].final_value = bc.betti[k].empty() ? 0.0 : static_cast<double>(bc.betti[k].back());
    }
    return rows;
}

void save_barcode_csv(const Barcode& b, const std::filesystem::path& path) {
    CsvWriter w;
    w.field("dim").field("birth").field("death");
    w.end_row();
    for (const auto& iv : b.intervals) {
        w.field(static_cast<std::int64_t>(iv.dim)).field(iv.birth);
        if (iv.finite())
            w.field(iv.death);
        else
            w.field("inf");
        w.end_row();
    }
    w.save(path);
}

void save_barcode_json(const Barcode& b, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema"] = "sctsa.barcode/1";
    j["homology_max_dim"] = b.homology_max_dim;
    auto& arr = j["intervals"] = nlohmann::json::array();
    for (const auto& iv : b.intervals) {
        nlohmann::json e;
        e["dim"] = iv.dim;
        e["birth"] = iv.birth;
        if (iv.finite())
            e["death"] = iv.death;
        else
            e["death"] = nullptr;
        arr.push_back(std::move(e));
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

void save_betti_curve_csv(const BettiCurve& bc, const std::filesystem::path& path) {
    CsvWriter w;
    w.field("dim").field("step").field("epsilon").field("betti");
    w.end_row();
    for (std::size_t k = 0; k < bc.betti.size(); ++k)
        for (std::size_t s = 0; s < bc.grid.size(); ++s) {
            w.field(static_cast<std::int64_t>(k))
                .field(static_cast<std::int64_t>(s))
                .field(bc.grid[s])
                .field(static_cast<std::uint64_t>(bc.betti[k][s]));
            w.end_row();
        }
    w.save(path);
}

}  // namespace sctsa
