#include "sctsa/lineage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "nlohmann/json.hpp"
#include "sctsa/csv.hpp"
#include "sctsa/errors.hpp"

namespace sctsa {

namespace {

// Z-score columns over their defined entries; drop constant or empty
// columns. Two-pass mean/variance.
void standardize_table(FeatureTable& t) {
    const std::size_t rows = t.rows();
    const std::size_t cols = t.cols();
    std::vector<char> keep(cols, 1);
    std::vector<double> mean(cols, 0.0), sd(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t n = 0;
        double m = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
            if (t.is_defined(r, c)) {
                m += t.at(r, c);
                ++n;
            }
        if (n == 0) {
            keep[c] = 0;
            t.warnings.push_back("column '" + t.col_names[c] + "' dropped: entirely undefined");
            continue;
        }
        m /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
            if (t.is_defined(r, c)) {
                const double d = t.at(r, c) - m;
                ss += d * d;
            }
        if (n < 2 || ss <= 0.0) {
            keep[c] = 0;
            t.warnings.push_back("column '" + t.col_names[c] + "' dropped: zero variance");
            continue;
        }
        mean[c] = m;
        sd[c] = std::sqrt(ss / static_cast<double>(n - 1));
    }

    FeatureTable out;
    out.row_labels = t.row_labels;
    out.warnings = t.warnings;
    for (std::size_t c = 0; c < cols; ++c)
        if (keep[c]) out.col_names.push_back(t.col_names[c]);
    out.values.resize(rows * out.col_names.size());
    out.defined.resize(rows * out.col_names.size());
    std::size_t oc = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        if (!keep[c]) continue;
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t k = r * out.col_names.size() + oc;
            out.defined[k] = t.defined[r * cols + c];
            out.values[k] = out.defined[k] ? (t.at(r, c) - mean[c]) / sd[c] : 0.0;
        }
        ++oc;
    }
    t = std::move(out);
}

void drop_empty_columns(FeatureTable& t) {
    const std::size_t rows = t.rows();
    const std::size_t cols = t.cols();
    std::vector<char> keep(cols, 1);
    for (std::size_t c = 0; c < cols; ++c) {
        bool any = false;
        for (std::size_t r = 0; r < rows && !any; ++r) any = t.is_defined(r, c);
        if (!any) {
            keep[c] = 0;
            t.warnings.push_back("column '" + t.col_names[c] + "' dropped: entirely undefined");
        }
    }
    if (std::all_of(keep.begin(), keep.end(), [](char k) { return k != 0; })) return;
    FeatureTable out;
    out.row_labels = t.row_labels;
    out.warnings = t.warnings;
    for (std::size_t c = 0; c < cols; ++c)
        if (keep[c]) out.col_names.push_back(t.col_names[c]);
    out.values.resize(rows * out.col_names.size());
    out.defined.resize(rows * out.col_names.size());
    std::size_t oc = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        if (!keep[c]) continue;
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t k = r * out.col_names.size() + oc;
            out.values[k] = t.at(r, c);
            out.defined[k] = t.defined[r * cols + c];
        }
        ++oc;
    }
    t = std::move(out);
}

}  // namespace

FeatureTable build_feature_table(const std::vector<ComplexityProfile>& profiles,
                                 bool standardize) {
    if (profiles.empty()) throw data_error("no complexity profiles to tabulate");
    const int max_dim = profiles.front().max_dim;
    FeatureTable t;
    for (int n = 1; n <= max_dim; ++n) t.col_names.push_back("sc" + std::to_string(n));
    for (const auto& p : profiles) {
        if (p.max_dim != max_dim) throw data_error("profiles disagree on max dimension");
        t.row_labels.push_back(p.group);
        for (int n = 1; n <= max_dim; ++n) {
            const auto& v = p.sc[static_cast<std::size_t>(n)];
            t.values.push_back(v.value_or(0.0));
            t.defined.push_back(v.has_value() ? 1 : 0);
        }
    }
    if (standardize)
        standardize_table(t);
    else
        drop_empty_columns(t);
    return t;
}

FeatureTable build_feature_table_betti(const std::vector<std::string>& labels,
                                       const std::vector<std::vector<BettiFeatureRow>>& rows,
                                       bool standardize) {
    if (labels.size() != rows.size() || labels.empty())
        throw data_error("betti feature table inputs disagree");
    const std::size_t dims = rows.front().size();
    FeatureTable t;
    for (std::size_t k = 0; k < dims; ++k) {
        t.col_names.push_back("b" + std::to_string(k) + "_integral");
        t.col_names.push_back("b" + std::to_string(k) + "_peak");
        t.col_names.push_back("b" + std::to_string(k) + "_final");
    }
    t.row_labels = labels;
    for (const auto& row : rows) {
        if (row.size() != dims) throw data_error("betti feature rows disagree on dimensions");
        for (const auto& f : row) {
            t.values.push_back(f.integral);
            t.values.push_back(f.peak);
            t.values.push_back(f.final_value);
            t.defined.push_back(1);
            t.defined.push_back(1);
            t.defined.push_back(1);
        }
    }
    if (standardize)
        standardize_table(t);
    else
        drop_empty_columns(t);
    return t;
}

SymMatrix feature_distances(const FeatureTable& t, FeatureMetric metric) {
    const std::size_t rows = t.rows();
    const std::size_t cols = t.cols();
    SymMatrix d(rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = i + 1; j < rows; ++j) {
            std::size_t shared = 0;
            if (metric == FeatureMetric::euclidean) {
                double ss = 0.0;
                for (std::size_t c = 0; c < cols; ++c) {
                    if (!t.is_defined(i, c) || !t.is_defined(j, c)) continue;
                    const double diff = t.at(i, c) - t.at(j, c);
                    ss += diff * diff;
                    ++shared;
                }
                if (shared == 0)
                    throw data_error("rows '" + t.row_labels[i] + "' and '" + t.row_labels[j] +
                                     "' share no defined features");
                // Scale pairwise-complete sums up to the full column count.
                d.set(i, j, std::sqrt(ss * static_cast<double>(cols) /
                                      static_cast<double>(shared)));
            } else {
                double mi = 0.0, mj = 0.0;
                for (std::size_t c = 0; c < cols; ++c) {
                    if (!t.is_defined(i, c) || !t.is_defined(j, c)) continue;
                    mi += t.at(i, c);
                    mj += t.at(j, c);
                    ++shared;
                }
                if (shared < 2)
                    throw data_error("rows '" + t.row_labels[i] + "' and '" + t.row_labels[j] +
                                     "' share fewer than 2 defined features");
                mi /= static_cast<double>(shared);
                mj /= static_cast<double>(shared);
                double dot = 0.0, ni = 0.0, nj = 0.0;
                for (std::size_t c = 0; c < cols; ++c) {
                    if (!t.is_defined(i, c) || !t.is_defined(j, c)) continue;
                    const double a = t.at(i, c) - mi;
                    const double b = t.at(j, c) - mj;
                    dot += a * b;
                    ni += a * a;
                    nj += b * b;
                }
                if (ni <= 0.0 || nj <= 0.0)
                    throw data_error("correlation metric undefined for rows '" + t.row_labels[i] +
                                     "' and '" + t.row_labels[j] + "' (constant features)");
                d.set(i, j, std::clamp(1.0 - dot / std::sqrt(ni * nj), 0.0, 2.0));
            }
        }
    return d;
}

Dendrogram hierarchical_cluster(const FeatureTable& t, Linkage linkage, FeatureMetric metric) {
    const std::size_t n = t.rows();
    if (n < 2) throw data_error("hierarchical clustering needs at least 2 rows");
    const SymMatrix d0 = feature_distances(t, metric);

    struct Cluster {
        int id;            // scipy-style id
        int min_leaf;      // smallest contained leaf, for tie-breaking
        int size;
        bool active;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i)
        clusters.push_back({static_cast<int>(i), static_cast<int>(i), 1, true});

    // Working distance matrix over cluster slots; Lance-Williams updates.
    std::vector<std::vector<double>> dist(2 * n - 1,
                                          std::vector<double>(2 * n - 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = d0(i, j);

    Dendrogram out;
    out.labels = t.row_labels;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) active.push_back(i);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        // Find the closest active pair; ties resolve to the smallest
        // (min_leaf_a, min_leaf_b) pair.
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        int bl0 = 0, bl1 = 0;
        bool first = true;
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const std::size_t i = active[a], j = active[b];
                const double v = dist[i][j];
                int l0 = std::min(clusters[i].min_leaf, clusters[j].min_leaf);
                int l1 = std::max(clusters[i].min_leaf, clusters[j].min_leaf);
                if (first || v < best || (v == best && (l0 < bl0 || (l0 == bl0 && l1 < bl1)))) {
                    best = v;
                    bi = i;
                    bj = j;
                    bl0 = l0;
                    bl1 = l1;
                    first = false;
                }
            }

        const std::size_t slot = n + step;
        const int new_size = clusters[bi].size + clusters[bj].size;
        // Children ordered by smallest contained leaf.
        int ca = clusters[bi].id, cb = clusters[bj].id;
        if (clusters[bj].min_leaf < clusters[bi].min_leaf) std::swap(ca, cb);
        out.merges.push_back({ca, cb, best, new_size});

        clusters.push_back({static_cast<int>(slot),
                            std::min(clusters[bi].min_leaf, clusters[bj].min_leaf), new_size,
                            true});
        clusters[bi].active = false;
        clusters[bj].active = false;

        for (const std::size_t k : active) {
            if (k == bi || k == bj) continue;
            double v = 0.0;
            switch (linkage) {
                case Linkage::single:
                    v = std::min(dist[k][bi], dist[k][bj]);
                    break;
                case Linkage::complete:
                    v = std::max(dist[k][bi], dist[k][bj]);
                    break;
                case Linkage::average:
                    v = (dist[k][bi] * clusters[bi].size + dist[k][bj] * clusters[bj].size) /
                        static_cast<double>(new_size);
                    break;
            }
            dist[k][slot] = dist[slot][k] = v;
        }
        active.erase(std::remove(active.begin(), active.end(), bi), active.end());
        active.erase(std::remove(active.begin(), active.end(), bj), active.end());
        active.push_back(slot);
    }

    // Leaf order: recursive traversal, smaller subtree first (ties: smaller
    // min-leaf first).
    struct NodeInfo {
        int left = -1, right = -1, size = 1, min_leaf = 0;
    };
    std::vector<NodeInfo> info(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) info[i].min_leaf = static_cast<int>(i);
    for (std::size_t s = 0; s < out.merges.size(); ++s) {
        auto& ni = info[n + s];
        ni.left = out.merges[s].a;
        ni.right = out.merges[s].b;
        ni.size = out.merges[s].size;
        ni.min_leaf = std::min(info[static_cast<std::size_t>(ni.left)].min_leaf,
                               info[static_cast<std::size_t>(ni.right)].min_leaf);
    }
    std::vector<int> stack = {static_cast<int>(2 * n - 2)};
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        const auto& ni = info[static_cast<std::size_t>(node)];
        if (ni.left < 0) {
            out.leaf_order.push_back(node);
            continue;
        }
        const auto& li = info[static_cast<std::size_t>(ni.left)];
        const auto& ri = info[static_cast<std::size_t>(ni.right)];
        int first_child = ni.left, second_child = ni.right;
        if (ri.size < li.size || (ri.size == li.size && ri.min_leaf < li.min_leaf))
            std::swap(first_child, second_child);
        stack.push_back(second_child);  // LIFO: push the later child first
        stack.push_back(first_child);
    }
    return out;
}

namespace {

std::string newick_escape(const std::string& s) {
    bool safe = !s.empty();
    for (const char c : s)
        if (c == ' ' || c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '\'')
            safe = false;
    if (safe) return s;
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'') out += "''";
        else out += c;
    }
    out += "'";
    return out;
}

}  // namespace

std::string to_newick(const Dendrogram& d) {
    const std::size_t n = d.labels.size();
    std::vector<double> height(2 * n - 1, 0.0);
    for (std::size_t s = 0; s < d.merges.size(); ++s) height[n + s] = d.merges[s].height;

    // Recursive assembly with branch length = parent height - child height.
    std::function<std::string(int)> render = [&](int node) -> std::string {
        if (node < static_cast<int>(n)) return newick_escape(d.labels[static_cast<std::size_t>(node)]);
        const auto& m = d.merges[static_cast<std::size_t>(node) - n];
        const double ha = height[static_cast<std::size_t>(m.a)];
        const double hb = height[static_cast<std::size_t>(m.b)];
        return "(" + render(m.a) + ":" + format_double(m.height - ha) + "," + render(m.b) + ":" +
               format_double(m.height - hb) + ")";
    };
    return render(static_cast<int>(2 * n - 2)) + ";";
}

void save_dendrogram(const Dendrogram& d, const std::filesystem::path& newick_path,
                     const std::filesystem::path& merges_csv_path) {
    write_file_atomic(newick_path, to_newick(d) + "\n");
    CsvWriter w;
    w.field("step").field("child_a").field("child_b").field("height").field("size");
    w.end_row();
    for (std::size_t s = 0; s < d.merges.size(); ++s) {
        w.field(static_cast<std::int64_t>(s))
            .field(static_cast<std::int64_t>(d.merges[s].a))
            .field(static_cast<std::int64_t>(d.merges[s].b))
            .field(d.merges[s].height)
            .field(static_cast<std::int64_t>(d.merges[s].size));
        w.end_row();
    }
    w.save(merges_csv_path);
}

void save_heatmap_json(const FeatureTable& t, const Dendrogram& d,
                       const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema"] = "sctsa.heatmap/1";
    auto& order = j["row_order"] = nlohmann::json::array();
    for (const int leaf : d.leaf_order) order.push_back(t.row_labels[static_cast<std::size_t>(leaf)]);
    j["columns"] = t.col_names;
    auto& vals = j["values"] = nlohmann::json::array();
    for (const int leaf : d.leaf_order) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < t.cols(); ++c) {
            const auto r = static_cast<std::size_t>(leaf);
            if (t.is_defined(r, c))
                row.push_back(t.at(r, c));
            else
                row.push_back(nullptr);
        }
        vals.push_back(std::move(row));
    }
    if (!t.warnings.empty()) j["warnings"] = t.warnings;
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace sctsa
