#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sctsa/complexity.hpp"
#include "sctsa/homology.hpp"

namespace sctsa {

// Groups-by-features table with an explicit defined-mask; undefined entries
// (e.g. SC values with a zero null mean) are excluded from distances via
// pairwise-complete comparison.
struct FeatureTable {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_names;
    std::vector<double> values;  // row-major
    std::vector<char> defined;   // row-major mask
    std::vector<std::string> warnings;

    std::size_t rows() const { return row_labels.size(); }
    std::size_t cols() const { return col_names.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    bool is_defined(std::size_t r, std::size_t c) const { return defined[r * cols() + c] != 0; }
};

// SC_1..SC_max columns from one profile per group. Optional per-column
// z-scoring over defined entries; constant and entirely-undefined columns
// are dropped with a warning record.
FeatureTable build_feature_table(const std::vector<ComplexityProfile>& profiles,
                                 bool standardize);

// Betti-summary features (integral, peak, final value per dimension).
FeatureTable build_feature_table_betti(const std::vector<std::string>& labels,
                                       const std::vector<std::vector<BettiFeatureRow>>& rows,
                                       bool standardize);

enum class Linkage { single, average, complete };
enum class FeatureMetric { euclidean, correlation };

struct DendrogramMerge {
    int a = 0;  // scipy-style ids: leaves 0..n-1, merge t creates id n+t
    int b = 0;
    double height = 0.0;
    int size = 0;
};

struct Dendrogram {
    std::vector<DendrogramMerge> merges;
    std::vector<int> leaf_order;  // smaller-subtree-first traversal
    std::vector<std::string> labels;
};

// Agglomerative clustering with deterministic tie-breaking by smallest leaf
// index. Throws on fewer than 2 rows.
Dendrogram hierarchical_cluster(const FeatureTable& t, Linkage linkage, FeatureMetric metric);

// Pairwise-complete row distances used by the clustering (exposed for
// oracle-style verification).
SymMatrix feature_distances(const FeatureTable& t, FeatureMetric metric);

std::string to_newick(const Dendrogram& d);
void save_dendrogram(const Dendrogram& d, const std::filesystem::path& newick_path,
                     const std::filesystem::path& merges_csv_path);
void save_heatmap_json(const FeatureTable& t, const Dendrogram& d,
                       const std::filesystem::path& path);

}  // namespace sctsa
