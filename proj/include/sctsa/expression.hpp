#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sctsa/sym_matrix.hpp"

namespace sctsa {

// Cells-by-genes expression table with per-cell metadata. Values are
// library-normalized upstream; this layer only enforces the contract
// (finite, non-negative, metadata aligned with rows).
struct ExpressionMatrix {
    std::size_t n_cells = 0;
    std::size_t n_genes = 0;
    std::vector<double> values;  // row-major, n_cells x n_genes
    std::vector<std::string> cell_ids;
    std::vector<int> timestamps;  // ordinal time-point indices
    std::vector<std::string> cell_types;
    std::vector<std::string> gene_names;

    double at(std::size_t cell, std::size_t gene) const {
        return values[cell * n_genes + gene];
    }
    std::span<const double> row(std::size_t cell) const {
        return {values.data() + cell * n_genes, n_genes};
    }

    std::vector<int> distinct_timestamps() const;  // sorted ascending
    void validate() const;
};

enum class GroupBy { timestamp, cell_type };

// Group labels with member row indices, ordered by key (timestamps
// ascending, cell types lexicographic) for deterministic iteration.
struct Group {
    std::string label;
    std::vector<std::uint32_t> members;
};
std::vector<Group> group_rows(const ExpressionMatrix& m, GroupBy by);

struct LoadSchema {
    std::string id_column = "cell_id";
    std::string time_column = "timestamp";
    std::string type_column = "cell_type";
    char delimiter = 0;  // 0 = infer from extension (.tsv -> tab, else comma)
};

// Parses a delimited expression table: one header row naming the metadata
// columns from the schema; every remaining column is a gene. Rejects missing
// columns, non-numeric or negative expression values, non-integer
// timestamps, and duplicate cell ids, naming the offending row/column.
ExpressionMatrix load_expression(const std::filesystem::path& path, const LoadSchema& schema = {});

// Canonical artifact form: cell_id, timestamp, cell_type, then gene columns.
void save_expression_csv(const ExpressionMatrix& m, const std::filesystem::path& path);

enum class CorrelationKind { pearson, spearman };

// d[i][j] = 1 - correlation(row_i, row_j), in [0, 2]. Rows with zero
// variance are hard errors (silently dropping them would desynchronize
// the metadata), reported by cell id.
SymMatrix correlation_distance(const ExpressionMatrix& m,
                               CorrelationKind kind = CorrelationKind::pearson,
                               int threads = 1);

// Uniform per-group sample of m_points rows (without replacement by
// default), concatenated in group order with indices sorted within each
// group. Deterministic given seed.
ExpressionMatrix bootstrap_sample(const ExpressionMatrix& m, GroupBy by, std::size_t m_points,
                                  std::uint64_t seed, bool with_replacement = false);

// Row subset in the given order (metadata carried along).
ExpressionMatrix take_rows(const ExpressionMatrix& m, const std::vector<std::uint32_t>& rows);

}  // namespace sctsa
