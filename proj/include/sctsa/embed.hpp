#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sctsa/expression.hpp"
#include "sctsa/sym_matrix.hpp"

namespace sctsa {

enum class EmbedMethod { mds, pca };

struct Embedding {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<double> coords;  // row-major, n x k
    EmbedMethod method = EmbedMethod::mds;
    std::uint64_t source_hash = 0;
    // MDS: top-k eigenvalues of the double-centered matrix (clamped at 0).
    // PCA: explained variances of the kept components.
    std::vector<double> spectrum;

    double at(std::size_t i, std::size_t d) const { return coords[i * k + d]; }
};

// Classical MDS: double-center B = -1/2 * J * D^2 * J, eigendecompose, scale
// the top-k eigenvectors by sqrt(max(eigenvalue, 0)). Negative eigenvalues
// (permuted-null inputs need not be Euclidean) are clamped to zero. Each
// output column is sign-fixed so its largest-magnitude entry is positive.
Embedding classical_mds(const SymMatrix& d, std::size_t k);

// PCA on column-centered expression values via SVD; same sign convention.
Embedding pca(const ExpressionMatrix& m, std::size_t k);
Embedding pca_rows(const std::vector<double>& values, std::size_t n, std::size_t g,
                   std::size_t k, std::uint64_t source_hash);

SymMatrix euclidean_distances(const Embedding& e);
SymMatrix euclidean_distances_rows(const std::vector<double>& coords, std::size_t n,
                                   std::size_t k);

// CSV artifact: cell_id, t, type, x1..xk.
void save_embedding_csv(const Embedding& e, const ExpressionMatrix& meta,
                        const std::filesystem::path& path);
Embedding load_embedding_csv(const std::filesystem::path& path, std::vector<std::string>* ids,
                             std::vector<int>* timestamps, std::vector<std::string>* types);

}  // namespace sctsa
