#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace sctsa {

// Symmetric matrix with zero diagonal, stored as the packed upper triangle
// in row-major order. This is the substrate for distance matrices and for
// edge-birth matrices (which may hold +inf entries).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n, double fill = 0.0)
        : n_(n), tri_(n < 2 ? 0 : n * (n - 1) / 2, fill) {}

    static SymMatrix from_condensed(std::size_t n, std::vector<double> tri);

    std::size_t size() const { return n_; }
    std::size_t pair_count() const { return tri_.size(); }

    double operator()(std::size_t i, std::size_t j) const {
        return i == j ? 0.0 : tri_[pack(i, j)];
    }
    void set(std::size_t i, std::size_t j, double v) { tri_[pack(i, j)] = v; }

    std::vector<double>& condensed() { return tri_; }
    const std::vector<double>& condensed() const { return tri_; }

    // Largest off-diagonal entry; 0 for matrices smaller than 2x2.
    double max_value() const;

    // Enforces the distance-matrix contract: finite, non-negative entries.
    void validate_distances(const char* what) const;

    // Restriction to a subset of indices, in the given order.
    SymMatrix submatrix(const std::vector<std::uint32_t>& idx) const;

    // Little-endian binary format: magic "SCTSA-DM", u64 N, then
    // N*(N-1)/2 f64 upper-triangle values in row-major order.
    void save_binary(const std::filesystem::path& path) const;
    static SymMatrix load_binary(const std::filesystem::path& path);

    // Full square CSV, no header.
    void save_csv(const std::filesystem::path& path) const;
    static SymMatrix load_csv(const std::filesystem::path& path);

    bool operator==(const SymMatrix& o) const { return n_ == o.n_ && tri_ == o.tri_; }

private:
    std::size_t pack(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::vector<double> tri_;
};

using DistanceMatrix = SymMatrix;

}  // namespace sctsa
