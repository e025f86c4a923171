#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "sctsa/filtration.hpp"
#include "sctsa/sym_matrix.hpp"

namespace sctsa {

// Simplices are materialized only up to homology_max_dim + 1; counting-only
// queries go through the complex module instead.
constexpr int kMaxComplexVertices = 12;

struct Simplex {
    std::array<std::uint32_t, kMaxComplexVertices> v{};  // sorted, first dim+1 used
    double birth = 0.0;
    std::uint8_t dim = 0;
};

struct FilteredComplex {
    std::vector<Simplex> simplices;  // sorted by (birth, dim, lexicographic vertices)
    std::size_t n_points = 0;
    int max_dim = 0;  // highest materialized simplex dimension
};

constexpr std::size_t kDefaultSimplexBudget = 10'000'000;

// Flag complex of the tau-constrained neighborhood graph up to dimension
// homology_max_dim + 1, truncated at the given threshold. Vertex birth is 0,
// edge birth is the distance, higher births are the max over edges. Throws
// budget_error when the complex exceeds the simplex budget.
FilteredComplex build_filtered_complex(const SymMatrix& d, const std::vector<int>& timestamps,
                                       int tau, int homology_max_dim,
                                       double threshold = std::numeric_limits<double>::infinity(),
                                       std::size_t budget = kDefaultSimplexBudget);
FilteredComplex build_filtered_complex(const TimedPointCloud& pc, const FiltrationParams& fp,
                                       int homology_max_dim,
                                       std::size_t budget = kDefaultSimplexBudget);

struct PersistenceInterval {
    int dim = 0;
    double birth = 0.0;
    double death = std::numeric_limits<double>::infinity();
    bool finite() const { return death != std::numeric_limits<double>::infinity(); }
};

struct Barcode {
    std::vector<PersistenceInterval> intervals;
    int homology_max_dim = 0;
};

// Boundary-matrix column reduction over Z/2 with the clearing optimization.
// Zero-persistence pairs are dropped unless keep_zero_length is set.
Barcode reduce_persistence(const FilteredComplex& fc, bool keep_zero_length = false);

struct BettiCurve {
    std::vector<double> grid;
    std::vector<std::vector<std::uint32_t>> betti;  // [dim][step]
};

// Intervals alive at each threshold under the half-open [birth, death)
// convention.
BettiCurve betti_curve(const Barcode& b, const std::vector<double>& grid);

struct BettiFeatureRow {
    double integral = 0.0;  // sum over the grid times the grid step
    double peak = 0.0;
    double final_value = 0.0;
};
std::vector<BettiFeatureRow> betti_features(const BettiCurve& bc);

void save_barcode_csv(const Barcode& b, const std::filesystem::path& path);
void save_barcode_json(const Barcode& b, const std::filesystem::path& path);
void save_betti_curve_csv(const BettiCurve& bc, const std::filesystem::path& path);

}  // namespace sctsa
