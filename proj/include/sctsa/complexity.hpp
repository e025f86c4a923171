#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sctsa/embed.hpp"
#include "sctsa/expression.hpp"
#include "sctsa/filtration.hpp"
#include "sctsa/rng.hpp"
#include "sctsa/sym_matrix.hpp"

namespace sctsa {

// Uniformly random permutation of the off-diagonal entries, mirrored to keep
// symmetry; the distance multiset is preserved exactly.
SymMatrix permute_distances(const SymMatrix& d, std::uint64_t seed);

// Parameters of the count pipeline applied identically to data and nulls:
// embed by classical MDS, take Euclidean distances, filtrate on the
// matrix-derived default grid, count simplices per dimension.
struct ScPipelineParams {
    int grid_steps = 100;
    int tau = kTauUnlimited;
    int max_dim = 7;
    int embed_dim = 2;
    int threads = 1;
    // Optional lazy-witness route: when landmarks > 0 the counts come from
    // the lazy witness complex over maxmin landmarks instead of the full
    // Rips complex of the embedding.
    int landmarks = 0;
    int nu = 2;
};

// One pass of the pipeline: pre-embedding distance matrix -> cumulative
// simplex counts per dimension (0..max_dim). The filtration grid is derived
// from the embedded distances so counts are covariant under global
// rescaling. The optional curve output receives the full per-step counts.
std::vector<count_t> embedded_simplex_counts(const SymMatrix& d, const std::vector<int>& timestamps,
                                             const ScPipelineParams& p, std::uint64_t seed = 0,
                                             SimplexCountCurve* curve_out = nullptr);

inline std::uint64_t null_replicate_seed(std::uint64_t seed, int replicate) {
    return derive_seed(seed, static_cast<std::uint64_t>(replicate));
}

struct NullEnsemble {
    int B = 0;
    std::uint64_t seed = 0;
    int max_dim = 7;
    std::vector<std::vector<count_t>> counts;  // B rows of per-dimension cumulative counts
    std::vector<double> mean_by_dim() const;
    std::vector<double> std_by_dim() const;  // sample std; 0 when B < 2
};

// B independent permuted-distance replicates pushed through the same count
// pipeline. force_identity is a testing hook that skips the permutation.
NullEnsemble null_ensemble(const SymMatrix& d, const std::vector<int>& timestamps,
                           const ScPipelineParams& p, int B, std::uint64_t seed,
                           bool force_identity = false);

struct ComplexityProfile {
    std::string group;
    int rep = 0;
    std::size_t m = 0;  // sample size
    std::uint64_t seed = 0;
    int max_dim = 7;
    std::vector<count_t> data_counts;              // [0..max_dim]
    std::vector<double> null_mean, null_std;       // [0..max_dim]
    std::vector<std::optional<double>> sc;         // [0..max_dim]; sc[0] unused,
                                                   // nullopt = undefined (zero null mean)
};

// SC_n = data_counts[n] / mean(null_counts[n]); undefined (not 0, not inf)
// when the null mean is zero.
ComplexityProfile normalized_complexity(const std::vector<count_t>& data_counts,
                                        const NullEnsemble& ens);

struct GroupComplexityParams {
    GroupBy group_by = GroupBy::timestamp;
    std::size_t m_points = 100;
    ScPipelineParams pipe;
    EmbedMethod embed = EmbedMethod::mds;
    CorrelationKind metric = CorrelationKind::pearson;
    int B = 20;
    int repeats = 1;
    bool with_replacement = false;
};

// Per group and bootstrap repeat: sample, embed (MDS on correlation
// distances or PCA on expression), filtrate, and compare against the
// permuted-distance null of the sample's correlation matrix.
std::vector<ComplexityProfile> complexity_by_group(const ExpressionMatrix& m,
                                                   const GroupComplexityParams& p,
                                                   std::uint64_t seed,
                                                   std::vector<SimplexCountCurve>* curves_out =
                                                       nullptr);

}  // namespace sctsa
