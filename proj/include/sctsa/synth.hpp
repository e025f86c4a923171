#pragma once

#include <cstdint>

#include "sctsa/expression.hpp"

namespace sctsa {

// Bundled synthetic dataset: clustered Gaussian expression trajectories over
// `groups` ordinal time points with a programmed bifurcation. Groups before
// `branch_group` are one broad drifting blob; from `branch_group` on, cells
// split into two branches (types suffixed A/B) whose cores are tight in
// correlation space, plus a small anti-correlated halo per group (types
// suffixed An/Bn) that stretches the distance range. The tight cores drive
// the high-order simplex abundance; the halo keeps it high relative to the
// permuted null.
struct SynthParams {
    int groups = 12;
    int cells_per_group = 120;
    int genes = 24;
    int branch_group = 5;  // first branched time index (0-based)
    double base_level = 5.0;
    double amplitude = 2.0;
    double blob_noise = 1.6;
    double core_noise = 0.15;
    double halo_fraction = 0.05;
    double halo_noise = 3.0;
    double branch_corr = 0.65;  // correlation between the two branch signatures
    double drift = 0.35;        // consecutive-group signature drift
    std::uint64_t seed = 1;
};

ExpressionMatrix synth_dataset(const SynthParams& p);

}  // namespace sctsa
