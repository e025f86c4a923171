#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sctsa/embed.hpp"
#include "sctsa/filtration.hpp"
#include "sctsa/sym_matrix.hpp"

namespace sctsa {

struct CoverInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Per-dimension overlapping intervals: R uniform intervals over [min, max]
// sized so consecutive intervals share fraction g of their length. A
// zero-range dimension collapses to one full-range interval.
struct Cover {
    int intervals = 10;
    double overlap = 0.5;
    std::vector<std::vector<CoverInterval>> dims;

    std::size_t cube_count() const;
    // Multi-index of cube id, row-major over dimensions.
    std::vector<int> cube_index(std::size_t cube) const;
    bool cube_contains(std::size_t cube, const double* point) const;
};

Cover build_cover(const Embedding& lens, int intervals, double overlap);

// Memberships: for each cube with at least one point, the point indices it
// contains (every point lands in at least one cube).
std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> cover_memberships(
    const Cover& cover, const Embedding& lens);

enum class ClusterCut { histogram_gap, fixed };

struct ClusterParams {
    ClusterCut cut = ClusterCut::histogram_gap;
    int histogram_bins = 10;
    double fixed_threshold = 0.0;
};

// Single-linkage clustering of one cube's points under the temporal
// constraint: pairs further than tau in time never merge, and no merge may
// produce a cluster whose timestamp span exceeds tau. The dendrogram is cut
// at the first empty bin of a histogram over the accepted merge heights.
std::vector<std::vector<std::uint32_t>> cluster_cube(const std::vector<std::uint32_t>& points,
                                                     const SymMatrix& d,
                                                     const std::vector<int>& timestamps, int tau,
                                                     const ClusterParams& cp = {});

struct MapperNode {
    int id = 0;
    std::size_t cube = 0;
    std::vector<std::uint32_t> members;
    int t_min = 0;
    int t_max = 0;
    int t_mode = 0;  // most common member timestamp (smallest on ties)
    double x = 0.0;
    double y = 0.0;
};

struct MapperEdge {
    int u = 0;
    int v = 0;
    int shared = 0;
};

struct MapperGraph {
    std::vector<MapperNode> nodes;
    std::vector<MapperEdge> edges;
};

// Nerve with the temporal rule: an edge requires a shared member and a
// union timestamp span within tau.
MapperGraph assemble_graph(const std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>>&
                               clusters_by_cube,
                           const std::vector<int>& timestamps, int tau);

struct MapperParams {
    int intervals = 10;
    double overlap = 0.5;
    int tau = kTauUnlimited;
    ClusterParams cluster;
};

MapperGraph build_mapper(const Embedding& lens, const SymMatrix& d,
                         const std::vector<int>& timestamps, const MapperParams& p);

// Deterministic force-directed layout (seeded init, fixed iteration count);
// coordinates written into the nodes.
void layout_graph(MapperGraph& g, std::uint64_t seed, int iterations = 300);

void save_mapper_json(const MapperGraph& g, const std::filesystem::path& path);
void save_mapper_dot(const MapperGraph& g, const std::filesystem::path& path);
void save_mapper_csv(const MapperGraph& g, const std::filesystem::path& nodes_path,
                     const std::filesystem::path& edges_path);

}  // namespace sctsa
