#pragma once

#include <cstdint>
#include <vector>

#include "sctsa/filtration.hpp"
#include "sctsa/sym_matrix.hpp"

namespace sctsa {

struct LandmarkSet {
    std::vector<std::uint32_t> indices;  // in selection order
    int nu = 2;
    // Witness slack per point: distance to the nu-th nearest landmark for
    // non-landmarks, 0 at landmark positions (a landmark witnesses its own
    // edges with zero slack). All zeros when nu = 0.
    std::vector<double> m_nu;
    // Min distance of each landmark to its predecessors at selection time
    // (+inf for the first); non-increasing by construction.
    std::vector<double> radii;
};

// Sequential maxmin selection: the first landmark is uniform by seed, each
// later one maximizes its minimum distance to the chosen set, ties broken by
// lowest index.
LandmarkSet maxmin_landmarks(const SymMatrix& d, std::size_t m, std::uint64_t seed, int nu = 2);

// Slack vector for an arbitrary landmark set (0 at landmarks and for nu = 0;
// nu is clamped to the landmark count).
std::vector<double> witness_slack(const SymMatrix& d, const std::vector<std::uint32_t>& landmarks,
                                  int nu);

// Lazy-witness edge birth values on the landmark set:
//   birth(a, b) = max(0, min( d(a, b),
//                             min over non-landmark witnesses x of
//                                 max(d(a, x), d(b, x)) - slack[x] ))
// The d(a, b) term is each endpoint witnessing its own edge with zero slack;
// with every point a landmark the construction therefore reduces exactly to
// Vietoris-Rips on the full cloud.
SymMatrix witness_edge_births(const SymMatrix& d, const std::vector<std::uint32_t>& landmarks,
                              const std::vector<double>& slack);

// Simplex count curve of the lazy witness complex (flag complex over the
// witness edges) with the temporal constraint applied to landmark timestamps.
SimplexCountCurve lazy_witness_curve(const SymMatrix& d, const LandmarkSet& lm,
                                     const FiltrationParams& fp,
                                     const std::vector<int>& timestamps, int threads = 1);

}  // namespace sctsa
