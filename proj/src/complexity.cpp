#include "sctsa/complexity.hpp"

#include <cmath>

#include "sctsa/errors.hpp"
#include "sctsa/parallel.hpp"
#include "sctsa/rng.hpp"
#include "sctsa/witness.hpp"

namespace sctsa {

SymMatrix permute_distances(const SymMatrix& d, std::uint64_t seed) {
    std::vector<double> tri = d.condensed();
    Rng rng(seed);
    rng.shuffle(tri);
    return SymMatrix::from_condensed(d.size(), std::move(tri));
}

std::vector<count_t> embedded_simplex_counts(const SymMatrix& d, const std::vector<int>& timestamps,
                                             const ScPipelineParams& p, std::uint64_t seed,
                                             SimplexCountCurve* curve_out) {
    if (d.size() < 2) throw data_error("count pipeline needs at least 2 points");
    const Embedding emb = classical_mds(d, static_cast<std::size_t>(p.embed_dim));
    const SymMatrix ed = euclidean_distances(emb);
    FiltrationParams fp;
    fp.grid = default_grid(ed, p.grid_steps);
    fp.tau = p.tau;
    fp.max_dim = p.max_dim;

    SimplexCountCurve curve;
    if (p.landmarks > 0) {
        const auto m = std::min<std::size_t>(static_cast<std::size_t>(p.landmarks), ed.size());
        const LandmarkSet lm = maxmin_landmarks(ed, m, derive_seed(seed, 0x6c616e64ull), p.nu);
        curve = lazy_witness_curve(ed, lm, fp, timestamps, p.threads);
    } else {
        curve = simplex_count_curve(ed, timestamps, fp, p.threads);
    }
    if (curve_out) *curve_out = curve;
    return curve.cumulative;
}

std::vector<double> NullEnsemble::mean_by_dim() const {
    std::vector<double> mean(static_cast<std::size_t>(max_dim) + 1, 0.0);
    if (counts.empty()) return mean;
    for (const auto& row : counts)
        for (std::size_t n = 0; n < mean.size(); ++n) mean[n] += static_cast<double>(row[n]);
    for (auto& v : mean) v /= static_cast<double>(counts.size());
    return mean;
}

std::vector<double> NullEnsemble::std_by_dim() const {
    std::vector<double> sd(static_cast<std::size_t>(max_dim) + 1, 0.0);
    if (counts.size() < 2) return sd;
    const auto mean = mean_by_dim();
    for (const auto& row : counts)
        for (std::size_t n = 0; n < sd.size(); ++n) {
            const double dv = static_cast<double>(row[n]) - mean[n];
            sd[n] += dv * dv;
        }
    for (auto& v : sd) v = std::sqrt(v / static_cast<double>(counts.size() - 1));
    return sd;
}

NullEnsemble null_ensemble(const SymMatrix& d, const std::vector<int>& timestamps,
                           const ScPipelineParams& p, int B, std::uint64_t seed,
                           bool force_identity) {
    if (B < 1) throw config_error("null ensemble needs B >= 1 replicates");
    NullEnsemble ens;
    ens.B = B;
    ens.seed = seed;
    ens.max_dim = p.max_dim;
    ens.counts.assign(static_cast<std::size_t>(B), {});
    // Replicates are embarrassingly parallel and merged by rank. The count
    // pipeline itself is kept single-threaded here to avoid nested pools.
    ScPipelineParams inner = p;
    inner.threads = 1;
    parallel_for(static_cast<std::size_t>(B), p.threads, [&](std::size_t b) {
        const std::uint64_t rep_seed = null_replicate_seed(seed, static_cast<int>(b));
        const SymMatrix perm = force_identity ? d : permute_distances(d, rep_seed);
        ens.counts[b] = embedded_simplex_counts(perm, timestamps, inner, rep_seed);
    });
    return ens;
}

ComplexityProfile normalized_complexity(const std::vector<count_t>& data_counts,
                                        const NullEnsemble& ens) {
    if (data_counts.size() != static_cast<std::size_t>(ens.max_dim) + 1)
        throw data_error("data/null dimension mismatch in normalized_complexity");
    ComplexityProfile prof;
    prof.max_dim = ens.max_dim;
    prof.seed = ens.seed;
    prof.data_counts = data_counts;
    prof.null_mean = ens.mean_by_dim();
    prof.null_std = ens.std_by_dim();
    prof.sc.assign(data_counts.size(), std::nullopt);
    for (std::size_t n = 0; n < data_counts.size(); ++n) {
        if (prof.null_mean[n] > 0.0)
            prof.sc[n] = static_cast<double>(data_counts[n]) / prof.null_mean[n];
    }
    return prof;
}

std::vector<ComplexityProfile> complexity_by_group(const ExpressionMatrix& m,
                                                   const GroupComplexityParams& p,
                                                   std::uint64_t seed,
                                                   std::vector<SimplexCountCurve>* curves_out) {
    const auto groups = group_rows(m, p.group_by);
    if (groups.empty()) throw data_error("no groups found");
    std::vector<ComplexityProfile> profiles;
    if (curves_out) curves_out->clear();

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& grp = groups[gi];
        for (int rep = 0; rep < p.repeats; ++rep) {
            const std::uint64_t rep_seed =
                derive_seed(derive_seed(seed, gi), static_cast<std::uint64_t>(rep));

            if (!p.with_replacement && grp.members.size() < p.m_points)
                throw data_error("group '" + grp.label + "' has " +
                                 std::to_string(grp.members.size()) + " members, fewer than " +
                                 std::to_string(p.m_points) + " requested");
            Rng rng(derive_seed(rep_seed, 0));
            std::vector<std::uint32_t> local;
            if (p.with_replacement) {
                local.reserve(p.m_points);
                for (std::size_t k = 0; k < p.m_points; ++k)
                    local.push_back(grp.members[rng.below(grp.members.size())]);
            } else {
                const auto picks = rng.sample_without_replacement(grp.members.size(), p.m_points);
                local.reserve(p.m_points);
                for (const auto pick : picks) local.push_back(grp.members[pick]);
            }
            std::sort(local.begin(), local.end());
            const ExpressionMatrix sample = take_rows(m, local);

            const SymMatrix corr = correlation_distance(sample, p.metric, p.pipe.threads);

            // Data route: counts from the configured embedding. The null is
            // always re-embedded by MDS from the permuted correlation
            // distances, matching the control-model construction.
            std::vector<count_t> data_counts;
            SimplexCountCurve curve;
            if (p.embed == EmbedMethod::mds) {
                data_counts = embedded_simplex_counts(corr, sample.timestamps, p.pipe,
                                                      derive_seed(rep_seed, 2), &curve);
            } else {
                const Embedding emb = pca(sample, static_cast<std::size_t>(p.pipe.embed_dim));
                const SymMatrix ed = euclidean_distances(emb);
                FiltrationParams fp;
                fp.grid = default_grid(ed, p.pipe.grid_steps);
                fp.tau = p.pipe.tau;
                fp.max_dim = p.pipe.max_dim;
                if (p.pipe.landmarks > 0) {
                    const auto lmk =
                        std::min<std::size_t>(static_cast<std::size_t>(p.pipe.landmarks), ed.size());
                    const LandmarkSet lm = maxmin_landmarks(
                        ed, lmk, derive_seed(derive_seed(rep_seed, 2), 0x6c616e64ull), p.pipe.nu);
                    curve = lazy_witness_curve(ed, lm, fp, sample.timestamps, p.pipe.threads);
                } else {
                    curve = simplex_count_curve(ed, sample.timestamps, fp, p.pipe.threads);
                }
                data_counts = curve.cumulative;
            }

            const NullEnsemble ens = null_ensemble(corr, sample.timestamps, p.pipe, p.B,
                                                   derive_seed(rep_seed, 1));
            ComplexityProfile prof = normalized_complexity(data_counts, ens);
            prof.group = grp.label;
            prof.rep = rep;
            prof.m = p.m_points;
            prof.seed = rep_seed;
            profiles.push_back(std::move(prof));
            if (curves_out) curves_out->push_back(std::move(curve));
        }
    }
    return profiles;
}

}  // namespace sctsa
