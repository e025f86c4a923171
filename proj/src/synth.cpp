#include "sctsa/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "sctsa/errors.hpp"
#include "sctsa/rng.hpp"

namespace sctsa {

namespace {

std::vector<double> random_unit(Rng& rng, int genes) {
    std::vector<double> v(static_cast<std::size_t>(genes));
    double norm = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> drift_signature(Rng& rng, const std::vector<double>& s, double drift) {
    std::vector<double> out(s.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = s[i] + drift * rng.normal();
        norm += out[i] * out[i];
    }
    norm = std::sqrt(norm);
    for (auto& x : out) x /= norm;
    return out;
}

// Unit vector with the requested correlation against s.
std::vector<double> correlated_signature(Rng& rng, const std::vector<double>& s, double corr) {
    std::vector<double> fresh = random_unit(rng, static_cast<int>(s.size()));
    double dot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dot += fresh[i] * s[i];
    std::vector<double> orth(s.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        orth[i] = fresh[i] - dot * s[i];
        norm += orth[i] * orth[i];
    }
    norm = std::sqrt(norm);
    std::vector<double> out(s.size());
    const double w = std::sqrt(std::max(0.0, 1.0 - corr * corr));
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = corr * s[i] + w * orth[i] / norm;
    return out;
}

std::string group_tag(int g) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%02d", g + 1);
    return buf;
}

}  // namespace

ExpressionMatrix synth_dataset(const SynthParams& p) {
    if (p.groups < 1 || p.cells_per_group < 2 || p.genes < 3)
        throw config_error("synth: need at least 1 group, 2 cells per group, 3 genes");
    if (p.branch_group < 1 || p.branch_group > p.groups)
        throw config_error("synth: branch_group must be within the group range");

    Rng sig_rng(derive_seed(p.seed, 1));
    ExpressionMatrix m;
    m.n_genes = static_cast<std::size_t>(p.genes);
    for (int j = 0; j < p.genes; ++j) m.gene_names.push_back("g" + std::to_string(j + 1));

    // Signature paths: one trunk, then two drifting branches.
    std::vector<std::vector<double>> trunk;
    trunk.push_back(random_unit(sig_rng, p.genes));
    for (int g = 1; g < p.branch_group; ++g)
        trunk.push_back(drift_signature(sig_rng, trunk.back(), p.drift));

    std::vector<std::vector<double>> branch_a, branch_b;
    if (p.branch_group < p.groups) {
        branch_a.push_back(drift_signature(sig_rng, trunk.back(), p.drift));
        branch_b.push_back(correlated_signature(sig_rng, branch_a.back(), p.branch_corr));
        for (int g = p.branch_group + 1; g < p.groups; ++g) {
            branch_a.push_back(drift_signature(sig_rng, branch_a.back(), p.drift));
            branch_b.push_back(drift_signature(sig_rng, branch_b.back(), p.drift));
        }
    }

    std::size_t cell_counter = 0;
    auto emit_cell = [&](int g, const std::string& type, const std::vector<double>& sig,
                         double sig_scale, double noise, Rng& rng) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "c%06zu", ++cell_counter);
        m.cell_ids.emplace_back(idbuf);
        m.timestamps.push_back(g);
        m.cell_types.push_back(type);
        for (int j = 0; j < p.genes; ++j) {
            const double v = p.base_level +
                             p.amplitude * sig_scale * sig[static_cast<std::size_t>(j)] +
                             noise * rng.normal();
            m.values.push_back(std::max(v, 0.0));
        }
    };

    for (int g = 0; g < p.groups; ++g) {
        Rng rng(derive_seed(p.seed, 1000 + static_cast<std::uint64_t>(g)));
        const std::string tag = group_tag(g);
        if (g < p.branch_group) {
            for (int i = 0; i < p.cells_per_group; ++i)
                emit_cell(g, tag, trunk[static_cast<std::size_t>(g)], 1.0, p.blob_noise, rng);
            continue;
        }
        const auto& sa = branch_a[static_cast<std::size_t>(g - p.branch_group)];
        const auto& sb = branch_b[static_cast<std::size_t>(g - p.branch_group)];
        const int half = p.cells_per_group / 2;
        const int halo_per_branch =
            static_cast<int>(std::lround(p.halo_fraction * static_cast<double>(half)));
        for (int i = 0; i < p.cells_per_group; ++i) {
            const bool is_a = i < half;
            const auto& sig = is_a ? sa : sb;
            const int rank = is_a ? i : i - half;
            const int branch_size = is_a ? half : p.cells_per_group - half;
            const bool halo = rank >= branch_size - halo_per_branch;
            if (halo)
                emit_cell(g, tag + (is_a ? "An" : "Bn"), sig, -1.0, p.halo_noise, rng);
            else
                emit_cell(g, tag + (is_a ? "A" : "B"), sig, 1.0, p.core_noise, rng);
        }
    }
    m.n_cells = m.cell_ids.size();
    m.validate();
    return m;
}

}  // namespace sctsa
