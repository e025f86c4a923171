#include "sctsa/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "sctsa/complexity.hpp"
#include "sctsa/csv.hpp"
#include "sctsa/digest.hpp"
#include "sctsa/embed.hpp"
#include "sctsa/errors.hpp"
#include "sctsa/expression.hpp"
#include "sctsa/homology.hpp"
#include "sctsa/lineage.hpp"
#include "sctsa/manifest.hpp"
#include "sctsa/mapper.hpp"
#include "sctsa/synth.hpp"
#include "sctsa/witness.hpp"

namespace sctsa::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    fs::path out;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware
    std::string input;  // optional explicit dataset path
    LoadSchema schema;
};

int parse_tau(const std::string& s) {
    if (s == "inf" || s == "infinite" || s == "-1") return kTauUnlimited;
    int v = 0;
    try {
        v = std::stoi(s);
    } catch (...) {
        throw config_error("tau must be a non-negative integer or 'inf'");
    }
    if (v < 0) return kTauUnlimited;
    return v;
}

fs::path default_out() {
    if (const char* root = std::getenv("SCTSA_OUTPUT_ROOT")) return fs::path(root) / "sctsa_out";
    return fs::path("sctsa_out");
}

std::string rel_to_out(const Context& ctx, const fs::path& p) {
    return fs::relative(p, ctx.out).string();
}

void record_stage(const Context& ctx, const std::string& stage,
                  std::map<std::string, std::string> config,
                  std::map<std::string, std::string> inputs, const std::vector<fs::path>& outputs,
                  double seconds) {
    RunManifest manifest = RunManifest::load_or_empty(ctx.out);
    RunManifest::Stage st;
    st.config = std::move(config);
    st.inputs = std::move(inputs);
    for (const auto& p : outputs) st.outputs[rel_to_out(ctx, p)] = digest_hex(digest_file(p.string()));
    st.seconds = seconds;
    manifest.stages[stage] = std::move(st);
    manifest.save(ctx.out);
}

class StageTimer {
public:
    StageTimer() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

// Dataset resolution: explicit --input, then the ingest artifact, then the
// bundled synthetic artifact.
ExpressionMatrix load_dataset(const Context& ctx, std::map<std::string, std::string>* inputs) {
    fs::path path;
    if (!ctx.input.empty()) {
        path = ctx.input;
    } else if (fs::exists(ctx.out / "ingest" / "dataset.csv")) {
        path = ctx.out / "ingest" / "dataset.csv";
    } else if (fs::exists(ctx.out / "synth" / "dataset.csv")) {
        path = ctx.out / "synth" / "dataset.csv";
    } else {
        throw data_error("no dataset: pass --input or run 'ingest'/'synth' first (looked in " +
                         ctx.out.string() + ")");
    }
    if (inputs) (*inputs)[path.string()] = digest_hex(digest_file(path.string()));
    ExpressionMatrix m = load_expression(path, ctx.schema);
    m.validate();
    return m;
}

std::string tau_str(int tau) { return tau < 0 ? "inf" : std::to_string(tau); }

// ----------------------------------------------------------------- synth --

struct SynthOpts {
    SynthParams p;
};

void cmd_synth(const Context& ctx, const SynthOpts& o) {
    StageTimer timer;
    SynthParams p = o.p;
    p.seed = ctx.seed;
    const ExpressionMatrix m = synth_dataset(p);
    const fs::path out = ctx.out / "synth" / "dataset.csv";
    save_expression_csv(m, out);
    record_stage(ctx, "synth",
                 {{"groups", std::to_string(p.groups)},
                  {"cells_per_group", std::to_string(p.cells_per_group)},
                  {"genes", std::to_string(p.genes)},
                  {"branch_group", std::to_string(p.branch_group)},
                  {"seed", std::to_string(p.seed)}},
                 {}, {out}, timer.seconds());
    std::cout << "synth: " << m.n_cells << " cells, " << m.n_genes << " genes -> " << out.string()
              << "\n";
}

// ---------------------------------------------------------------- ingest --

void cmd_ingest(const Context& ctx) {
    StageTimer timer;
    if (ctx.input.empty()) throw config_error("ingest requires --input");
    std::map<std::string, std::string> inputs;
    inputs[ctx.input] = digest_hex(digest_file(ctx.input));
    ExpressionMatrix m = load_expression(ctx.input, ctx.schema);
    m.validate();
    const fs::path out = ctx.out / "ingest" / "dataset.csv";
    save_expression_csv(m, out);
    record_stage(ctx, "ingest",
                 {{"input", ctx.input},
                  {"id_column", ctx.schema.id_column},
                  {"time_column", ctx.schema.time_column},
                  {"type_column", ctx.schema.type_column}},
                 inputs, {out}, timer.seconds());
    std::cout << "ingest: " << m.n_cells << " cells, " << m.n_genes << " genes, "
              << m.distinct_timestamps().size() << " time points -> " << out.string() << "\n";
}

// ----------------------------------------------------------------- embed --

struct EmbedOpts {
    std::string method = "mds";
    int dim = 2;
    std::string metric = "pearson";
};

void cmd_embed(const Context& ctx, const EmbedOpts& o) {
    StageTimer timer;
    std::map<std::string, std::string> inputs;
    const ExpressionMatrix m = load_dataset(ctx, &inputs);
    const CorrelationKind kind =
        o.metric == "spearman" ? CorrelationKind::spearman : CorrelationKind::pearson;
    const SymMatrix corr = correlation_distance(m, kind, ctx.threads);

    Embedding emb;
    if (o.method == "pca")
        emb = pca(m, static_cast<std::size_t>(o.dim));
    else
        emb = classical_mds(corr, static_cast<std::size_t>(o.dim));

    const fs::path dir = ctx.out / "embed";
    const fs::path emb_csv = dir / "embedding.csv";
    const fs::path dist_bin = dir / "distances.bin";
    const fs::path dist_csv = dir / "distances.csv";
    save_embedding_csv(emb, m, emb_csv);
    corr.save_binary(dist_bin);
    corr.save_csv(dist_csv);
    record_stage(ctx, "embed",
                 {{"method", o.method}, {"dim", std::to_string(o.dim)}, {"metric", o.metric}},
                 inputs, {emb_csv, dist_bin, dist_csv}, timer.seconds());
    std::cout << "embed: " << o.method << " k=" << o.dim << " over " << emb.n << " cells -> "
              << emb_csv.string() << "\n";
}

// ------------------------------------------------------------ complexity --

struct ComplexityOpts {
    std::string group_by = "timestamp";
    std::size_t points = 100;
    int steps = 100;
    std::string tau = "inf";
    int max_dim = 7;
    std::string embed = "mds";
    int embed_dim = 2;
    std::string metric = "pearson";
    int nulls = 20;
    int repeats = 1;
    bool with_replacement = false;
    int landmarks = 0;
    int nu = 2;
};

void write_profiles_csv(const std::vector<ComplexityProfile>& profiles, const fs::path& path) {
    CsvWriter w;
    w.field("group").field("rep").field("dim").field("sc").field("data_count").field("null_mean");
    w.field("null_std").field("m").field("seed");
    w.end_row();
    for (const auto& p : profiles)
        for (int n = 1; n <= p.max_dim; ++n) {
            const auto dn = static_cast<std::size_t>(n);
            w.field(p.group).field(static_cast<std::int64_t>(p.rep)).field(static_cast<std::int64_t>(n));
            if (p.sc[dn].has_value())
                w.field(*p.sc[dn]);
            else
                w.field("NA");
            w.field(p.data_counts[dn]).field(p.null_mean[dn]).field(p.null_std[dn]);
            w.field(p.m).field(std::to_string(p.seed));
            w.end_row();
        }
    w.save(path);
}

void write_heatmap_json(const std::vector<ComplexityProfile>& profiles, const fs::path& path) {
    // Mean SC over repeats per (group, dim); null when every repeat is
    // undefined.
    std::vector<std::string> groups;
    std::map<std::string, std::size_t> group_ix;
    int max_dim = profiles.empty() ? 0 : profiles.front().max_dim;
    for (const auto& p : profiles)
        if (!group_ix.count(p.group)) {
            group_ix[p.group] = groups.size();
            groups.push_back(p.group);
        }
    std::vector<std::vector<double>> sums(groups.size(),
                                          std::vector<double>(static_cast<std::size_t>(max_dim), 0));
    std::vector<std::vector<int>> counts(groups.size(),
                                         std::vector<int>(static_cast<std::size_t>(max_dim), 0));
    for (const auto& p : profiles)
        for (int n = 1; n <= max_dim; ++n)
            if (p.sc[static_cast<std::size_t>(n)].has_value()) {
                sums[group_ix[p.group]][static_cast<std::size_t>(n - 1)] +=
                    *p.sc[static_cast<std::size_t>(n)];
                ++counts[group_ix[p.group]][static_cast<std::size_t>(n - 1)];
            }
    nlohmann::json j;
    j["schema"] = "sctsa.sc_heatmap/1";
    j["groups"] = groups;
    std::vector<int> dims(static_cast<std::size_t>(max_dim));
    std::iota(dims.begin(), dims.end(), 1);
    j["dims"] = dims;
    auto& rows = j["sc"] = nlohmann::json::array();
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        nlohmann::json row = nlohmann::json::array();
        for (int n = 0; n < max_dim; ++n) {
            const auto dn = static_cast<std::size_t>(n);
            if (counts[gi][dn] > 0)
                row.push_back(sums[gi][dn] / counts[gi][dn]);
            else
                row.push_back(nullptr);
        }
        rows.push_back(std::move(row));
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

void write_trajectory_csv(const std::vector<ComplexityProfile>& profiles, const fs::path& path) {
    CsvWriter w;
    w.field("group").field("rep").field("sc1").field("sc3");
    w.end_row();
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_group;
    for (const auto& p : profiles) {
        const auto& sc1 = p.max_dim >= 1 ? p.sc[1] : std::optional<double>{};
        const auto& sc3 = p.max_dim >= 3 ? p.sc[3] : std::optional<double>{};
        w.field(p.group).field(static_cast<std::int64_t>(p.rep));
        if (sc1)
            w.field(*sc1);
        else
            w.field("NA");
        if (sc3)
            w.field(*sc3);
        else
            w.field("NA");
        w.end_row();
        if (sc1) per_group[p.group].first.push_back(*sc1);
        if (sc3) per_group[p.group].second.push_back(*sc3);
    }
    for (const auto& [group, vals] : per_group) {
        auto mean = [](const std::vector<double>& v) {
            return v.empty() ? 0.0
                             : std::accumulate(v.begin(), v.end(), 0.0) /
                                   static_cast<double>(v.size());
        };
        w.field(group).field("centroid");
        if (vals.first.empty())
            w.field("NA");
        else
            w.field(mean(vals.first));
        if (vals.second.empty())
            w.field("NA");
        else
            w.field(mean(vals.second));
        w.end_row();
    }
    w.save(path);
}

void write_curves_csv(const std::vector<ComplexityProfile>& profiles,
                      const std::vector<SimplexCountCurve>& curves, const fs::path& long_path,
                      const fs::path& cumulative_path) {
    CsvWriter lw;
    lw.field("group").field("rep").field("dim").field("step").field("epsilon").field("count");
    lw.end_row();
    CsvWriter cw;
    cw.field("group").field("rep").field("dim").field("cumulative");
    cw.end_row();
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& prof = profiles[i];
        const auto& curve = curves[i];
        for (int n = 0; n <= curve.max_dim; ++n) {
            const auto dn = static_cast<std::size_t>(n);
            for (std::size_t s = 0; s < curve.grid.size(); ++s) {
                lw.field(prof.group).field(static_cast<std::int64_t>(prof.rep));
                lw.field(static_cast<std::int64_t>(n)).field(static_cast<std::int64_t>(s));
                lw.field(curve.grid[s]).field(curve.counts[dn][s]);
                lw.end_row();
            }
            cw.field(prof.group).field(static_cast<std::int64_t>(prof.rep));
            cw.field(static_cast<std::int64_t>(n)).field(curve.cumulative[dn]);
            cw.end_row();
        }
    }
    lw.save(long_path);
    cw.save(cumulative_path);
}

void cmd_complexity(const Context& ctx, const ComplexityOpts& o) {
    StageTimer timer;
    std::map<std::string, std::string> inputs;
    const ExpressionMatrix m = load_dataset(ctx, &inputs);

    GroupComplexityParams p;
    p.group_by = o.group_by == "cell_type" ? GroupBy::cell_type : GroupBy::timestamp;
    p.m_points = o.points;
    p.pipe.grid_steps = o.steps;
    p.pipe.tau = parse_tau(o.tau);
    p.pipe.max_dim = o.max_dim;
    p.pipe.embed_dim = o.embed_dim;
    p.pipe.threads = ctx.threads;
    p.pipe.landmarks = o.landmarks;
    p.pipe.nu = o.nu;
    p.embed = o.embed == "pca" ? EmbedMethod::pca : EmbedMethod::mds;
    p.metric = o.metric == "spearman" ? CorrelationKind::spearman : CorrelationKind::pearson;
    p.B = o.nulls;
    p.repeats = o.repeats;
    p.with_replacement = o.with_replacement;

    std::vector<SimplexCountCurve> curves;
    const auto profiles = complexity_by_group(m, p, ctx.seed, &curves);

    const fs::path dir = ctx.out / "complexity";
    const fs::path profiles_csv = dir / "sc_profiles.csv";
    const fs::path heatmap_json = dir / "sc_heatmap.json";
    const fs::path trajectory_csv = dir / "trajectory.csv";
    const fs::path curve_csv = dir / "counts_curve.csv";
    const fs::path cumulative_csv = dir / "counts_cumulative.csv";
    write_profiles_csv(profiles, profiles_csv);
    write_heatmap_json(profiles, heatmap_json);
    write_trajectory_csv(profiles, trajectory_csv);
    write_curves_csv(profiles, curves, curve_csv, cumulative_csv);

    record_stage(ctx, "complexity",
                 {{"group_by", o.group_by},
                  {"points", std::to_string(o.points)},
                  {"steps", std::to_string(o.steps)},
                  {"tau", tau_str(p.pipe.tau)},
                  {"max_dim", std::to_string(o.max_dim)},
                  {"embed", o.embed},
                  {"embed_dim", std::to_string(o.embed_dim)},
                  {"metric", o.metric},
                  {"nulls", std::to_string(o.nulls)},
                  {"repeats", std::to_string(o.repeats)},
                  {"with_replacement", o.with_replacement ? "true" : "false"},
                  {"landmarks", std::to_string(o.landmarks)},
                  {"nu", std::to_string(o.nu)},
                  {"seed", std::to_string(ctx.seed)}},
                 inputs, {profiles_csv, heatmap_json, trajectory_csv, curve_csv, cumulative_csv},
                 timer.seconds());
    std::cout << "complexity: " << profiles.size() << " profiles -> " << profiles_csv.string()
              << "\n";
}

// --------------------------------------------------------------- barcode --

struct BarcodeOpts {
    std::size_t points = 80;
    int homology_max_dim = 2;
    std::string tau = "inf";
    int steps = 100;
    int embed_dim = 2;
    std::string metric = "pearson";
    std::size_t budget = kDefaultSimplexBudget;
    bool keep_zero = false;
};

void cmd_barcode(const Context& ctx, const BarcodeOpts& o) {
    StageTimer timer;
    std::map<std::string, std::string> inputs;
    ExpressionMatrix m = load_dataset(ctx, &inputs);

    if (o.points > 0 && o.points < m.n_cells) {
        Rng rng(derive_seed(ctx.seed, 0xbc));
        auto picks = rng.sample_without_replacement(m.n_cells, o.points);
        std::sort(picks.begin(), picks.end());
        m = take_rows(m, picks);
    }
    const CorrelationKind kind =
        o.metric == "spearman" ? CorrelationKind::spearman : CorrelationKind::pearson;
    const SymMatrix corr = correlation_distance(m, kind, ctx.threads);
    const Embedding emb = classical_mds(corr, static_cast<std::size_t>(o.embed_dim));
    const SymMatrix ed = euclidean_distances(emb);
    const int tau = parse_tau(o.tau);

    const FilteredComplex fc =
        build_filtered_complex(ed, m.timestamps, tau, o.homology_max_dim, ed.max_value(), o.budget);
    const Barcode bc = reduce_persistence(fc, o.keep_zero);
    const auto grid = default_grid(ed, o.steps);
    const BettiCurve curve = betti_curve(bc, grid);
    const auto features = betti_features(curve);

    const fs::path dir = ctx.out / "barcode";
    const fs::path barcode_csv = dir / "barcode.csv";
    const fs::path intervals_json = dir / "intervals.json";
    const fs::path betti_csv = dir / "betti_curve.csv";
    const fs::path features_csv = dir / "betti_features.csv";
    save_barcode_csv(bc, barcode_csv);
    save_barcode_json(bc, intervals_json);
    save_betti_curve_csv(curve, betti_csv);
    {
        CsvWriter w;
        w.field("dim").field("integral").field("peak").field("final");
        w.end_row();
        for (std::size_t k = 0; k < features.size(); ++k) {
            w.field(static_cast<std::int64_t>(k)).field(features[k].integral);
            w.field(features[k].peak).field(features[k].final_value);
            w.end_row();
        }
        w.save(features_csv);
    }
    record_stage(ctx, "barcode",
                 {{"points", std::to_string(o.points)},
                  {"homology_max_dim", std::to_string(o.homology_max_dim)},
                  {"tau", tau_str(tau)},
                  {"steps", std::to_string(o.steps)},
                  {"embed_dim", std::to_string(o.embed_dim)},
                  {"metric", o.metric},
                  {"budget", std::to_string(o.budget)},
                  {"keep_zero", o.keep_zero ? "true" : "false"},
                  {"seed", std::to_string(ctx.seed)}},
                 inputs, {barcode_csv, intervals_json, betti_csv, features_csv}, timer.seconds());
    std::cout << "barcode: " << bc.intervals.size() << " intervals (" << fc.simplices.size()
              << " simplices) -> " << barcode_csv.string() << "\n";
}

// ---------------------------------------------------------------- mapper --

struct MapperOpts {
    int intervals = 10;
    double overlap = 0.5;
    std::string tau = "inf";
    std::string lens = "mds";
    int lens_dim = 2;
    std::string metric = "pearson";
    std::string metric_source = "embedding";  // or "correlation"
    int bins = 10;
    double fixed_cut = -1.0;  // >= 0 selects the fixed-threshold cut
    std::size_t points = 0;   // 0 = all cells
};

void cmd_mapper(const Context& ctx, const MapperOpts& o) {
    StageTimer timer;
    std::map<std::string, std::string> inputs;
    ExpressionMatrix m = load_dataset(ctx, &inputs);
    if (o.points > 0 && o.points < m.n_cells) {
        Rng rng(derive_seed(ctx.seed, 0x3a9));
        auto picks = rng.sample_without_replacement(m.n_cells, o.points);
        std::sort(picks.begin(), picks.end());
        m = take_rows(m, picks);
    }
    const CorrelationKind kind =
        o.metric == "spearman" ? CorrelationKind::spearman : CorrelationKind::pearson;
    const SymMatrix corr = correlation_distance(m, kind, ctx.threads);
    Embedding lens;
    if (o.lens == "pca")
        lens = pca(m, static_cast<std::size_t>(o.lens_dim));
    else
        lens = classical_mds(corr, static_cast<std::size_t>(o.lens_dim));

    MapperParams p;
    p.intervals = o.intervals;
    p.overlap = o.overlap;
    p.tau = parse_tau(o.tau);
    p.cluster.histogram_bins = o.bins;
    if (o.fixed_cut >= 0.0) {
        p.cluster.cut = ClusterCut::fixed;
        p.cluster.fixed_threshold = o.fixed_cut;
    }
    const SymMatrix cluster_d =
        o.metric_source == "correlation" ? corr : euclidean_distances(lens);
    MapperGraph g = build_mapper(lens, cluster_d, m.timestamps, p);
    layout_graph(g, derive_seed(ctx.seed, 0x6d70));

    const fs::path dir = ctx.out / "mapper";
    const fs::path json_path = dir / "mapper.json";
    const fs::path dot_path = dir / "mapper.dot";
    const fs::path nodes_path = dir / "nodes.csv";
    const fs::path edges_path = dir / "edges.csv";
    save_mapper_json(g, json_path);
    save_mapper_dot(g, dot_path);
    save_mapper_csv(g, nodes_path, edges_path);
    record_stage(ctx, "mapper",
                 {{"intervals", std::to_string(o.intervals)},
                  {"overlap", format_double(o.overlap)},
                  {"tau", tau_str(p.tau)},
                  {"lens", o.lens},
                  {"lens_dim", std::to_string(o.lens_dim)},
                  {"metric", o.metric},
                  {"metric_source", o.metric_source},
                  {"bins", std::to_string(o.bins)},
                  {"points", std::to_string(o.points)},
                  {"seed", std::to_string(ctx.seed)}},
                 inputs, {json_path, dot_path, nodes_path, edges_path}, timer.seconds());
    std::cout << "mapper: " << g.nodes.size() << " nodes, " << g.edges.size() << " edges -> "
              << json_path.string() << "\n";
}

// --------------------------------------------------------------- lineage --

struct LineageOpts {
    std::string features = "sc";  // or "betti"
    std::size_t points = 50;
    std::string linkage = "average";
    std::string metric = "euclidean";
    bool no_standardize = false;
    int nulls = 20;
    int steps = 100;
    int max_dim = 7;
    int homology_max_dim = 2;
    int embed_dim = 2;
    std::string tau = "inf";
    std::size_t budget = kDefaultSimplexBudget;
};

void cmd_lineage(const Context& ctx, const LineageOpts& o) {
    StageTimer timer;
    std::map<std::string, std::string> inputs;
    const ExpressionMatrix m = load_dataset(ctx, &inputs);
    const int tau = parse_tau(o.tau);

    FeatureTable table;
    if (o.features == "betti") {
        const auto groups = group_rows(m, GroupBy::cell_type);
        std::vector<std::string> labels;
        std::vector<std::vector<BettiFeatureRow>> rows;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            const auto& grp = groups[gi];
            if (grp.members.size() < o.points)
                throw data_error("group '" + grp.label + "' has " +
                                 std::to_string(grp.members.size()) + " members, fewer than " +
                                 std::to_string(o.points) + " requested");
            Rng rng(derive_seed(derive_seed(ctx.seed, gi), 0));
            auto picks = rng.sample_without_replacement(grp.members.size(), o.points);
            std::vector<std::uint32_t> local;
            local.reserve(picks.size());
            for (const auto p : picks) local.push_back(grp.members[p]);
            std::sort(local.begin(), local.end());
            const ExpressionMatrix sample = take_rows(m, local);
            const SymMatrix corr = correlation_distance(sample, CorrelationKind::pearson,
                                                        ctx.threads);
            const Embedding emb = classical_mds(corr, static_cast<std::size_t>(o.embed_dim));
            const SymMatrix ed = euclidean_distances(emb);
            const FilteredComplex fc = build_filtered_complex(
                ed, sample.timestamps, tau, o.homology_max_dim, ed.max_value(), o.budget);
            const Barcode bc = reduce_persistence(fc);
            const BettiCurve curve = betti_curve(bc, default_grid(ed, o.steps));
            labels.push_back(grp.label);
            rows.push_back(betti_features(curve));
        }
        table = build_feature_table_betti(labels, rows, !o.no_standardize);
    } else {
        GroupComplexityParams p;
        p.group_by = GroupBy::cell_type;
        p.m_points = o.points;
        p.pipe.grid_steps = o.steps;
        p.pipe.tau = tau;
        p.pipe.max_dim = o.max_dim;
        p.pipe.embed_dim = o.embed_dim;
        p.pipe.threads = ctx.threads;
        p.B = o.nulls;
        const auto profiles = complexity_by_group(m, p, ctx.seed);
        table = build_feature_table(profiles, !o.no_standardize);
    }

    const Linkage linkage = o.linkage == "single"     ? Linkage::single
                            : o.linkage == "complete" ? Linkage::complete
                                                      : Linkage::average;
    const FeatureMetric metric =
        o.metric == "correlation" ? FeatureMetric::correlation : FeatureMetric::euclidean;
    const Dendrogram dendro = hierarchical_cluster(table, linkage, metric);

    const fs::path dir = ctx.out / "lineage";
    const fs::path newick = dir / "dendrogram.newick";
    const fs::path merges = dir / "merges.csv";
    const fs::path heatmap = dir / "heatmap.json";
    const fs::path features_csv = dir / "features.csv";
    save_dendrogram(dendro, newick, merges);
    save_heatmap_json(table, dendro, heatmap);
    {
        CsvWriter w;
        w.field("group");
        for (const auto& c : table.col_names) w.field(c);
        w.end_row();
        for (std::size_t r = 0; r < table.rows(); ++r) {
            w.field(table.row_labels[r]);
            for (std::size_t c = 0; c < table.cols(); ++c) {
                if (table.is_defined(r, c))
                    w.field(table.at(r, c));
                else
                    w.field("NA");
            }
            w.end_row();
        }
        w.save(features_csv);
    }
    record_stage(ctx, "lineage",
                 {{"features", o.features},
                  {"points", std::to_string(o.points)},
                  {"linkage", o.linkage},
                  {"metric", o.metric},
                  {"standardize", o.no_standardize ? "false" : "true"},
                  {"tau", tau_str(tau)},
                  {"seed", std::to_string(ctx.seed)}},
                 inputs, {newick, merges, heatmap, features_csv}, timer.seconds());
    std::cout << "lineage: " << table.rows() << " groups, " << dendro.merges.size()
              << " merges -> " << newick.string() << "\n";
}

// ---------------------------------------------------------------- report --

void cmd_report(const Context& ctx) {
    StageTimer timer;
    const RunManifest manifest = RunManifest::load_or_empty(ctx.out);
    static const char* kStages[] = {"synth",   "ingest", "embed",  "complexity",
                                    "barcode", "mapper", "lineage"};
    std::vector<std::string> present, missing;
    for (const char* s : kStages) {
        if (manifest.stages.count(s))
            present.push_back(s);
        else
            missing.push_back(s);
    }
    if (present.empty()) {
        std::string msg = "no completed stages in " + ctx.out.string() + "; missing:";
        for (const auto& s : missing) msg += " " + s;
        throw data_error(msg);
    }

    nlohmann::json j;
    j["schema"] = "sctsa.report/1";
    j["tool"] = manifest.tool;
    j["stages_present"] = present;
    j["stages_missing"] = missing;
    std::string text = "run report: " + ctx.out.string() + "\n";

    // Verify artifact digests against the manifest.
    bool digests_ok = true;
    std::vector<std::string> stale;
    for (const auto& [stage, st] : manifest.stages)
        for (const auto& [rel, digest] : st.outputs) {
            const fs::path p = ctx.out / rel;
            if (!fs::exists(p) || digest_hex(digest_file(p.string())) != digest) {
                digests_ok = false;
                stale.push_back(rel);
            }
        }
    j["digests_ok"] = digests_ok;
    if (!stale.empty()) j["stale_artifacts"] = stale;
    text += "artifact digests: " + std::string(digests_ok ? "ok" : "STALE") + "\n";

    if (manifest.stages.count("complexity")) {
        const auto rows = read_csv_file(ctx.out / "complexity" / "sc_profiles.csv");
        std::map<std::string, std::map<int, std::pair<double, int>>> table;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() < 4 || row[3] == "NA") continue;
            table[row[0]][std::stoi(row[2])].first += std::stod(row[3]);
            table[row[0]][std::stoi(row[2])].second += 1;
        }
        auto& sc = j["complexity"]["sc_mean"] = nlohmann::json::object();
        text += "complexity: " + std::to_string(table.size()) + " groups\n";
        for (const auto& [group, dims] : table) {
            auto& g = sc[group] = nlohmann::json::object();
            for (const auto& [dim, acc] : dims)
                g[std::to_string(dim)] = acc.first / acc.second;
        }
    }
    if (manifest.stages.count("barcode")) {
        const auto rows = read_csv_file(ctx.out / "barcode" / "barcode.csv");
        std::map<int, int> per_dim;
        std::map<int, double> max_persistence;
        int infinite = 0;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const int dim = std::stoi(rows[r][0]);
            ++per_dim[dim];
            if (rows[r][2] == "inf") {
                ++infinite;
            } else {
                const double pers = std::stod(rows[r][2]) - std::stod(rows[r][1]);
                max_persistence[dim] = std::max(max_persistence[dim], pers);
            }
        }
        auto& b = j["barcode"];
        b["infinite_bars"] = infinite;
        for (const auto& [dim, count] : per_dim)
            b["intervals_per_dim"][std::to_string(dim)] = count;
        for (const auto& [dim, pers] : max_persistence)
            b["max_persistence_per_dim"][std::to_string(dim)] = pers;
        text += "barcode: " + std::to_string(infinite) + " infinite bars\n";
    }
    if (manifest.stages.count("mapper")) {
        const auto nodes = read_csv_file(ctx.out / "mapper" / "nodes.csv");
        const auto edges = read_csv_file(ctx.out / "mapper" / "edges.csv");
        const std::size_t n = nodes.size() - 1;
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0u);
        std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t r = 1; r < edges.size(); ++r) {
            const auto a = static_cast<std::size_t>(std::stoul(edges[r][0]));
            const auto b = static_cast<std::size_t>(std::stoul(edges[r][1]));
            parent[find(a)] = find(b);
        }
        std::set<std::size_t> roots;
        int max_span = 0;
        for (std::size_t i = 0; i < n; ++i) roots.insert(find(i));
        for (std::size_t r = 1; r < nodes.size(); ++r)
            max_span = std::max(max_span, std::stoi(nodes[r][4]) - std::stoi(nodes[r][3]));
        auto& mj = j["mapper"];
        mj["nodes"] = n;
        mj["edges"] = edges.size() - 1;
        mj["components"] = roots.size();
        mj["max_node_time_span"] = max_span;
        text += "mapper: " + std::to_string(n) + " nodes, " + std::to_string(edges.size() - 1) +
                " edges, " + std::to_string(roots.size()) + " components\n";
    }
    if (manifest.stages.count("lineage")) {
        const auto merges = read_csv_file(ctx.out / "lineage" / "merges.csv");
        j["lineage"]["merges"] = merges.size() - 1;
        text += "lineage: " + std::to_string(merges.size() - 1) + " merges\n";
    }
    if (!missing.empty()) {
        text += "missing stages:";
        for (const auto& s : missing) text += " " + s;
        text += "\n";
    }

    const fs::path dir = ctx.out / "report";
    const fs::path json_path = dir / "report.json";
    const fs::path text_path = dir / "report.txt";
    write_file_atomic(json_path, j.dump(2) + "\n");
    write_file_atomic(text_path, text);
    record_stage(ctx, "report", {}, {}, {json_path, text_path}, timer.seconds());
    std::cout << text;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"topological simplicial analysis for timestamped point clouds"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "key=value config file; sections name subcommands");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    Context ctx;
    ctx.out = default_out();
    app.add_option("--out", ctx.out, "output directory for staged artifacts");
    app.add_option("--seed", ctx.seed, "master random seed");
    app.add_option("--threads", ctx.threads, "worker cap (0 = hardware)");
    app.add_option("--input", ctx.input, "dataset CSV/TSV (overrides staged artifacts)");
    app.add_option("--id-col", ctx.schema.id_column, "cell id column name");
    app.add_option("--time-col", ctx.schema.time_column, "timestamp column name");
    app.add_option("--type-col", ctx.schema.type_column, "cell type column name");
    std::string delimiter;
    app.add_option("--delimiter", delimiter, "field delimiter (default: by extension)");

    SynthOpts synth_o;
    auto* synth = app.add_subcommand("synth", "generate the bundled synthetic dataset");
    synth->add_option("--groups", synth_o.p.groups, "number of time points");
    synth->add_option("--cells-per-group", synth_o.p.cells_per_group, "cells per time point");
    synth->add_option("--genes", synth_o.p.genes, "gene count");
    synth->add_option("--branch-group", synth_o.p.branch_group, "first branched time index");
    synth->add_option("--core-noise", synth_o.p.core_noise, "post-branch core noise");
    synth->add_option("--blob-noise", synth_o.p.blob_noise, "pre-branch blob noise");
    synth->add_option("--halo-fraction", synth_o.p.halo_fraction, "halo cell fraction");
    synth->add_option("--halo-noise", synth_o.p.halo_noise, "halo noise");
    synth->add_option("--branch-corr", synth_o.p.branch_corr, "branch signature correlation");
    synth->add_option("--drift", synth_o.p.drift, "consecutive-group signature drift");

    auto* ingest = app.add_subcommand("ingest", "validate and persist an expression table");

    EmbedOpts embed_o;
    auto* embed = app.add_subcommand("embed", "embed cells and persist distances");
    embed->add_option("--method", embed_o.method, "mds or pca")
        ->check(CLI::IsMember({"mds", "pca"}));
    embed->add_option("--dim", embed_o.dim, "embedding dimension");
    embed->add_option("--metric", embed_o.metric, "pearson or spearman")
        ->check(CLI::IsMember({"pearson", "spearman"}));

    ComplexityOpts cx_o;
    auto* cx = app.add_subcommand("complexity", "normalized simplicial complexity per group");
    cx->add_option("--group-by", cx_o.group_by, "timestamp or cell_type")
        ->check(CLI::IsMember({"timestamp", "cell_type"}));
    cx->add_option("--points", cx_o.points, "bootstrap sample size per group");
    cx->add_option("--steps", cx_o.steps, "filtration grid size");
    cx->add_option("--tau", cx_o.tau, "time delay limit (integer or 'inf')");
    cx->add_option("--max-dim", cx_o.max_dim, "maximum simplex dimension");
    cx->add_option("--embed", cx_o.embed, "mds or pca")->check(CLI::IsMember({"mds", "pca"}));
    cx->add_option("--embed-dim", cx_o.embed_dim, "embedding dimension");
    cx->add_option("--metric", cx_o.metric, "pearson or spearman")
        ->check(CLI::IsMember({"pearson", "spearman"}));
    cx->add_option("--nulls", cx_o.nulls, "null replicates B");
    cx->add_option("--repeats", cx_o.repeats, "bootstrap repetitions per group");
    cx->add_flag("--with-replacement", cx_o.with_replacement, "sample with replacement");
    cx->add_option("--landmarks", cx_o.landmarks, "lazy witness landmarks (0 = full Rips)");
    cx->add_option("--nu", cx_o.nu, "witness nearest-neighbor inclusion");

    BarcodeOpts bc_o;
    auto* bc = app.add_subcommand("barcode", "persistence barcode of an embedded sample");
    bc->add_option("--points", bc_o.points, "sample size (0 = all cells)");
    bc->add_option("--homology-max-dim", bc_o.homology_max_dim, "top homology dimension");
    bc->add_option("--tau", bc_o.tau, "time delay limit (integer or 'inf')");
    bc->add_option("--steps", bc_o.steps, "betti curve grid size");
    bc->add_option("--embed-dim", bc_o.embed_dim, "embedding dimension");
    bc->add_option("--metric", bc_o.metric, "pearson or spearman")
        ->check(CLI::IsMember({"pearson", "spearman"}));
    bc->add_option("--budget", bc_o.budget, "simplex budget");
    bc->add_flag("--keep-zero", bc_o.keep_zero, "keep zero-persistence intervals");

    MapperOpts mp_o;
    auto* mp = app.add_subcommand("mapper", "temporal mapper graph");
    mp->add_option("--intervals", mp_o.intervals, "cover intervals per lens dimension");
    mp->add_option("--overlap", mp_o.overlap, "cover overlap fraction in (0,1)");
    mp->add_option("--tau", mp_o.tau, "time delay limit (integer or 'inf')");
    mp->add_option("--lens", mp_o.lens, "mds or pca")->check(CLI::IsMember({"mds", "pca"}));
    mp->add_option("--lens-dim", mp_o.lens_dim, "lens dimension");
    mp->add_option("--metric", mp_o.metric, "pearson or spearman")
        ->check(CLI::IsMember({"pearson", "spearman"}));
    mp->add_option("--metric-source", mp_o.metric_source, "embedding or correlation")
        ->check(CLI::IsMember({"embedding", "correlation"}));
    mp->add_option("--bins", mp_o.bins, "histogram bins for the cluster cut");
    mp->add_option("--fixed-cut", mp_o.fixed_cut, "fixed cluster cut (overrides histogram)");
    mp->add_option("--points", mp_o.points, "sample size (0 = all cells)");

    LineageOpts ln_o;
    auto* ln = app.add_subcommand("lineage", "hierarchical clustering of cell types");
    ln->add_option("--features", ln_o.features, "sc or betti")
        ->check(CLI::IsMember({"sc", "betti"}));
    ln->add_option("--points", ln_o.points, "cells sampled per type");
    ln->add_option("--linkage", ln_o.linkage, "single, average or complete")
        ->check(CLI::IsMember({"single", "average", "complete"}));
    ln->add_option("--metric", ln_o.metric, "euclidean or correlation")
        ->check(CLI::IsMember({"euclidean", "correlation"}));
    ln->add_flag("--no-standardize", ln_o.no_standardize, "skip per-column z-scoring");
    ln->add_option("--nulls", ln_o.nulls, "null replicates for SC features");
    ln->add_option("--steps", ln_o.steps, "filtration grid size");
    ln->add_option("--max-dim", ln_o.max_dim, "maximum simplex dimension for SC features");
    ln->add_option("--homology-max-dim", ln_o.homology_max_dim, "top dimension for betti features");
    ln->add_option("--tau", ln_o.tau, "time delay limit (integer or 'inf')");

    auto* report = app.add_subcommand("report", "consolidated run summary");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (!delimiter.empty()) ctx.schema.delimiter = delimiter == "tab" ? '\t' : delimiter[0];

    try {
        if (synth->parsed()) cmd_synth(ctx, synth_o);
        if (ingest->parsed()) cmd_ingest(ctx);
        if (embed->parsed()) cmd_embed(ctx, embed_o);
        if (cx->parsed()) cmd_complexity(ctx, cx_o);
        if (bc->parsed()) cmd_barcode(ctx, bc_o);
        if (mp->parsed()) cmd_mapper(ctx, mp_o);
        if (ln->parsed()) cmd_lineage(ctx, ln_o);
        if (report->parsed()) cmd_report(ctx);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("sctsa");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sctsa::cli
