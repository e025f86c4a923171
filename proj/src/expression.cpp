#include "sctsa/expression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "sctsa/csv.hpp"
#include "sctsa/errors.hpp"
#include "sctsa/parallel.hpp"
#include "sctsa/rng.hpp"

namespace sctsa {

std::vector<int> ExpressionMatrix::distinct_timestamps() const {
    std::set<int> s(timestamps.begin(), timestamps.end());
    return std::vector<int>(s.begin(), s.end());
}

void ExpressionMatrix::validate() const {
    if (values.size() != n_cells * n_genes) throw data_error("expression value buffer size mismatch");
    if (cell_ids.size() != n_cells || timestamps.size() != n_cells || cell_types.size() != n_cells)
        throw data_error("expression metadata length does not match cell count");
    if (gene_names.size() != n_genes) throw data_error("gene name count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw data_error("expression value at cell " + std::to_string(i / n_genes) +
                             ", gene " + std::to_string(i % n_genes) +
                             " is not finite and non-negative");
}

std::vector<Group> group_rows(const ExpressionMatrix& m, GroupBy by) {
    std::vector<Group> out;
    if (by == GroupBy::timestamp) {
        std::map<int, std::vector<std::uint32_t>> g;
        for (std::size_t i = 0; i < m.n_cells; ++i)
            g[m.timestamps[i]].push_back(static_cast<std::uint32_t>(i));
        for (auto& [t, members] : g) out.push_back({std::to_string(t), std::move(members)});
    } else {
        std::map<std::string, std::vector<std::uint32_t>> g;
        for (std::size_t i = 0; i < m.n_cells; ++i)
            g[m.cell_types[i]].push_back(static_cast<std::uint32_t>(i));
        for (auto& [t, members] : g) out.push_back({t, std::move(members)});
    }
    return out;
}

namespace {

char infer_delimiter(const std::filesystem::path& path) {
    return path.extension() == ".tsv" ? '\t' : ',';
}

double parse_expression_value(const std::string& s, std::size_t row, const std::string& col) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw data_error("non-numeric expression value '" + s + "' at row " +
                         std::to_string(row) + ", column '" + col + "'");
    if (v < 0.0)
        throw data_error("negative expression value " + s + " at row " + std::to_string(row) +
                         ", column '" + col + "'");
    return v;
}

}  // namespace

ExpressionMatrix load_expression(const std::filesystem::path& path, const LoadSchema& schema) {
    const char delim = schema.delimiter ? schema.delimiter : infer_delimiter(path);
    const auto rows = read_csv_file(path, delim);
    if (rows.empty()) throw data_error("empty expression file: " + path.string());

    const auto& header = rows[0];
    auto find_col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw data_error("required column '" + name + "' not found in " + path.string());
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t id_col = find_col(schema.id_column);
    const std::size_t time_col = find_col(schema.time_column);
    const std::size_t type_col = find_col(schema.type_column);

    ExpressionMatrix m;
    std::vector<std::size_t> gene_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == id_col || c == time_col || c == type_col) continue;
        gene_cols.push_back(c);
        m.gene_names.push_back(header[c]);
    }
    m.n_genes = gene_cols.size();
    m.n_cells = rows.size() - 1;
    m.values.reserve(m.n_cells * m.n_genes);

    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(m.n_cells);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw data_error("row " + std::to_string(r + 1) + " has " +
                             std::to_string(row.size()) + " fields, expected " +
                             std::to_string(header.size()));
        const std::string& id = row[id_col];
        if (!seen_ids.insert(id).second)
            throw data_error("duplicate cell id '" + id + "' at row " + std::to_string(r + 1));
        m.cell_ids.push_back(id);

        int t = 0;
        const std::string& ts = row[time_col];
        const auto tres = std::from_chars(ts.data(), ts.data() + ts.size(), t);
        if (tres.ec != std::errc() || tres.ptr != ts.data() + ts.size())
            throw data_error("timestamp '" + ts + "' at row " + std::to_string(r + 1) +
                             " is not an integer time-point index");
        m.timestamps.push_back(t);
        m.cell_types.push_back(row[type_col]);

        for (std::size_t g = 0; g < gene_cols.size(); ++g)
            m.values.push_back(parse_expression_value(row[gene_cols[g]], r + 1, m.gene_names[g]));
    }
    return m;
}

void save_expression_csv(const ExpressionMatrix& m, const std::filesystem::path& path) {
    CsvWriter w;
    w.field("cell_id").field("timestamp").field("cell_type");
    for (const auto& g : m.gene_names) w.field(g);
    w.end_row();
    for (std::size_t i = 0; i < m.n_cells; ++i) {
        w.field(m.cell_ids[i]).field(static_cast<std::int64_t>(m.timestamps[i])).field(m.cell_types[i]);
        for (std::size_t g = 0; g < m.n_genes; ++g) w.field(m.at(i, g));
        w.end_row();
    }
    w.save(path);
}

namespace {

// Average ranks with ties, the usual Spearman preprocessing.
std::vector<double> rank_row(std::span<const double> row) {
    const std::size_t n = row.size();
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return row[a] < row[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && row[order[j + 1]] == row[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

SymMatrix correlation_distance(const ExpressionMatrix& m, CorrelationKind kind, int threads) {
    const std::size_t n = m.n_cells;
    const std::size_t g = m.n_genes;
    if (g < 2) throw data_error("correlation distance requires at least 2 genes");

    // Centered rows and norms, with a fixed per-row summation order so the
    // result is independent of the parallel schedule.
    std::vector<double> centered(n * g);
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        std::vector<double> work;
        const double* src = row.data();
        if (kind == CorrelationKind::spearman) {
            work = rank_row(row);
            src = work.data();
        }
        double mean = 0.0;
        for (std::size_t k = 0; k < g; ++k) mean += src[k];
        mean /= static_cast<double>(g);
        double ss = 0.0;
        for (std::size_t k = 0; k < g; ++k) {
            const double c = src[k] - mean;
            centered[i * g + k] = c;
            ss += c * c;
        }
        if (ss <= 0.0)
            throw data_error("cell '" + m.cell_ids[i] +
                             "' has zero expression variance; correlation is undefined");
        norms[i] = std::sqrt(ss);
    }

    SymMatrix d(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const double* ci = centered.data() + i * g;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* cj = centered.data() + j * g;
            double dot = 0.0;
            for (std::size_t k = 0; k < g; ++k) dot += ci[k] * cj[k];
            const double r = dot / (norms[i] * norms[j]);
            d.set(i, j, std::clamp(1.0 - r, 0.0, 2.0));
        }
    });
    return d;
}

ExpressionMatrix take_rows(const ExpressionMatrix& m, const std::vector<std::uint32_t>& rows) {
    ExpressionMatrix out;
    out.n_cells = rows.size();
    out.n_genes = m.n_genes;
    out.gene_names = m.gene_names;
    out.values.reserve(rows.size() * m.n_genes);
    for (const auto r : rows) {
        out.cell_ids.push_back(m.cell_ids[r]);
        out.timestamps.push_back(m.timestamps[r]);
        out.cell_types.push_back(m.cell_types[r]);
        const auto row = m.row(r);
        out.values.insert(out.values.end(), row.begin(), row.end());
    }
    return out;
}

ExpressionMatrix bootstrap_sample(const ExpressionMatrix& m, GroupBy by, std::size_t m_points,
                                  std::uint64_t seed, bool with_replacement) {
    if (m_points == 0) throw config_error("bootstrap sample size must be positive");
    const auto groups = group_rows(m, by);
    std::vector<std::uint32_t> chosen;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& grp = groups[gi];
        if (!with_replacement && grp.members.size() < m_points)
            throw data_error("group '" + grp.label + "' has " +
                             std::to_string(grp.members.size()) + " members, fewer than " +
                             std::to_string(m_points) + " requested");
        Rng rng(derive_seed(seed, gi));
        std::vector<std::uint32_t> local;
        if (with_replacement) {
            local.reserve(m_points);
            for (std::size_t k = 0; k < m_points; ++k)
                local.push_back(grp.members[rng.below(grp.members.size())]);
        } else {
            const auto picks = rng.sample_without_replacement(grp.members.size(), m_points);
            local.reserve(m_points);
            for (const auto p : picks) local.push_back(grp.members[p]);
        }
        std::sort(local.begin(), local.end());
        chosen.insert(chosen.end(), local.begin(), local.end());
    }
    return take_rows(m, chosen);
}

}  // namespace sctsa
