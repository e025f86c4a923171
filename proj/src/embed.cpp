#include "sctsa/embed.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>

#include "sctsa/csv.hpp"
#include "sctsa/digest.hpp"
#include "sctsa/errors.hpp"

namespace sctsa {

namespace {

// Deterministic sign convention: make the largest-magnitude entry of each
// column positive (first such entry wins on ties).
void fix_column_signs(std::vector<double>& coords, std::size_t n, std::size_t k) {
    for (std::size_t c = 0; c < k; ++c) {
        double best = 0.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::fabs(coords[i * k + c]);
            if (a > best) {
                best = a;
                best_i = i;
            }
        }
        if (coords[best_i * k + c] < 0.0)
            for (std::size_t i = 0; i < n; ++i) coords[i * k + c] = -coords[i * k + c];
    }
}

}  // namespace

Embedding classical_mds(const SymMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (n == 0) throw data_error("classical_mds: empty distance matrix");
    if (k == 0 || k > n - 1)
        throw config_error("classical_mds: target dimension " + std::to_string(k) +
                           " must be in [1, N-1] with N=" + std::to_string(n));

    Eigen::MatrixXd sq(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        sq(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = d(i, j) * d(i, j);
            sq(i, j) = v;
            sq(j, i) = v;
        }
    }
    const Eigen::VectorXd row_mean = sq.rowwise().mean();
    const double grand_mean = row_mean.mean();
    Eigen::MatrixXd b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) throw data_error("classical_mds: eigendecomposition failed");

    Embedding e;
    e.n = n;
    e.k = k;
    e.method = EmbedMethod::mds;
    e.source_hash = digest_bytes(d.condensed().data(), d.condensed().size() * sizeof(double));
    e.coords.assign(n * k, 0.0);
    e.spectrum.resize(k);
    // SelfAdjointEigenSolver sorts ascending; take from the top.
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = static_cast<Eigen::Index>(n - 1 - c);
        const double lambda = es.eigenvalues()(src);
        e.spectrum[c] = std::max(lambda, 0.0);
        const double scale = std::sqrt(e.spectrum[c]);
        for (std::size_t i = 0; i < n; ++i)
            e.coords[i * k + c] = scale * es.eigenvectors()(static_cast<Eigen::Index>(i), src);
    }
    fix_column_signs(e.coords, n, k);
    return e;
}

Embedding pca_rows(const std::vector<double>& values, std::size_t n, std::size_t g,
                   std::size_t k, std::uint64_t source_hash) {
    if (n == 0 || g == 0) throw data_error("pca: empty input");
    if (k == 0 || k > std::min(n, g))
        throw config_error("pca: target dimension " + std::to_string(k) +
                           " must be in [1, min(N, G)] with N=" + std::to_string(n) +
                           ", G=" + std::to_string(g));

    Eigen::MatrixXd x(n, g);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < g; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * g + j];
    x.rowwise() -= x.colwise().mean();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();

    Embedding e;
    e.n = n;
    e.k = k;
    e.method = EmbedMethod::pca;
    e.source_hash = source_hash;
    e.coords.assign(n * k, 0.0);
    e.spectrum.resize(k);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        e.spectrum[c] = s(ci) * s(ci) / denom;
        for (std::size_t i = 0; i < n; ++i)
            e.coords[i * k + c] = svd.matrixU()(static_cast<Eigen::Index>(i), ci) * s(ci);
    }
    fix_column_signs(e.coords, n, k);
    return e;
}

Embedding pca(const ExpressionMatrix& m, std::size_t k) {
    const std::uint64_t h =
        digest_bytes(m.values.data(), m.values.size() * sizeof(double));
    return pca_rows(m.values, m.n_cells, m.n_genes, k, h);
}

SymMatrix euclidean_distances_rows(const std::vector<double>& coords, std::size_t n,
                                   std::size_t k) {
    SymMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = coords.data() + i * k;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* b = coords.data() + j * k;
            double ss = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double diff = a[c] - b[c];
                ss += diff * diff;
            }
            d.set(i, j, std::sqrt(ss));
        }
    }
    return d;
}

SymMatrix euclidean_distances(const Embedding& e) {
    return euclidean_distances_rows(e.coords, e.n, e.k);
}

void save_embedding_csv(const Embedding& e, const ExpressionMatrix& meta,
                        const std::filesystem::path& path) {
    CsvWriter w;
    w.field("cell_id").field("t").field("type");
    for (std::size_t c = 0; c < e.k; ++c) w.field("x" + std::to_string(c + 1));
    w.end_row();
    for (std::size_t i = 0; i < e.n; ++i) {
        w.field(meta.cell_ids[i])
            .field(static_cast<std::int64_t>(meta.timestamps[i]))
            .field(meta.cell_types[i]);
        for (std::size_t c = 0; c < e.k; ++c) w.field(e.at(i, c));
        w.end_row();
    }
    w.save(path);
}

Embedding load_embedding_csv(const std::filesystem::path& path, std::vector<std::string>* ids,
                             std::vector<int>* timestamps, std::vector<std::string>* types) {
    const auto rows = read_csv_file(path);
    if (rows.size() < 2 || rows[0].size() < 4)
        throw data_error("embedding CSV is empty or malformed: " + path.string());
    Embedding e;
    e.n = rows.size() - 1;
    e.k = rows[0].size() - 3;
    e.coords.reserve(e.n * e.k);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != rows[0].size())
            throw data_error("embedding CSV row " + std::to_string(r + 1) + " is ragged");
        if (ids) ids->push_back(row[0]);
        if (timestamps) {
            int t = 0;
            const auto res = std::from_chars(row[1].data(), row[1].data() + row[1].size(), t);
            if (res.ec != std::errc())
                throw data_error("bad timestamp in embedding CSV row " + std::to_string(r + 1));
            timestamps->push_back(t);
        }
        if (types) types->push_back(row[2]);
        for (std::size_t c = 3; c < row.size(); ++c) {
            double v = 0.0;
            const auto res = std::from_chars(row[c].data(), row[c].data() + row[c].size(), v);
            if (res.ec != std::errc() || res.ptr != row[c].data() + row[c].size())
                throw data_error("bad coordinate in embedding CSV row " + std::to_string(r + 1));
            e.coords.push_back(v);
        }
    }
    return e;
}

}  // namespace sctsa
