#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sctsa/embed.hpp"
#include "sctsa/errors.hpp"
#include "sctsa/rng.hpp"

using namespace sctsa;

namespace {

ExpressionMatrix wrap_rows(const std::vector<double>& values, std::size_t n, std::size_t g) {
    ExpressionMatrix m;
    m.n_cells = n;
    m.n_genes = g;
    m.values = values;
    for (std::size_t i = 0; i < n; ++i) {
        m.cell_ids.push_back("c" + std::to_string(i));
        m.timestamps.push_back(0);
        m.cell_types.push_back("t");
    }
    for (std::size_t j = 0; j < g; ++j) m.gene_names.push_back("g" + std::to_string(j));
    return m;
}

}  // namespace

TEST_CASE("mds recovers the equilateral triangle") {
    SymMatrix d(3);
    d.set(0, 1, 1.0);
    d.set(0, 2, 1.0);
    d.set(1, 2, 1.0);
    const auto e = classical_mds(d, 2);
    const auto rec = euclidean_distances(e);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            CHECK(rec(i, j) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mds reproduces collinear distances exactly in one dimension") {
    const std::size_t n = 7;
    SymMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, static_cast<double>(j - i));
    const auto e = classical_mds(d, 1);
    const auto rec = euclidean_distances(e);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            CHECK(rec(i, j) == doctest::Approx(d(i, j)).epsilon(1e-9));
}

TEST_CASE("mds on a euclidean matrix matches the source cloud up to rotation") {
    Rng rng(4);
    const std::size_t n = 10, k = 2;
    std::vector<double> cloud(n * k);
    for (auto& v : cloud) v = rng.uniform() * 5.0;
    const SymMatrix d = euclidean_distances_rows(cloud, n, k);
    const auto e = classical_mds(d, k);
    CHECK(oracle::procrustes_residual(cloud, e.coords, n, k) < 1e-8);
}

TEST_CASE("mds is deterministic and sign-fixed") {
    Rng rng(12);
    const std::size_t n = 9;
    SymMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, 0.5 + rng.uniform());
    const auto a = classical_mds(d, 3);
    const auto b = classical_mds(d, 3);
    CHECK(a.coords == b.coords);
    for (std::size_t c = 0; c < a.k; ++c) {
        double best = 0.0;
        double at_best = 0.0;
        for (std::size_t i = 0; i < a.n; ++i)
            if (std::fabs(a.at(i, c)) > best) {
                best = std::fabs(a.at(i, c));
                at_best = a.at(i, c);
            }
        CHECK(at_best >= 0.0);
    }
}

TEST_CASE("mds clamps negative eigenvalues on non-euclidean input") {
    // A metric-violating matrix (a 'permuted null' shape).
    SymMatrix d(4);
    d.set(0, 1, 10.0);
    d.set(0, 2, 0.1);
    d.set(0, 3, 0.1);
    d.set(1, 2, 0.1);
    d.set(1, 3, 0.1);
    d.set(2, 3, 10.0);
    const auto e = classical_mds(d, 3);
    for (const double v : e.coords) CHECK(std::isfinite(v));
    for (const double lambda : e.spectrum) CHECK(lambda >= 0.0);
}

TEST_CASE("mds rejects k > N-1") {
    SymMatrix d(3);
    CHECK_THROWS_AS(classical_mds(d, 3), config_error);
}

TEST_CASE("pca preserves planar data distances at k=2") {
    Rng rng(7);
    const std::size_t n = 12, g = 6;
    // Points on a random 2-plane in gene space.
    std::vector<double> b1(g), b2(g);
    for (auto& v : b1) v = rng.normal();
    for (auto& v : b2) v = rng.normal();
    std::vector<double> values(n * g);
    std::vector<double> plane(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform() * 3.0, c = rng.uniform() * 3.0;
        plane[i * 2] = a;
        plane[i * 2 + 1] = c;
        for (std::size_t j = 0; j < g; ++j) values[i * g + j] = 4.0 + a * b1[j] + c * b2[j];
    }
    const auto e = pca(wrap_rows(values, n, g), 2);
    const auto rec = euclidean_distances(e);
    const auto orig = euclidean_distances_rows(values, n, g);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            CHECK(rec(i, j) == doctest::Approx(orig(i, j)).epsilon(1e-9));
}

TEST_CASE("pca at full rank preserves total variance") {
    Rng rng(8);
    const std::size_t n = 15, g = 4;
    std::vector<double> values(n * g);
    for (auto& v : values) v = rng.uniform() * 2.0;
    const auto e = pca(wrap_rows(values, n, g), g);
    // Total variance of centered columns.
    double total = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += values[i * g + j];
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = values[i * g + j] - mean;
            total += c * c;
        }
    }
    total /= static_cast<double>(n - 1);
    double kept = 0.0;
    for (const double v : e.spectrum) kept += v;
    CHECK(kept == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("pca explained variances match the gram-matrix eigenvalue oracle") {
    Rng rng(9);
    const std::size_t n = 20, g = 5;
    std::vector<double> values(n * g);
    for (auto& v : values) v = rng.uniform();
    const auto e = pca(wrap_rows(values, n, g), 3);

    // Oracle: eigenvalues of the centered Gram matrix X X^T share the
    // nonzero spectrum of X^T X.
    Eigen::MatrixXd x(n, g);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < g; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * g + j];
    x.rowwise() -= x.colwise().mean();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x * x.transpose());
    for (std::size_t c = 0; c < 3; ++c) {
        const double lambda =
            es.eigenvalues()(static_cast<Eigen::Index>(n - 1 - c)) / static_cast<double>(n - 1);
        CHECK(e.spectrum[c] == doctest::Approx(lambda).epsilon(1e-9));
    }

    // Non-increasing, non-negative (to tolerance), centered output columns.
    for (std::size_t c = 1; c < e.spectrum.size(); ++c)
        CHECK(e.spectrum[c] <= e.spectrum[c - 1] + 1e-12);
    for (const double v : e.spectrum) CHECK(v >= -1e-9);
    for (std::size_t c = 0; c < e.k; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < e.n; ++i) mean += e.at(i, c);
        CHECK(std::fabs(mean / static_cast<double>(e.n)) < 1e-9);
    }
}

TEST_CASE("pca rejects k beyond min(N, G)") {
    CHECK_THROWS_AS(pca(wrap_rows(std::vector<double>(6, 1.0), 2, 3), 3), config_error);
}

TEST_CASE("euclidean distances: trivial cases and the double-loop oracle") {
    const auto single = euclidean_distances_rows({1.0, 2.0}, 1, 2);
    CHECK(single.size() == 1);
    CHECK(single(0, 0) == 0.0);

    const std::vector<double> square = {0, 0, 1, 0, 1, 1, 0, 1};
    const auto d = euclidean_distances_rows(square, 4, 2);
    CHECK(d(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d(1, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d(0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(d(1, 3) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    Rng rng(10);
    const std::size_t n = 14, k = 3;
    std::vector<double> cloud(n * k);
    for (auto& v : cloud) v = rng.uniform() * 3.0;
    const auto dd = euclidean_distances_rows(cloud, n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double ss = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double diff = cloud[i * k + c] - cloud[j * k + c];
                ss += diff * diff;
            }
            CHECK(dd(i, j) == doctest::Approx(std::sqrt(ss)).epsilon(1e-12));
        }
}

TEST_CASE("embedding csv round-trips coordinates and metadata") {
    Rng rng(11);
    const std::size_t n = 6;
    SymMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, 0.2 + rng.uniform());
    const auto e = classical_mds(d, 2);
    ExpressionMatrix meta = wrap_rows(std::vector<double>(n, 1.0), n, 1);
    meta.timestamps = {0, 0, 1, 1, 2, 2};
    const auto path = std::filesystem::temp_directory_path() / "sctsa_emb.csv";
    save_embedding_csv(e, meta, path);
    std::vector<std::string> ids;
    std::vector<int> ts;
    const auto r = load_embedding_csv(path, &ids, &ts, nullptr);
    CHECK(r.n == n);
    CHECK(r.k == 2);
    CHECK(r.coords == e.coords);
    CHECK(ts == meta.timestamps);
    CHECK(ids == meta.cell_ids);
}
