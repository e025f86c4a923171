#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "sctsa/csv.hpp"
#include "sctsa/errors.hpp"
#include "sctsa/expression.hpp"
#include "sctsa/rng.hpp"
#include "sctsa/sym_matrix.hpp"

using namespace sctsa;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sctsa_test_data";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

ExpressionMatrix tiny_matrix(std::vector<std::vector<double>> rows,
                             std::vector<int> timestamps = {},
                             std::vector<std::string> types = {}) {
    ExpressionMatrix m;
    m.n_cells = rows.size();
    m.n_genes = rows.front().size();
    for (std::size_t i = 0; i < m.n_cells; ++i) {
        m.cell_ids.push_back("c" + std::to_string(i));
        m.timestamps.push_back(timestamps.empty() ? 0 : timestamps[i]);
        m.cell_types.push_back(types.empty() ? "t" : types[i]);
        for (const double v : rows[i]) m.values.push_back(v);
    }
    for (std::size_t g = 0; g < m.n_genes; ++g) m.gene_names.push_back("g" + std::to_string(g));
    return m;
}

}  // namespace

TEST_CASE("load_expression parses a small csv with metadata") {
    const auto p = temp_file("small.csv");
    write_text(p,
               "cell_id,timestamp,cell_type,gA,gB\n"
               "c1,0,alpha,1.5,2\n"
               "c2,0,alpha,0,1\n"
               "c3,1,beta,3,4.25\n");
    const auto m = load_expression(p);
    CHECK(m.n_cells == 3);
    CHECK(m.n_genes == 2);
    CHECK(m.gene_names == std::vector<std::string>{"gA", "gB"});
    CHECK(m.at(0, 0) == 1.5);
    CHECK(m.at(2, 1) == 4.25);
    CHECK(m.timestamps == std::vector<int>{0, 0, 1});
    CHECK(m.cell_types[2] == "beta");
}

TEST_CASE("load_expression rejects bad input with locations") {
    const auto neg = temp_file("neg.csv");
    write_text(neg, "cell_id,timestamp,cell_type,g\na,0,t,1\nb,0,t,-3\n");
    CHECK_THROWS_WITH_AS(load_expression(neg), doctest::Contains("row 3"), data_error);

    const auto nonnum = temp_file("nonnum.csv");
    write_text(nonnum, "cell_id,timestamp,cell_type,g\na,0,t,abc\n");
    CHECK_THROWS_WITH_AS(load_expression(nonnum), doctest::Contains("non-numeric"), data_error);

    const auto missing = temp_file("missing.csv");
    write_text(missing, "cell,timestamp,cell_type,g\na,0,t,1\n");
    CHECK_THROWS_WITH_AS(load_expression(missing), doctest::Contains("cell_id"), data_error);

    const auto dup = temp_file("dup.csv");
    write_text(dup, "cell_id,timestamp,cell_type,g\na,0,t,1\na,0,t,2\n");
    CHECK_THROWS_WITH_AS(load_expression(dup), doctest::Contains("duplicate cell id"), data_error);

    const auto badtime = temp_file("badtime.csv");
    write_text(badtime, "cell_id,timestamp,cell_type,g\na,early,t,1\n");
    CHECK_THROWS_AS(load_expression(badtime), data_error);
}

TEST_CASE("tsv delimiter is inferred from the extension") {
    const auto p = temp_file("small.tsv");
    write_text(p, "cell_id\ttimestamp\tcell_type\tg\na\t0\tu\t2\n");
    const auto m = load_expression(p);
    CHECK(m.n_cells == 1);
    CHECK(m.at(0, 0) == 2.0);
}

TEST_CASE("paper-scale file loads without truncation") {
    // 38,731 cells, 25 cell types, 12 time steps; synthetic same-shape file.
    const auto p = temp_file("big.csv");
    std::string text = "cell_id,timestamp,cell_type,g1,g2,g3\n";
    text.reserve(40'000'000 / 16);
    char buf[96];
    for (int i = 0; i < 38'731; ++i) {
        std::snprintf(buf, sizeof(buf), "c%d,%d,type%02d,%d.5,%d,1\n", i, i % 12, i % 25,
                      i % 7, (i * 3) % 11);
        text += buf;
    }
    write_text(p, text);
    const auto m = load_expression(p);
    CHECK(m.n_cells == 38'731);
    CHECK(m.distinct_timestamps().size() == 12);
    std::set<std::string> types(m.cell_types.begin(), m.cell_types.end());
    CHECK(types.size() == 25);
}

TEST_CASE("correlation distance: identical and reversed rows") {
    const auto m = tiny_matrix({{1, 2, 3}, {2, 4, 6}, {3, 2, 1}});
    const auto d = correlation_distance(m);
    CHECK(d(0, 1) == doctest::Approx(0.0).epsilon(1e-15));  // perfect correlation
    CHECK(d(0, 2) == doctest::Approx(2.0).epsilon(1e-15));  // perfect anticorrelation
    CHECK(d(0, 0) == 0.0);
}

TEST_CASE("correlation distance matches the two-pass oracle on random rows") {
    Rng rng(5);
    std::vector<std::vector<double>> rows(4, std::vector<double>(12));
    for (auto& r : rows)
        for (auto& v : r) v = rng.uniform() * 10.0;
    const auto m = tiny_matrix(rows);
    const auto d = correlation_distance(m);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double expected = 1.0 - oracle::pearson(rows[i], rows[j]);
            CHECK(d(i, j) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("correlation distance is invariant under positive affine row maps") {
    Rng rng(6);
    std::vector<std::vector<double>> rows(5, std::vector<double>(9));
    for (auto& r : rows)
        for (auto& v : r) v = rng.uniform() * 4.0;
    const auto d1 = correlation_distance(tiny_matrix(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double scale = 0.5 + rng.uniform() * 3.0;
        const double shift = rng.uniform() * 7.0;
        for (auto& v : rows[i]) v = scale * v + shift;
    }
    const auto d2 = correlation_distance(tiny_matrix(rows));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            CHECK(d1(i, j) == doctest::Approx(d2(i, j)).epsilon(1e-10));
}

TEST_CASE("zero-variance row is a hard error naming the cell") {
    const auto m = tiny_matrix({{1, 2, 3}, {5, 5, 5}});
    CHECK_THROWS_WITH_AS(correlation_distance(m), doctest::Contains("c1"), data_error);
}

TEST_CASE("spearman flag uses ranks") {
    // Monotone but nonlinear relation: spearman 1, pearson < 1.
    const auto m = tiny_matrix({{1, 2, 3, 4, 5}, {1, 8, 27, 64, 125}});
    const auto dp = correlation_distance(m, CorrelationKind::pearson);
    const auto ds = correlation_distance(m, CorrelationKind::spearman);
    CHECK(ds(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dp(0, 1) > 0.01);
}

TEST_CASE("correlation distance is independent of the thread count") {
    Rng rng(17);
    std::vector<std::vector<double>> rows(20, std::vector<double>(8));
    for (auto& r : rows)
        for (auto& v : r) v = rng.uniform();
    const auto m = tiny_matrix(rows);
    const auto d1 = correlation_distance(m, CorrelationKind::pearson, 1);
    const auto d4 = correlation_distance(m, CorrelationKind::pearson, 4);
    CHECK(d1 == d4);
}

TEST_CASE("bootstrap returns whole group when m equals the group size") {
    const auto m = tiny_matrix({{1, 2}, {2, 3}, {3, 4}, {4, 5}}, {0, 0, 1, 1});
    const auto s = bootstrap_sample(m, GroupBy::timestamp, 2, 123);
    REQUIRE(s.n_cells == 4);
    // Order-normalized: original row order within each group.
    CHECK(s.cell_ids == std::vector<std::string>{"c0", "c1", "c2", "c3"});
}

TEST_CASE("bootstrap keeps per-group counts and subset property") {
    Rng rng(8);
    std::vector<std::vector<double>> rows(400, std::vector<double>(3));
    std::vector<int> times(400);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        times[i] = i < 200 ? 3 : 7;
        for (auto& v : rows[i]) v = rng.uniform();
    }
    const auto m = tiny_matrix(rows, times);
    const auto s = bootstrap_sample(m, GroupBy::timestamp, 100, 99);
    REQUIRE(s.n_cells == 200);
    std::map<int, int> counts;
    for (const int t : s.timestamps) ++counts[t];
    CHECK(counts[3] == 100);
    CHECK(counts[7] == 100);
    std::set<std::string> ids(s.cell_ids.begin(), s.cell_ids.end());
    CHECK(ids.size() == 200);  // without replacement: all distinct
    for (const auto& id : s.cell_ids) {
        const int i = std::stoi(id.substr(1));
        CHECK(i < 400);
    }
}

TEST_CASE("bootstrap determinism: same seed same sample, different seeds differ") {
    Rng rng(21);
    std::vector<std::vector<double>> rows(60, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r) v = rng.uniform();
    const auto m = tiny_matrix(rows);
    const auto a = bootstrap_sample(m, GroupBy::timestamp, 30, 5);
    const auto b = bootstrap_sample(m, GroupBy::timestamp, 30, 5);
    CHECK(a.cell_ids == b.cell_ids);
    CHECK(a.values == b.values);
    int differing = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto c = bootstrap_sample(m, GroupBy::timestamp, 30, 1000 + s);
        if (c.cell_ids != a.cell_ids) ++differing;
    }
    CHECK(differing == 20);
}

TEST_CASE("bootstrap errors on groups smaller than m, naming the group") {
    const auto m = tiny_matrix({{1, 2}, {2, 3}, {3, 4}}, {0, 0, 1});
    CHECK_THROWS_WITH_AS(bootstrap_sample(m, GroupBy::timestamp, 2, 1),
                         doctest::Contains("'1' has 1 members"), data_error);
    // With replacement the small group is allowed.
    const auto s = bootstrap_sample(m, GroupBy::timestamp, 2, 1, true);
    CHECK(s.n_cells == 4);
}

TEST_CASE("distance matrix round-trips bit-exactly through binary and csv") {
    Rng rng(33);
    SymMatrix d(17);
    for (std::size_t i = 0; i < 17; ++i)
        for (std::size_t j = i + 1; j < 17; ++j) d.set(i, j, rng.uniform() * 3.0);
    const auto bin = temp_file("d.bin");
    const auto csv = temp_file("d.csv");
    d.save_binary(bin);
    d.save_csv(csv);
    CHECK(SymMatrix::load_binary(bin) == d);
    const auto from_csv = SymMatrix::load_csv(csv);
    REQUIRE(from_csv.size() == d.size());
    for (std::size_t i = 0; i < 17; ++i)
        for (std::size_t j = i + 1; j < 17; ++j)
            CHECK(from_csv(i, j) == d(i, j));  // shortest round-trip formatting is exact
}

TEST_CASE("binary header is the documented magic") {
    SymMatrix d(3);
    d.set(0, 1, 1.0);
    const auto bin = temp_file("magic.bin");
    d.save_binary(bin);
    std::ifstream in(bin, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::string(magic, 8) == "SCTSA-DM");
}

TEST_CASE("expression csv artifact round-trips") {
    const auto m = tiny_matrix({{1, 2}, {3.5, 0}}, {0, 4}, {"a", "b,with comma"});
    const auto p = temp_file("round.csv");
    save_expression_csv(m, p);
    const auto r = load_expression(p);
    CHECK(r.n_cells == 2);
    CHECK(r.cell_types[1] == "b,with comma");
    CHECK(r.values == m.values);
    CHECK(r.timestamps == m.timestamps);
}
