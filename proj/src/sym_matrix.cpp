#include "sctsa/sym_matrix.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <string>

#include "sctsa/csv.hpp"
#include "sctsa/errors.hpp"

namespace sctsa {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'T', 'S', 'A', '-', 'D', 'M'};

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

SymMatrix SymMatrix::from_condensed(std::size_t n, std::vector<double> tri) {
    const std::size_t expected = n < 2 ? 0 : n * (n - 1) / 2;
    if (tri.size() != expected)
        throw data_error("condensed length " + std::to_string(tri.size()) +
                         " does not match n=" + std::to_string(n));
    SymMatrix m;
    m.n_ = n;
    m.tri_ = std::move(tri);
    return m;
}

double SymMatrix::max_value() const {
    double mx = 0.0;
    for (double v : tri_)
        if (v > mx) mx = v;
    return mx;
}

void SymMatrix::validate_distances(const char* what) const {
    for (std::size_t k = 0; k < tri_.size(); ++k) {
        const double v = tri_[k];
        if (!std::isfinite(v) || v < 0.0)
            throw data_error(std::string(what) + ": entry " + std::to_string(k) +
                             " is not a finite non-negative distance");
    }
}

SymMatrix SymMatrix::submatrix(const std::vector<std::uint32_t>& idx) const {
    SymMatrix out(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            out.set(a, b, (*this)(idx[a], idx[b]));
    return out;
}

void SymMatrix::save_binary(const std::filesystem::path& path) const {
    std::string out;
    out.reserve(16 + 8 * tri_.size());
    out.append(kMagic, sizeof(kMagic));
    put_u64_le(out, static_cast<std::uint64_t>(n_));
    for (double v : tri_) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
    write_file_atomic(path, out);
}

SymMatrix SymMatrix::load_binary(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    if (text.size() < 16 || std::memcmp(text.data(), kMagic, sizeof(kMagic)) != 0)
        throw data_error("not a SCTSA-DM file: " + path.string());
    const auto* p = reinterpret_cast<const unsigned char*>(text.data());
    const std::uint64_t n = get_u64_le(p + 8);
    const std::size_t pairs = n < 2 ? 0 : static_cast<std::size_t>(n) * (n - 1) / 2;
    if (text.size() != 16 + 8 * pairs)
        throw data_error("truncated SCTSA-DM file: " + path.string());
    std::vector<double> tri(pairs);
    for (std::size_t k = 0; k < pairs; ++k)
        tri[k] = std::bit_cast<double>(get_u64_le(p + 16 + 8 * k));
    return from_condensed(static_cast<std::size_t>(n), std::move(tri));
}

void SymMatrix::save_csv(const std::filesystem::path& path) const {
    CsvWriter w;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) w.field((*this)(i, j));
        w.end_row();
    }
    w.save(path);
}

SymMatrix SymMatrix::load_csv(const std::filesystem::path& path) {
    const auto rows = read_csv_file(path);
    const std::size_t n = rows.size();
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw data_error("distance CSV is not square at row " + std::to_string(i + 1));
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.0;
            const std::string& s = rows[i][j];
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw data_error("bad number '" + s + "' at row " + std::to_string(i + 1) +
                                 ", column " + std::to_string(j + 1));
            m.set(i, j, v);
        }
    }
    return m;
}

}  // namespace sctsa
