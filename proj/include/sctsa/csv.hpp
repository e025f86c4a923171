#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sctsa {

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

// Writes content to a temp file in the target directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// RFC 4180 writer: CRLF records, fields quoted only when needed.
class CsvWriter {
public:
    CsvWriter& field(std::string_view s);
    CsvWriter& field(double v);
    CsvWriter& field(std::int64_t v);
    CsvWriter& field(std::uint64_t v);
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    void end_row();
    const std::string& content() const { return buf_; }
    void save(const std::filesystem::path& path) const { write_file_atomic(path, buf_); }

private:
    std::string buf_;
    bool row_open_ = false;
};

// Full-file CSV parse honouring quotes and CRLF/LF endings.
// Returns rows of fields; a trailing empty line is ignored.
std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter = ',');

std::vector<std::vector<std::string>> read_csv_file(const std::filesystem::path& path,
                                                    char delimiter = ',');

}  // namespace sctsa
