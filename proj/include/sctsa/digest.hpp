#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace sctsa {

// FNV-1a 64-bit. Used for input/output digests in run manifests and for
// embedding source hashes; not cryptographic.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t digest_update(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t digest_bytes(const void* data, std::size_t len) {
    return digest_update(kFnvOffset, data, len);
}

inline std::uint64_t digest_string(const std::string& s) {
    return digest_bytes(s.data(), s.size());
}

std::string digest_hex(std::uint64_t h);

// Digest of a file's raw bytes; throws data_error if unreadable.
std::uint64_t digest_file(const std::string& path);

}  // namespace sctsa
