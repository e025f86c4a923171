#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace sctsa {

constexpr const char* kToolVersion = "sctsa 0.1.0";

// Run manifest: config snapshot, input digests, per-stage output digests and
// wall-clock. Lives at <out>/manifest.json and is updated after every stage.
struct RunManifest {
    struct Stage {
        std::map<std::string, std::string> config;   // effective option values
        std::map<std::string, std::string> inputs;   // path -> digest
        std::map<std::string, std::string> outputs;  // path -> digest
        double seconds = 0.0;
    };

    std::string tool = kToolVersion;
    std::map<std::string, Stage> stages;

    static RunManifest load_or_empty(const std::filesystem::path& out_dir);
    void save(const std::filesystem::path& out_dir) const;
};

}  // namespace sctsa
