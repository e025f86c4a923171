#include "sctsa/manifest.hpp"

#include <fstream>

#include "nlohmann/json.hpp"
#include "sctsa/csv.hpp"
#include "sctsa/errors.hpp"

namespace sctsa {

RunManifest RunManifest::load_or_empty(const std::filesystem::path& out_dir) {
    RunManifest m;
    const auto path = out_dir / "manifest.json";
    if (!std::filesystem::exists(path)) return m;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw data_error("corrupt manifest " + path.string() + ": " + e.what());
    }
    m.tool = j.value("tool", std::string(kToolVersion));
    if (j.contains("stages"))
        for (const auto& [name, js] : j["stages"].items()) {
            Stage st;
            if (js.contains("config"))
                for (const auto& [k, v] : js["config"].items()) st.config[k] = v.get<std::string>();
            if (js.contains("inputs"))
                for (const auto& [k, v] : js["inputs"].items()) st.inputs[k] = v.get<std::string>();
            if (js.contains("outputs"))
                for (const auto& [k, v] : js["outputs"].items())
                    st.outputs[k] = v.get<std::string>();
            st.seconds = js.value("seconds", 0.0);
            m.stages[name] = std::move(st);
        }
    return m;
}

void RunManifest::save(const std::filesystem::path& out_dir) const {
    nlohmann::json j;
    j["schema"] = "sctsa.manifest/1";
    j["tool"] = tool;
    auto& js = j["stages"] = nlohmann::json::object();
    for (const auto& [name, st] : stages) {
        nlohmann::json e;
        e["config"] = st.config;
        e["inputs"] = st.inputs;
        e["outputs"] = st.outputs;
        e["seconds"] = st.seconds;
        js[name] = std::move(e);
    }
    write_file_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace sctsa
