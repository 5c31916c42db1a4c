// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "chipdse/blacklist.hpp"
#include "chipdse/constants.hpp"
#include "chipdse/cost.hpp"
#include "chipdse/design_space.hpp"
#include "chipdse/ppac.hpp"
#include "chipdse/shorthand.hpp"

#include <nlohmann/json.hpp>

namespace chipdse::testing {

inline const ModelConstants& consts() {
    static const ModelConstants c = ModelConstants::defaults();
    return c;
}

inline Blacklist bundled_blacklist() { return Blacklist::from_file(data_dir() / "BLACKLIST.json"); }

inline const DesignSpace& full_space() {
    static const DesignSpace s = make_space(consts(), bundled_blacklist());
    return s;
}

inline SystemConfig cfg(const std::string& canonical) { return parse_config(canonical); }

inline Restriction restriction(const std::string& json_text) {
    return Restriction::from_json(nlohmann::json::parse(json_text));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("chipdse-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace chipdse::testing
