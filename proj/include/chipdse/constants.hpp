// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "chipdse/types.hpp"

namespace chipdse {

struct NodeParams {
    double freq_ghz = 0;
    double mac_pj = 0;
    double sram_pj_per_byte = 0;
    double pe_area_mm2 = 0;
    double sram_area_mm2_per_kb = 0;
    double defect_density_per_mm2 = 0;
    double wafer_cost_usd = 0;
};

struct MemoryParams {
    double bw_gbps = 0;  // GB/s
    double dram_pj_per_byte = 0;
    double cost_usd = 0;
};

struct InterconnectParams {
    double bump_pitch_um = 0;
    double pj_per_byte = 0;
    double link_cost_usd = 0;
};

struct ProtocolParams {
    double lane_rate_gbps = 0;
    double efficiency = 0;
};

struct IntegrationParams {
    double package_base_cost_usd = 0;
    double whitespace_factor = 1;
};

struct TopologyParams {
    double bw_derate = 1;
};

/// Every coefficient of the surrogate PPAC models. Tables are indexed by the
/// enum ordinal; the NA slots of the interconnect and protocol tables are unused.
struct ModelConstants {
    std::map<int, NodeParams> nodes;
    std::array<MemoryParams, 4> memory{};
    std::array<InterconnectParams, 7> interconnect{};
    std::array<ProtocolParams, 6> protocol{};
    std::array<IntegrationParams, 4> integration{};
    std::array<TopologyParams, 3> topology{};
    double logic_overhead_factor = 1.3;
    double bond_yield = 0.99;
    double bump_utilization = 0.5;
    double edge_rows = 4;
    double wafer_diameter_mm = 300;
    double yield_alpha = 3;
    double sram_bytes_per_mac = 2;

    [[nodiscard]] const NodeParams& node(int nm) const;
    [[nodiscard]] const MemoryParams& of(Memory m) const { return memory[static_cast<int>(m)]; }
    [[nodiscard]] const InterconnectParams& of(Interconnect i) const { return interconnect[static_cast<int>(i)]; }
    [[nodiscard]] const ProtocolParams& of(Protocol p) const { return protocol[static_cast<int>(p)]; }
    [[nodiscard]] const IntegrationParams& of(Integration i) const { return integration[static_cast<int>(i)]; }
    [[nodiscard]] const TopologyParams& of(Topology t) const { return topology[static_cast<int>(t)]; }

    /// Built-in defaults; data/constants.json holds the same numbers.
    static ModelConstants defaults();
    /// Throws ParseError on a missing key or a value violating the invariants.
    static ModelConstants from_json(const nlohmann::json& j);
    static ModelConstants load(const std::filesystem::path& path);
    [[nodiscard]] nlohmann::json to_json() const;

    /// Throws ParseError naming the first offending entry.
    void validate() const;
};

/// Path of the bundled data directory (overridable with CHIPDSE_DATA_DIR in the environment).
std::filesystem::path data_dir();

}  // namespace chipdse
