// SPDX-License-Identifier: Apache-2.0
#include "chipdse/constants.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chipdse/errors.hpp"

namespace chipdse {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, std::string_view where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError(fmt::format("constants: '{}.{}' missing or not a number", where, key));
    return j[key].get<double>();
}

const json& table(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_object())
        throw ParseError(fmt::format("constants: table '{}' missing", key));
    return j[key];
}

const json& entry(const json& t, std::string_view table_name, std::string_view key) {
    const auto it = t.find(std::string(key));
    if (it == t.end() || !it->is_object())
        throw ParseError(fmt::format("constants: '{}.{}' missing", table_name, key));
    return *it;
}

void require(bool ok, std::string_view what) {
    if (!ok) throw ParseError(fmt::format("constants: {} out of range", what));
}

}  // namespace

const NodeParams& ModelConstants::node(int nm) const {
    const auto it = nodes.find(nm);
    if (it == nodes.end()) throw ModelError(fmt::format("no constants for {} nm", nm));
    return it->second;
}

ModelConstants ModelConstants::defaults() {
    ModelConstants c;
    c.nodes[7] = {1.2, 0.15, 0.5, 0.002, 0.0008, 0.0012, 9300};
    c.nodes[10] = {1.0, 0.22, 0.7, 0.0035, 0.0013, 0.0010, 6000};
    c.nodes[14] = {0.8, 0.30, 0.9, 0.006, 0.0020, 0.0008, 4000};

    c.memory[static_cast<int>(Memory::DDR4)] = {25.6, 160, 20};
    c.memory[static_cast<int>(Memory::DDR5)] = {51.2, 120, 30};
    c.memory[static_cast<int>(Memory::HBM2)] = {307, 56, 120};
    c.memory[static_cast<int>(Memory::HBM3)] = {819, 40, 200};

    c.interconnect[static_cast<int>(Interconnect::RDL)] = {40, 4.0, 4};
    c.interconnect[static_cast<int>(Interconnect::EMIB)] = {45, 2.4, 6};
    c.interconnect[static_cast<int>(Interconnect::PassiveInterposer)] = {40, 3.2, 5};
    c.interconnect[static_cast<int>(Interconnect::ActiveInterposer)] = {25, 2.0, 9};
    c.interconnect[static_cast<int>(Interconnect::Microbump)] = {40, 0.8, 8};
    c.interconnect[static_cast<int>(Interconnect::HybridBond)] = {10, 0.4, 12};

    c.protocol[static_cast<int>(Protocol::UCS)] = {16, 0.85};
    c.protocol[static_cast<int>(Protocol::UCA)] = {32, 0.90};
    c.protocol[static_cast<int>(Protocol::UC3)] = {4, 0.95};
    c.protocol[static_cast<int>(Protocol::AIB)] = {6.4, 0.85};
    c.protocol[static_cast<int>(Protocol::BoW)] = {16, 0.80};

    c.integration[static_cast<int>(Integration::TwoD)] = {5, 1.0};
    c.integration[static_cast<int>(Integration::TwoPointFiveD)] = {25, 1.2};
    c.integration[static_cast<int>(Integration::ThreeD)] = {40, 1.0};
    c.integration[static_cast<int>(Integration::Hybrid)] = {60, 1.2};

    c.topology[static_cast<int>(Topology::Ring)] = {0.85};
    c.topology[static_cast<int>(Topology::Mesh)] = {1.0};
    c.topology[static_cast<int>(Topology::Star)] = {0.7};
    return c;
}

void ModelConstants::validate() const {
    for (int nm : kTechNodes) {
        const auto it = nodes.find(nm);
        require(it != nodes.end(), fmt::format("node.{}", nm));
        const auto& n = it->second;
        require(n.freq_ghz > 0 && n.mac_pj > 0 && n.sram_pj_per_byte > 0 && n.pe_area_mm2 > 0 &&
                    n.sram_area_mm2_per_kb > 0 && n.defect_density_per_mm2 > 0 && n.wafer_cost_usd > 0,
                fmt::format("node.{}", nm));
    }
    for (auto m : kMemories) {
        const auto& p = of(m);
        require(p.bw_gbps > 0 && p.dram_pj_per_byte > 0 && p.cost_usd > 0, fmt::format("memory.{}", to_string(m)));
    }
    for (auto i : kLinkInterconnects) {
        const auto& p = of(i);
        require(p.bump_pitch_um > 0 && p.pj_per_byte > 0 && p.link_cost_usd > 0,
                fmt::format("interconnect.{}", long_name(i)));
    }
    for (auto pr : kLinkProtocols) {
        const auto& p = of(pr);
        require(p.lane_rate_gbps > 0 && p.efficiency > 0 && p.efficiency <= 1, fmt::format("protocol.{}", to_string(pr)));
    }
    for (auto i : kIntegrations) {
        const auto& p = of(i);
        require(p.package_base_cost_usd > 0 && p.whitespace_factor >= 1, fmt::format("integration.{}", to_string(i)));
    }
    for (auto t : kTopologies) {
        const auto& p = of(t);
        require(p.bw_derate > 0 && p.bw_derate <= 1, fmt::format("topology.{}", to_string(t)));
    }
    require(logic_overhead_factor > 0, "logic_overhead_factor");
    require(bond_yield > 0 && bond_yield <= 1, "bond_yield");
    require(bump_utilization > 0 && bump_utilization <= 1, "bump_utilization");
    require(edge_rows > 0, "edge_rows");
    require(wafer_diameter_mm > 0, "wafer_diameter_mm");
    require(yield_alpha > 0, "yield_alpha");
    require(sram_bytes_per_mac > 0, "sram_bytes_per_mac");
}

ModelConstants ModelConstants::from_json(const json& j) {
    if (!j.is_object()) throw ParseError("constants: expected a JSON object");
    ModelConstants c;
    const auto& nodes = table(j, "node");
    for (int nm : kTechNodes) {
        const auto& e = entry(nodes, "node", std::to_string(nm));
        const auto where = fmt::format("node.{}", nm);
        c.nodes[nm] = {number(e, "freq_ghz", where),
                       number(e, "mac_pj", where),
                       number(e, "sram_pj_per_byte", where),
                       number(e, "pe_area_mm2", where),
                       number(e, "sram_area_mm2_per_kb", where),
                       number(e, "defect_density_per_mm2", where),
                       number(e, "wafer_cost_usd", where)};
    }
    const auto& mem = table(j, "memory");
    for (auto m : kMemories) {
        const auto& e = entry(mem, "memory", to_string(m));
        const auto where = fmt::format("memory.{}", to_string(m));
        c.memory[static_cast<int>(m)] = {number(e, "bw_gbps", where), number(e, "dram_pj_per_byte", where),
                                         number(e, "cost_usd", where)};
    }
    const auto& ic = table(j, "interconnect");
    for (auto i : kLinkInterconnects) {
        const auto& e = entry(ic, "interconnect", long_name(i));
        const auto where = fmt::format("interconnect.{}", long_name(i));
        c.interconnect[static_cast<int>(i)] = {number(e, "bump_pitch_um", where), number(e, "pj_per_byte", where),
                                               number(e, "link_cost_usd", where)};
    }
    const auto& pr = table(j, "protocol");
    for (auto p : kLinkProtocols) {
        const auto& e = entry(pr, "protocol", to_string(p));
        const auto where = fmt::format("protocol.{}", to_string(p));
        c.protocol[static_cast<int>(p)] = {number(e, "lane_rate_gbps", where), number(e, "efficiency", where)};
    }
    const auto& in = table(j, "integration");
    for (auto i : kIntegrations) {
        const auto& e = entry(in, "integration", to_string(i));
        const auto where = fmt::format("integration.{}", to_string(i));
        c.integration[static_cast<int>(i)] = {number(e, "package_base_cost_usd", where),
                                              number(e, "whitespace_factor", where)};
    }
    const auto& topo = table(j, "topology");
    for (auto t : kTopologies) {
        const auto& e = entry(topo, "topology", to_string(t));
        c.topology[static_cast<int>(t)] = {number(e, "bw_derate", fmt::format("topology.{}", to_string(t)))};
    }
    c.logic_overhead_factor = number(j, "logic_overhead_factor", "root");
    c.bond_yield = number(j, "bond_yield", "root");
    c.bump_utilization = number(j, "bump_utilization", "root");
    c.edge_rows = number(j, "edge_rows", "root");
    c.wafer_diameter_mm = number(j, "wafer_diameter_mm", "root");
    c.yield_alpha = number(j, "yield_alpha", "root");
    c.sram_bytes_per_mac = number(j, "sram_bytes_per_mac", "root");
    c.validate();
    return c;
}

ModelConstants ModelConstants::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot read constants file '{}'", path.string()));
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json ModelConstants::to_json() const {
    json j;
    j["version"] = 1;
    for (const auto& [nm, n] : nodes) {
        j["node"][std::to_string(nm)] = {{"freq_ghz", n.freq_ghz},
                                         {"mac_pj", n.mac_pj},
                                         {"sram_pj_per_byte", n.sram_pj_per_byte},
                                         {"pe_area_mm2", n.pe_area_mm2},
                                         {"sram_area_mm2_per_kb", n.sram_area_mm2_per_kb},
                                         {"defect_density_per_mm2", n.defect_density_per_mm2},
                                         {"wafer_cost_usd", n.wafer_cost_usd}};
    }
    for (auto m : kMemories) {
        const auto& p = of(m);
        j["memory"][std::string(to_string(m))] = {
            {"bw_gbps", p.bw_gbps}, {"dram_pj_per_byte", p.dram_pj_per_byte}, {"cost_usd", p.cost_usd}};
    }
    for (auto i : kLinkInterconnects) {
        const auto& p = of(i);
        j["interconnect"][std::string(long_name(i))] = {
            {"bump_pitch_um", p.bump_pitch_um}, {"pj_per_byte", p.pj_per_byte}, {"link_cost_usd", p.link_cost_usd}};
    }
    for (auto pr : kLinkProtocols) {
        const auto& p = of(pr);
        j["protocol"][std::string(to_string(pr))] = {{"lane_rate_gbps", p.lane_rate_gbps},
                                                     {"efficiency", p.efficiency}};
    }
    for (auto i : kIntegrations) {
        const auto& p = of(i);
        j["integration"][std::string(to_string(i))] = {{"package_base_cost_usd", p.package_base_cost_usd},
                                                       {"whitespace_factor", p.whitespace_factor}};
    }
    for (auto t : kTopologies) j["topology"][std::string(to_string(t))] = {{"bw_derate", of(t).bw_derate}};
    j["logic_overhead_factor"] = logic_overhead_factor;
    j["bond_yield"] = bond_yield;
    j["bump_utilization"] = bump_utilization;
    j["edge_rows"] = edge_rows;
    j["wafer_diameter_mm"] = wafer_diameter_mm;
    j["yield_alpha"] = yield_alpha;
    j["sram_bytes_per_mac"] = sram_bytes_per_mac;
    return j;
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("CHIPDSE_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return CHIPDSE_DATA_DIR;
}

}  // namespace chipdse
