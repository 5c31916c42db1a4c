// SPDX-License-Identifier: Apache-2.0
#include "chipdse/types.hpp"

#include <algorithm>
#include <cctype>

namespace chipdse {
namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table) {
    for (const auto& [name, value] : table) {
        if (iequals(name, s)) return value;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(AssignOrder v) {
    return v == AssignOrder::Descending ? "descending" : "ascending";
}

std::string_view to_string(Dataflow v) {
    switch (v) {
        case Dataflow::OS: return "OS";
        case Dataflow::WS: return "WS";
        case Dataflow::IS: return "IS";
    }
    return "?";
}

std::string_view to_string(Integration v) {
    switch (v) {
        case Integration::TwoD: return "2D";
        case Integration::TwoPointFiveD: return "2.5D";
        case Integration::ThreeD: return "3D";
        case Integration::Hybrid: return "2.5D+3D";
    }
    return "?";
}

std::string_view to_string(Interconnect v) {
    switch (v) {
        case Interconnect::NA: return "NA";
        case Interconnect::RDL: return "RDL";
        case Interconnect::EMIB: return "EMIB";
        case Interconnect::PassiveInterposer: return "Pass";
        case Interconnect::ActiveInterposer: return "Acti";
        case Interconnect::Microbump: return "uB";
        case Interconnect::HybridBond: return "HB";
    }
    return "?";
}

std::string_view long_name(Interconnect v) {
    switch (v) {
        case Interconnect::PassiveInterposer: return "PassiveInterposer";
        case Interconnect::ActiveInterposer: return "ActiveInterposer";
        case Interconnect::Microbump: return "Microbump";
        case Interconnect::HybridBond: return "HybridBond";
        default: return to_string(v);
    }
}

std::string_view to_string(Memory v) {
    switch (v) {
        case Memory::DDR4: return "DDR4";
        case Memory::DDR5: return "DDR5";
        case Memory::HBM2: return "HBM2";
        case Memory::HBM3: return "HBM3";
    }
    return "?";
}

std::string_view to_string(Protocol v) {
    switch (v) {
        case Protocol::NA: return "NA";
        case Protocol::UCS: return "UCS";
        case Protocol::UCA: return "UCA";
        case Protocol::UC3: return "UC3";
        case Protocol::AIB: return "AIB";
        case Protocol::BoW: return "BoW";
    }
    return "?";
}

std::string_view to_string(Topology v) {
    switch (v) {
        case Topology::Ring: return "ring";
        case Topology::Mesh: return "mesh";
        case Topology::Star: return "star";
    }
    return "?";
}

std::optional<Dataflow> dataflow_from(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Dataflow>, 3> table{
        {{"OS", Dataflow::OS}, {"WS", Dataflow::WS}, {"IS", Dataflow::IS}}};
    return lookup(s, table);
}

std::optional<Integration> integration_from(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Integration>, 4> table{
        {{"2D", Integration::TwoD},
         {"2.5D", Integration::TwoPointFiveD},
         {"3D", Integration::ThreeD},
         {"2.5D+3D", Integration::Hybrid}}};
    return lookup(s, table);
}

std::optional<Interconnect> interconnect_from(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Interconnect>, 16> table{{
        {"NA", Interconnect::NA},
        {"RDL", Interconnect::RDL},
        {"EMIB", Interconnect::EMIB},
        {"Pass", Interconnect::PassiveInterposer},
        {"PassiveInterposer", Interconnect::PassiveInterposer},
        {"Acti", Interconnect::ActiveInterposer},
        {"ActiveInterposer", Interconnect::ActiveInterposer},
        {"uB", Interconnect::Microbump},
        {"\xC2\xB5"
         "B",
         Interconnect::Microbump},  // micro sign
        {"\xCE\xBC"
         "B",
         Interconnect::Microbump},  // greek mu
        {"Microbump", Interconnect::Microbump},
        {"HB", Interconnect::HybridBond},
        {"HybridBond", Interconnect::HybridBond},
        {"Hybrid-Bond", Interconnect::HybridBond},
        {"---", Interconnect::NA},
        {"-", Interconnect::NA},
    }};
    return lookup(s, table);
}

std::optional<Memory> memory_from(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Memory>, 4> table{
        {{"DDR4", Memory::DDR4}, {"DDR5", Memory::DDR5}, {"HBM2", Memory::HBM2}, {"HBM3", Memory::HBM3}}};
    return lookup(s, table);
}

std::optional<Protocol> protocol_from(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Protocol>, 7> table{{
        {"NA", Protocol::NA},
        {"UCS", Protocol::UCS},
        {"UCA", Protocol::UCA},
        {"UC3", Protocol::UC3},
        {"AIB", Protocol::AIB},
        {"BoW", Protocol::BoW},
        {"---", Protocol::NA},
    }};
    return lookup(s, table);
}

std::optional<Topology> topology_from(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Topology>, 3> table{
        {{"ring", Topology::Ring}, {"mesh", Topology::Mesh}, {"star", Topology::Star}}};
    return lookup(s, table);
}

bool is_array_dim(int v) { return std::ranges::find(kArrayDims, v) != kArrayDims.end(); }
bool is_tech_node(int v) { return std::ranges::find(kTechNodes, v) != kTechNodes.end(); }
bool is_sram_kb(int v) { return std::ranges::find(kSramSizes, v) != kSramSizes.end(); }

int minimum_sram_kb(int array_dim) {
    const long bytes = 4L * array_dim * array_dim;
    const long kb = (bytes + 1023) / 1024;
    for (int s : kSramSizes) {
        if (s >= kb) return s;
    }
    return kSramSizes.back();
}

bool is_3d_interconnect(Interconnect i) {
    return i == Interconnect::Microbump || i == Interconnect::HybridBond;
}

bool is_2p5d_interconnect(Interconnect i) {
    return i == Interconnect::RDL || i == Interconnect::EMIB || i == Interconnect::PassiveInterposer ||
           i == Interconnect::ActiveInterposer;
}

bool lateral_link_ok(Interconnect i, Protocol p) {
    if (!is_2p5d_interconnect(i)) return false;
    switch (p) {
        case Protocol::UCS:
        case Protocol::AIB:
        case Protocol::BoW: return true;
        case Protocol::UCA: return i != Interconnect::RDL;
        default: return false;
    }
}

bool vertical_link_ok(Interconnect i, Protocol p) {
    return is_3d_interconnect(i) && p == Protocol::UC3;
}

bool package_links_ok(const PackageSpec& pkg) {
    const bool lateral_na =
        pkg.lateral_interconnect == Interconnect::NA && pkg.lateral_protocol == Protocol::NA;
    switch (pkg.integration) {
        case Integration::TwoD:
            return pkg.interconnect == Interconnect::NA && pkg.protocol == Protocol::NA && lateral_na;
        case Integration::TwoPointFiveD:
            return lateral_link_ok(pkg.interconnect, pkg.protocol) && lateral_na;
        case Integration::ThreeD:
            return vertical_link_ok(pkg.interconnect, pkg.protocol) && lateral_na;
        case Integration::Hybrid:
            return vertical_link_ok(pkg.interconnect, pkg.protocol) &&
                   lateral_link_ok(pkg.lateral_interconnect, pkg.lateral_protocol);
    }
    return false;
}

int link_count(const SystemConfig& cfg) {
    if (cfg.package.integration == Integration::TwoD) return 0;
    return std::max(0, cfg.count() - 1);
}

std::vector<std::vector<int>> stacks_of(const SystemConfig& cfg) {
    const int n = cfg.count();
    std::vector<std::vector<int>> stacks;
    switch (cfg.package.integration) {
        case Integration::ThreeD: {
            std::vector<int> all(n);
            for (int i = 0; i < n; ++i) all[i] = i;
            stacks.push_back(std::move(all));
            break;
        }
        case Integration::Hybrid: {
            const int first = (n + 1) / 2;
            stacks.emplace_back();
            stacks.emplace_back();
            for (int i = 0; i < n; ++i) stacks[i < first ? 0 : 1].push_back(i);
            if (stacks[1].empty()) stacks.pop_back();
            break;
        }
        default:
            for (int i = 0; i < n; ++i) stacks.push_back({i});
            break;
    }
    return stacks;
}

}  // namespace chipdse
