// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chipdse {

enum class AssignOrder : std::uint8_t { Descending = 0, Ascending = 1 };
enum class Dataflow : std::uint8_t { OS, WS, IS };
enum class Integration : std::uint8_t { TwoD, TwoPointFiveD, ThreeD, Hybrid };
enum class Interconnect : std::uint8_t {
    NA,
    RDL,
    EMIB,
    PassiveInterposer,
    ActiveInterposer,
    Microbump,
    HybridBond
};
enum class Memory : std::uint8_t { DDR4, DDR5, HBM2, HBM3 };
enum class Protocol : std::uint8_t { NA, UCS, UCA, UC3, AIB, BoW };
enum class Topology : std::uint8_t { Ring, Mesh, Star };

inline constexpr std::array<int, 5> kArrayDims{64, 96, 128, 160, 192};
inline constexpr std::array<int, 3> kTechNodes{7, 10, 14};
inline constexpr std::array<int, 6> kSramSizes{256, 512, 768, 1024, 1536, 2048};

inline constexpr std::array kOrders{AssignOrder::Descending, AssignOrder::Ascending};
inline constexpr std::array kDataflows{Dataflow::OS, Dataflow::WS, Dataflow::IS};
inline constexpr std::array kIntegrations{Integration::TwoD, Integration::TwoPointFiveD,
                                          Integration::ThreeD, Integration::Hybrid};
// NA is implied by 2D and never drawn as a link technology.
inline constexpr std::array kLinkInterconnects{
    Interconnect::RDL,        Interconnect::EMIB,      Interconnect::PassiveInterposer,
    Interconnect::ActiveInterposer, Interconnect::Microbump, Interconnect::HybridBond};
inline constexpr std::array kMemories{Memory::DDR4, Memory::DDR5, Memory::HBM2, Memory::HBM3};
inline constexpr std::array kLinkProtocols{Protocol::UCS, Protocol::UCA, Protocol::UC3,
                                           Protocol::AIB, Protocol::BoW};
inline constexpr std::array kTopologies{Topology::Ring, Topology::Mesh, Topology::Star};

inline constexpr int kMaxChiplets = 6;

struct ChipletSpec {
    int array_dim = 64;  // PEs per side
    int tech_node = 7;   // nm
    int sram_kb = 256;

    auto operator<=>(const ChipletSpec&) const = default;
};

struct MappingSpec {
    AssignOrder order = AssignOrder::Descending;
    Dataflow dataflow = Dataflow::OS;
    bool split_k = false;
    bool data_sharing = false;

    auto operator<=>(const MappingSpec&) const = default;
};

/// Package-level choices. For 2.5D+3D the primary link (`interconnect`,
/// `protocol`) is the vertical 3D bond and the `lateral_*` pair is the 2.5D
/// link between stacks; for every other integration the lateral pair is NA.
struct PackageSpec {
    Integration integration = Integration::TwoD;
    Interconnect interconnect = Interconnect::NA;
    Memory memory = Memory::DDR5;
    Protocol protocol = Protocol::NA;
    Topology topology = Topology::Ring;
    Interconnect lateral_interconnect = Interconnect::NA;
    Protocol lateral_protocol = Protocol::NA;

    auto operator<=>(const PackageSpec&) const = default;
};

struct SystemConfig {
    std::vector<ChipletSpec> chiplets;
    MappingSpec mapping;
    PackageSpec package;

    [[nodiscard]] int count() const { return static_cast<int>(chiplets.size()); }
    auto operator<=>(const SystemConfig&) const = default;
};

std::string_view to_string(AssignOrder v);
std::string_view to_string(Dataflow v);
std::string_view to_string(Integration v);
std::string_view to_string(Interconnect v);
std::string_view to_string(Memory v);
std::string_view to_string(Protocol v);
std::string_view to_string(Topology v);

// Long names used in JSON tables (constants.json, BLACKLIST.json values accept both).
std::string_view long_name(Interconnect v);

std::optional<Dataflow> dataflow_from(std::string_view s);
std::optional<Integration> integration_from(std::string_view s);
std::optional<Interconnect> interconnect_from(std::string_view s);
std::optional<Memory> memory_from(std::string_view s);
std::optional<Protocol> protocol_from(std::string_view s);
std::optional<Topology> topology_from(std::string_view s);

bool is_array_dim(int v);
bool is_tech_node(int v);
bool is_sram_kb(int v);

/// Smallest allowed SRAM size that holds one A x A tile of 4-byte accumulators.
int minimum_sram_kb(int array_dim);

bool is_3d_interconnect(Interconnect i);
bool is_2p5d_interconnect(Interconnect i);

/// Compatibility table for a single 2.5D link.
bool lateral_link_ok(Interconnect i, Protocol p);
/// Compatibility table for a single 3D bond.
bool vertical_link_ok(Interconnect i, Protocol p);
/// Whole-package interconnect/protocol/integration compatibility.
bool package_links_ok(const PackageSpec& pkg);

/// Number of physical die-to-die bonds in the package.
int link_count(const SystemConfig& cfg);

/// Stacks of chiplet indices, bottom die first. 2D/2.5D: one die per stack;
/// 3D: a single stack; 2.5D+3D: two stacks, the first holding ceil(n/2) dies.
std::vector<std::vector<int>> stacks_of(const SystemConfig& cfg);

}  // namespace chipdse
