// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chipdse/blacklist.hpp"
#include "chipdse/rng.hpp"
#include "chipdse/types.hpp"

namespace chipdse {

using AreaFn = std::function<double(const ChipletSpec&)>;

/// Optional per-dimension subsets. Unset members keep the full set.
struct Restriction {
    std::optional<std::vector<int>> counts;
    std::optional<bool> homogeneous;
    std::optional<std::vector<int>> array_dims;
    std::optional<std::vector<int>> tech_nodes;
    std::optional<std::vector<int>> sram_kbs;
    std::optional<std::vector<AssignOrder>> orders;
    std::optional<std::vector<Dataflow>> dataflows;
    std::optional<std::vector<int>> split_k;
    std::optional<std::vector<int>> data_sharing;
    std::optional<std::vector<Integration>> integrations;
    std::optional<std::vector<Interconnect>> interconnects;
    std::optional<std::vector<Memory>> memories;
    std::optional<std::vector<Protocol>> protocols;
    std::optional<std::vector<Topology>> topologies;

    /// Keys: count, homogeneous, array_dim, tech_node, sram_kb, order, dataflow,
    /// split_k, data_sharing, integration, interconnect, memory, protocol, topology.
    static Restriction from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::json to_json() const;
};

/// The feasible set: allowed values per dimension plus the blacklist and the
/// area model the stacking rule needs. Interconnect and protocol sets hold link
/// technologies only; NA is implied by 2D.
struct DesignSpace {
    std::vector<int> counts{1, 2, 3, 4, 5, 6};
    bool homogeneous = false;
    std::vector<int> array_dims{kArrayDims.begin(), kArrayDims.end()};
    std::vector<int> tech_nodes{kTechNodes.begin(), kTechNodes.end()};
    std::vector<int> sram_kbs{kSramSizes.begin(), kSramSizes.end()};
    std::vector<AssignOrder> orders{kOrders.begin(), kOrders.end()};
    std::vector<Dataflow> dataflows{kDataflows.begin(), kDataflows.end()};
    std::vector<int> split_k{0, 1};
    std::vector<int> data_sharing{0, 1};
    std::vector<Integration> integrations{kIntegrations.begin(), kIntegrations.end()};
    std::vector<Interconnect> interconnects{kLinkInterconnects.begin(), kLinkInterconnects.end()};
    std::vector<Memory> memories{kMemories.begin(), kMemories.end()};
    std::vector<Protocol> protocols{kLinkProtocols.begin(), kLinkProtocols.end()};
    std::vector<Topology> topologies{kTopologies.begin(), kTopologies.end()};
    Blacklist blacklist;
    AreaFn area_of;

    static DesignSpace full(Blacklist blacklist, AreaFn area_of);

    /// Throws ParseError if a subset is not contained in the current set.
    [[nodiscard]] DesignSpace restricted(const Restriction& r) const;

    [[nodiscard]] std::vector<double> areas(const SystemConfig& cfg) const;
    [[nodiscard]] bool contains(const SystemConfig& cfg) const;
    /// Feasibility plus membership in this (possibly restricted) space.
    [[nodiscard]] Feasibility check(const SystemConfig& cfg) const;
    [[nodiscard]] bool feasible(const SystemConfig& cfg) const { return check(cfg).ok(); }

    /// Chiplet types in lexicographic (array, node, sram) order.
    [[nodiscard]] std::vector<ChipletSpec> chiplet_types() const;
    /// Legal integration/link tuples for `count` chiplets; memory and topology left default.
    [[nodiscard]] std::vector<PackageSpec> package_links(int count) const;
};

/// Lazy lexicographic enumeration of every feasible configuration of a space.
/// Nesting (outer to inner): count, chiplet tuple, integration/links, memory,
/// topology, order, dataflow, split_k, data_sharing.
class Enumerator {
public:
    explicit Enumerator(const DesignSpace& space);

    std::optional<SystemConfig> next();

    /// Size of the candidate product that enumeration walks (an upper bound on
    /// the number of feasible configs).
    [[nodiscard]] std::uint64_t candidate_count() const { return candidates_; }

private:
    bool load_count();
    void build_current(SystemConfig& cfg) const;
    void advance();

    const DesignSpace& space_;
    std::vector<ChipletSpec> types_;
    std::vector<double> type_areas_;
    std::vector<PackageSpec> packages_;
    std::size_t tail_size_ = 0;
    std::uint64_t candidates_ = 0;

    std::size_t count_idx_ = 0;
    std::vector<std::size_t> digits_;
    std::size_t tail_ = 0;
    bool done_ = false;
};

std::uint64_t candidate_count(const DesignSpace& space);

/// Draws one configuration per dimension uniformly (NA links for 2D) and
/// resamples until feasible. `draws` accumulates the attempts made.
std::optional<SystemConfig> sample_one(const DesignSpace& space, Rng& rng, std::uint64_t max_draws,
                                       std::uint64_t& draws);

inline constexpr std::uint64_t kRejectionBudget = 10'000'000;

/// Throws SpaceError once kRejectionBudget draws are spent.
std::vector<SystemConfig> sample_uniform(const DesignSpace& space, std::size_t n, std::uint64_t seed);

}  // namespace chipdse
