// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chipdse/types.hpp"

namespace chipdse {

// int8 operands, fp32 accumulators and outputs.
inline constexpr std::int64_t kInputBytes = 1;
inline constexpr std::int64_t kAccBytes = 4;
inline constexpr std::int64_t kOutputBytes = 4;

struct WorkloadSpec {
    std::string name;
    std::int64_t m = 1;  // rows / batch
    std::int64_t k = 1;  // reduction
    std::int64_t n = 1;  // output columns
    std::string label;

    bool operator==(const WorkloadSpec&) const = default;
};

struct ChipletWork {
    std::int64_t m = 0;
    std::int64_t k = 0;
    std::int64_t n = 0;
    std::int64_t macs = 0;
    std::int64_t input_read_bytes = 0;   // operand A (m x k)
    std::int64_t weight_read_bytes = 0;  // operand B (k x n)
    std::int64_t dram_read_bytes = 0;    // input + weight
    std::int64_t dram_write_bytes = 0;
    std::int64_t d2d_send_bytes = 0;

    bool operator==(const ChipletWork&) const = default;
};

struct MappingResult {
    std::vector<ChipletWork> chiplets;  // same order as SystemConfig::chiplets
    std::int64_t total_d2d_bytes = 0;
    std::int64_t shared_dram_savings_bytes = 0;

    bool operator==(const MappingResult&) const = default;
};

/// Loads [{"name","m","k","n"[,"label"]}, ...].
std::vector<WorkloadSpec> load_workloads(const std::filesystem::path& path);
/// The six bundled GEMM workloads WL-1..WL-6.
const std::vector<WorkloadSpec>& builtin_workloads();
/// "WL-6" (case-insensitive, "wl6" and "6" also accepted) or an "m,k,n" triple.
WorkloadSpec resolve_workload(std::string_view text);

/// Chiplet indices in allocation order: by array_dim^2, ascending or
/// descending per the mapping. Equal sizes go by node (smaller first), then
/// SRAM (larger first), then list position.
std::vector<int> allocation_rank(const SystemConfig& cfg);

/// Splits the GEMM across chiplets (N proportional to array_dim^2, or K evenly
/// with split-K) and fills DRAM and partial-sum D2D traffic. Data sharing is
/// not applied here.
MappingResult partition(const WorkloadSpec& wl, const SystemConfig& cfg);

struct DramTraffic {
    std::int64_t input_read_bytes = 0;
    std::int64_t weight_read_bytes = 0;
    std::int64_t write_bytes = 0;
    std::int64_t block_m = 0;
    std::int64_t block_n = 0;

    [[nodiscard]] std::int64_t read_bytes() const { return input_read_bytes + weight_read_bytes; }
};

/// Blocked-reuse DRAM model. Picks (Bm, Bn), multiples of the array size,
/// with Bm*k + k*Bn + 4*Bm*Bn <= SRAM bytes that minimise DRAM reads; among
/// equal-read blocks the dataflow's stationary operand wins (OS: largest
/// Bm*Bn, WS: largest Bn, IS: largest Bm).
DramTraffic dram_traffic(const ChipletWork& work, const ChipletSpec& chip, const MappingSpec& mapping);

/// Broadcast reuse: the chiplet reading the most of a shared operand keeps its
/// DRAM reads, every other chiplet receives that operand over D2D instead.
/// The input operand is shared when N is split; with split-K both operands are.
/// Equal volumes go to the lowest index.
MappingResult apply_data_sharing(const MappingResult& result, const MappingSpec& mapping);

/// As above, but equal volumes are settled by chiplet spec and work shape so
/// the owner does not depend on list order.
MappingResult apply_data_sharing(const MappingResult& result, const MappingSpec& mapping,
                                 const std::vector<ChipletSpec>& chiplets);

/// partition followed by apply_data_sharing.
MappingResult map_workload(const WorkloadSpec& wl, const SystemConfig& cfg);

}  // namespace chipdse
