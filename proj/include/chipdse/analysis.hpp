// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chipdse/cost.hpp"
#include "chipdse/design_space.hpp"

namespace chipdse {

struct ParetoPoint {
    double runtime_s = 0;
    double cost = 0;
    std::string label;

    bool operator==(const ParetoPoint&) const = default;
};

/// Weak dominance: no worse on both axes and strictly better on one.
bool dominates(const ParetoPoint& p, const ParetoPoint& q);

/// Non-dominated points sorted by runtime (then cost, then label). Exact
/// duplicates are all kept. Throws SpaceError on empty input.
std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points);

/// Scatter with log-scale runtime; frontier points highlighted and joined.
std::string pareto_svg(const std::vector<ParetoPoint>& points, const std::vector<ParetoPoint>& frontier,
                       const std::string& title);

/// Reads label/runtime_s/cost columns ("best_cost" accepted for cost; label optional).
std::vector<ParetoPoint> read_pareto_csv(const std::filesystem::path& path);
void write_pareto_csv(std::ostream& out, const std::vector<ParetoPoint>& points);

inline constexpr std::uint64_t kBruteForceCap = 1'000'000;

struct OracleResult {
    std::string description;
    std::uint64_t candidates = 0;
    std::uint64_t enumerated = 0;  // feasible configs evaluated
    SystemConfig best_config;
    double best_cost = 0;
    double runtime_s = 0;
};

/// Exhaustive minimum over `space`. Throws CapExceededError when the candidate
/// product exceeds `cap`, SpaceError when nothing is feasible.
OracleResult brute_force(const CostModel& model, const DesignSpace& space, std::uint64_t cap = kBruteForceCap,
                         std::string description = {});

struct SummaryRow {
    std::string method;
    std::string settings;
    double best_cost = 0;
    std::string runtime_s;  // empty when the run recorded no wall-clock
    std::uint64_t evaluations = 0;
};

inline constexpr std::string_view kSummaryHeader = "method,settings,best_cost,runtime_s,evaluations";

/// One row per run, or per setting for SA grids. Throws ParseError on a malformed directory.
std::vector<SummaryRow> summarize_run(const std::filesystem::path& run_dir);
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace chipdse
