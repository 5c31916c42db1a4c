// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chipdse/cost.hpp"
#include "chipdse/design_space.hpp"
#include "chipdse/mapping.hpp"

namespace chipdse {

enum class Effort : std::uint8_t { Low, Medium, High, XHigh };
std::string_view to_string(Effort e);
std::optional<Effort> effort_from(std::string_view s);

/// A plan as emitted by a backend, before validation: configs are canonical strings.
struct RawPlan {
    std::vector<std::string> configs;
    std::string rationale;
    std::string target_region;

    bool operator==(const RawPlan&) const = default;
};

struct PlanRequest {
    WorkloadSpec workload;
    Profile profile;
    int iteration = 1;
    int n_plans = 1;
    int plan_size = 5;  // configs per plan, 1..8
    std::string agents_doc;
    std::string model_info_doc;
    std::string blacklist_doc;
    std::string digest;                     // evolving context; empty on iteration 1
    std::vector<std::string> best_configs;  // best table, best first; empty on iteration 1
    Effort effort = Effort::Medium;
    int round = 0;            // > 0 when re-asking for replacements of rejected configs
    std::string repair_note;  // why configs were rejected (round > 0)
};

struct PlanResponse {
    std::vector<RawPlan> plans;
    std::string insights;

    bool operator==(const PlanResponse&) const = default;
};

class ReasoningBackend {
public:
    virtual ~ReasoningBackend() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    /// Must be safe to call concurrently. Throws BackendError on failure.
    virtual PlanResponse generate(const PlanRequest& req) = 0;
};

inline constexpr int kMaxPlanSize = 8;
inline constexpr std::size_t kDigestLimit = 32 * 1024;

/// Keeps the head of `digest` within `limit` bytes, cutting at a line boundary.
std::string truncate_digest(const std::string& digest, std::size_t limit = kDigestLimit);

/// Number of hill-climbing mutations in a plan of `plan_size` configs; the rest are random.
inline int mutation_count(int plan_size) { return plan_size * 4 / 5; }

/// Offline deterministic backend. Iteration 1 (or an empty best table) gives
/// stratified coverage over (count, integration) pairs and dataflows; later
/// iterations hill-climb from rank-weighted best-table entries with a 20%
/// share of uniform samples. Every draw is seeded from (seed, iteration, plan, round).
class HeuristicBackend final : public ReasoningBackend {
public:
    HeuristicBackend(DesignSpace space, std::uint64_t seed);

    [[nodiscard]] std::string name() const override { return "heuristic"; }
    PlanResponse generate(const PlanRequest& req) override;

    /// Legal (count, integration) pairs of the space, count-major.
    [[nodiscard]] std::vector<std::pair<int, Integration>> strata() const;

private:
    RawPlan coverage_plan(const PlanRequest& req, int plan_id) const;
    RawPlan climb_plan(const PlanRequest& req, int plan_id, const std::vector<SystemConfig>& best) const;

    DesignSpace space_;
    std::uint64_t seed_;
    std::vector<std::pair<int, Integration>> strata_;
};

}  // namespace chipdse
