// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chipdse/backend.hpp"
#include "chipdse/context_store.hpp"
#include "chipdse/cost.hpp"
#include "chipdse/design_space.hpp"

namespace chipdse {

struct AgentRunSettings {
    int n_agents = 100;
    int max_iterations = 10;
    Effort effort = Effort::Medium;
    std::uint64_t seed = 7;
    int plan_size = 5;
    bool timestamps = true;
    int repair_rounds = 3;
    unsigned workers = 0;  // 0: hardware concurrency

    void validate() const;
};

struct ExplorationPlan {
    int plan_id = 0;  // 1-based ordinal within the iteration
    std::vector<SystemConfig> configs;
    std::string rationale;
    std::string target_region;
};

struct Evaluation {
    SystemConfig config;
    std::string canonical;
    PpacReport report;
    NormalizedMetrics normalized;
    double cost = 0;
};

struct FieldResult {
    int plan_id = 0;
    std::size_t config_count = 0;
    std::vector<Evaluation> evaluations;
    std::optional<std::size_t> best;  // index into evaluations
    bool failed = false;
    std::string diagnostic;
    std::string rationale;
    std::string target_region;
};

struct RunOutcome {
    SystemConfig best_config;
    double best_cost = 0;
    std::filesystem::path dir;
    std::uint64_t evaluations = 0;
    double runtime_s = 0;
    std::vector<double> best_per_iteration;
};

/// Admin/field loop: orchestrate (plans from the backend, validated), explore
/// (plans evaluated in parallel), evaluate-and-merge (context files updated).
class Orchestrator {
public:
    Orchestrator(CostModel model, DesignSpace space, AgentRunSettings settings,
                 std::shared_ptr<ReasoningBackend> backend);

    [[nodiscard]] PlanRequest build_request(const ContextStore& ctx, int iteration) const;

    /// Exactly n_agents feasible plans. `backend_used` and `admin_notes` report
    /// fallbacks and replacements for the knowhow log.
    std::vector<ExplorationPlan> orchestrate(const ContextStore& ctx, int iteration, std::string& backend_used,
                                             std::vector<std::string>& admin_notes);

    [[nodiscard]] std::vector<FieldResult> explore(const std::vector<ExplorationPlan>& plans) const;

    void evaluate_and_merge(ContextStore& ctx, const std::vector<FieldResult>& results, int iteration,
                            const std::string& backend_used, const std::vector<std::string>& admin_notes) const;

    RunOutcome run(ContextStore& ctx);

    [[nodiscard]] const AgentRunSettings& settings() const { return settings_; }

private:
    std::vector<ExplorationPlan> validate(const PlanRequest& req, PlanResponse response, ReasoningBackend& backend,
                                          std::vector<std::string>& notes) const;

    CostModel model_;
    DesignSpace space_;
    AgentRunSettings settings_;
    std::shared_ptr<ReasoningBackend> backend_;
    std::shared_ptr<HeuristicBackend> fallback_;
};

}  // namespace chipdse
