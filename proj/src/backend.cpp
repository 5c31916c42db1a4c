// SPDX-License-Identifier: Apache-2.0
#include "chipdse/backend.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "chipdse/errors.hpp"
#include "chipdse/rng.hpp"
#include "chipdse/sa.hpp"
#include "chipdse/shorthand.hpp"

namespace chipdse {
namespace {

constexpr std::uint64_t kPlanDraws = 1'000'000;

SystemConfig draw(const DesignSpace& space, Rng& rng, const DesignSpace& fallback) {
    std::uint64_t draws = 0;
    if (auto cfg = sample_one(space, rng, kPlanDraws, draws)) return *cfg;
    draws = 0;
    if (auto cfg = sample_one(fallback, rng, kPlanDraws, draws)) return *cfg;
    throw SpaceError("heuristic backend: no feasible configuration could be sampled");
}

}  // namespace

std::string truncate_digest(const std::string& digest, std::size_t limit) {
    if (digest.size() <= limit) return digest;
    const std::string marker = "\n[digest truncated]\n";
    if (limit <= marker.size()) return digest.substr(0, limit);
    std::size_t cut = digest.rfind('\n', limit - marker.size());
    if (cut == std::string::npos) cut = limit - marker.size();
    return digest.substr(0, cut) + marker;
}

std::string_view to_string(Effort e) {
    switch (e) {
        case Effort::Low: return "low";
        case Effort::Medium: return "medium";
        case Effort::High: return "high";
        case Effort::XHigh: return "xhigh";
    }
    return "medium";
}

std::optional<Effort> effort_from(std::string_view s) {
    std::string lower;
    for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto e : {Effort::Low, Effort::Medium, Effort::High, Effort::XHigh}) {
        if (to_string(e) == lower) return e;
    }
    return std::nullopt;
}

HeuristicBackend::HeuristicBackend(DesignSpace space, std::uint64_t seed) : space_(std::move(space)), seed_(seed) {
    auto counts = space_.counts;
    std::ranges::sort(counts);
    for (int c : counts) {
        const auto tuples = space_.package_links(c);
        for (auto integ : kIntegrations) {
            const bool legal = std::ranges::any_of(tuples, [&](const PackageSpec& p) { return p.integration == integ; });
            if (legal) strata_.emplace_back(c, integ);
        }
    }
}

std::vector<std::pair<int, Integration>> HeuristicBackend::strata() const { return strata_; }

RawPlan HeuristicBackend::coverage_plan(const PlanRequest& req, int plan_id) const {
    Rng rng(derive_seed(seed_, {static_cast<std::uint64_t>(req.iteration), static_cast<std::uint64_t>(plan_id),
                                static_cast<std::uint64_t>(req.round)}));
    RawPlan plan;
    DesignSpace sub = space_;
    std::string region = "whole space";
    if (!strata_.empty() && !space_.dataflows.empty()) {
        const auto n = static_cast<std::size_t>(plan_id);
        const auto& [count, integ] = strata_[n % strata_.size()];
        const Dataflow df = space_.dataflows[(n / strata_.size()) % space_.dataflows.size()];
        sub.counts = {count};
        sub.integrations = {integ};
        sub.dataflows = {df};
        region = fmt::format("count={} integration={} dataflow={}", count, to_string(integ), to_string(df));
    }
    for (int j = 0; j < req.plan_size; ++j) plan.configs.push_back(format_config(draw(sub, rng, space_)));
    plan.rationale = fmt::format("broad coverage of {}", region);
    plan.target_region = region;
    return plan;
}

RawPlan HeuristicBackend::climb_plan(const PlanRequest& req, int plan_id, const std::vector<SystemConfig>& best) const {
    Rng rng(derive_seed(seed_, {static_cast<std::uint64_t>(req.iteration), static_cast<std::uint64_t>(plan_id),
                                static_cast<std::uint64_t>(req.round)}));
    // Rank-weighted choice: rank r of R gets weight R - r.
    const std::size_t r_count = best.size();
    const std::uint64_t total = r_count * (r_count + 1) / 2;
    std::uint64_t ticket = rng.index(total);
    std::size_t rank = 0;
    for (; rank < r_count; ++rank) {
        const std::uint64_t w = r_count - rank;
        if (ticket < w) break;
        ticket -= w;
    }
    const SystemConfig& base = best[rank];

    RawPlan plan;
    const int mutations = mutation_count(req.plan_size);
    for (int j = 0; j < mutations; ++j) plan.configs.push_back(format_config(neighbor(base, space_, rng).config));
    for (int j = mutations; j < req.plan_size; ++j) plan.configs.push_back(format_config(draw(space_, rng, space_)));
    plan.rationale = fmt::format("hill-climb around best rank {} with {} random probe(s)", rank + 1,
                                 req.plan_size - mutations);
    plan.target_region = fmt::format("neighborhood of {}", format_config(base));
    return plan;
}

PlanResponse HeuristicBackend::generate(const PlanRequest& req) {
    if (req.n_plans < 1) throw BackendError("plan request needs n_plans >= 1");
    if (req.plan_size < 1 || req.plan_size > kMaxPlanSize)
        throw BackendError(fmt::format("plan size must lie in 1..{}", kMaxPlanSize));
    std::vector<SystemConfig> best;
    if (req.iteration > 1) {
        for (const auto& text : req.best_configs) {
            try {
                auto cfg = parse_config(text);
                if (space_.check(cfg).ok()) best.push_back(std::move(cfg));
            } catch (const ParseError&) {
                // Unusable rows are skipped; an empty table falls back to coverage.
            }
        }
    }
    PlanResponse out;
    out.plans.reserve(req.n_plans);
    for (int p = 0; p < req.n_plans; ++p)
        out.plans.push_back(best.empty() ? coverage_plan(req, p) : climb_plan(req, p, best));
    return out;
}

}  // namespace chipdse
