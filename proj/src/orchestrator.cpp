// SPDX-License-Identifier: Apache-2.0
#include "chipdse/orchestrator.hpp"

#include <algorithm>
#include <array>
#include <chrono>

#include <fmt/format.h>

#include "chipdse/csv.hpp"
#include "chipdse/errors.hpp"
#include "chipdse/parallel.hpp"
#include "chipdse/rng.hpp"
#include "chipdse/shorthand.hpp"

namespace chipdse {
namespace {

constexpr std::uint64_t kResampleTag = 0xFA11;

struct Slot {
    std::optional<SystemConfig> config;
    std::string problem;
};

// Parses and checks one backend-proposed config string.
Slot check_text(const std::string& text, const DesignSpace& space) {
    Slot s;
    try {
        auto cfg = parse_config(text);
        const auto f = space.check(cfg);
        if (f.ok()) {
            s.config = std::move(cfg);
        } else {
            std::string ids;
            for (const auto& v : f.violations) ids += (ids.empty() ? "" : " ") + v;
            s.problem = fmt::format("'{}' violates {}", text, ids);
        }
    } catch (const ParseError& e) {
        s.problem = fmt::format("'{}' does not parse: {}", text, e.what());
    }
    return s;
}

std::string largest_term(const NormalizedMetrics& m, const Profile& p) {
    const std::array<std::pair<double, const char*>, 4> terms{{{p.alpha * m.energy, "energy"},
                                                               {p.beta * m.area, "area"},
                                                               {p.gamma * m.latency, "latency"},
                                                               {p.theta * m.cost, "cost"}}};
    const auto it = std::max_element(terms.begin(), terms.end(),
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return it->second;
}

}  // namespace

void AgentRunSettings::validate() const {
    if (n_agents < 1) throw ParseError("agent run needs n_agents >= 1");
    if (max_iterations < 1) throw ParseError("agent run needs max_iterations >= 1");
    if (plan_size < 1 || plan_size > kMaxPlanSize) throw ParseError(fmt::format("plan size must lie in 1..{}", kMaxPlanSize));
    if (repair_rounds < 0) throw ParseError("repair rounds must be >= 0");
}

Orchestrator::Orchestrator(CostModel model, DesignSpace space, AgentRunSettings settings,
                           std::shared_ptr<ReasoningBackend> backend)
    : model_(std::move(model)),
      space_(std::move(space)),
      settings_(settings),
      backend_(std::move(backend)),
      fallback_(std::make_shared<HeuristicBackend>(space_, settings.seed)) {
    settings_.validate();
    if (!backend_) backend_ = fallback_;
}

PlanRequest Orchestrator::build_request(const ContextStore& ctx, int iteration) const {
    PlanRequest req;
    req.workload = model_.workload;
    req.profile = model_.profile;
    req.iteration = iteration;
    req.n_plans = settings_.n_agents;
    req.plan_size = settings_.plan_size;
    req.agents_doc = ctx.docs().agents;
    req.model_info_doc = ctx.docs().model_info;
    req.blacklist_doc = ctx.docs().blacklist;
    req.effort = settings_.effort;
    if (iteration > 1) {
        req.digest = ctx.digest();
        for (const auto& b : ctx.best()) req.best_configs.push_back(b.config);
    }
    return req;
}

std::vector<ExplorationPlan> Orchestrator::orchestrate(const ContextStore& ctx, int iteration,
                                                       std::string& backend_used,
                                                       std::vector<std::string>& admin_notes) {
    const PlanRequest req = build_request(ctx, iteration);
    ReasoningBackend* active = backend_.get();
    PlanResponse response;
    try {
        response = active->generate(req);
    } catch (const std::exception& e) {
        if (active == fallback_.get()) throw;
        admin_notes.push_back(fmt::format("backend '{}' failed ({}); heuristic fallback used for this iteration",
                                          active->name(), e.what()));
        active = fallback_.get();
        response = active->generate(req);
    }
    backend_used = active == backend_.get() ? active->name() : "heuristic(fallback)";
    if (!response.insights.empty()) admin_notes.push_back("insights: " + response.insights);
    return validate(req, std::move(response), *active, admin_notes);
}

std::vector<ExplorationPlan> Orchestrator::validate(const PlanRequest& req, PlanResponse response,
                                                    ReasoningBackend& backend, std::vector<std::string>& notes) const {
    const auto n = static_cast<std::size_t>(settings_.n_agents);
    const std::size_t returned = response.plans.size();
    if (returned > n) {
        notes.push_back(fmt::format("backend returned {} plans; kept the first {}", returned, n));
        response.plans.resize(n);
    }

    std::vector<ExplorationPlan> plans(n);
    std::vector<std::vector<Slot>> slots(n);
    std::vector<std::pair<std::size_t, std::size_t>> open;
    std::vector<std::string> problems;
    for (std::size_t p = 0; p < n; ++p) {
        plans[p].plan_id = static_cast<int>(p + 1);
        if (p < response.plans.size()) {
            auto& raw = response.plans[p];
            plans[p].rationale = raw.rationale;
            plans[p].target_region = raw.target_region;
            if (raw.configs.size() > static_cast<std::size_t>(kMaxPlanSize)) raw.configs.resize(kMaxPlanSize);
            for (const auto& text : raw.configs) slots[p].push_back(check_text(text, space_));
        } else {
            plans[p].rationale = "backfill";
            plans[p].target_region = "uniform sample";
        }
        if (slots[p].empty()) slots[p].resize(settings_.plan_size);
        for (std::size_t j = 0; j < slots[p].size(); ++j) {
            if (slots[p][j].config) continue;
            open.emplace_back(p, j);
            if (!slots[p][j].problem.empty()) problems.push_back(slots[p][j].problem);
        }
    }
    if (returned < n) notes.push_back(fmt::format("backend returned {} of {} plans; backfilled the rest", returned, n));

    const std::size_t rejected = problems.size();
    std::size_t requeried = 0;
    for (int round = 1; round <= settings_.repair_rounds && !problems.empty() && !open.empty(); ++round) {
        PlanRequest again = req;
        again.round = round;
        std::string note;
        for (std::size_t i = 0; i < problems.size() && i < 20; ++i) note += (i ? "; " : "") + problems[i];
        again.repair_note = note;
        PlanResponse fix;
        try {
            fix = backend.generate(again);
        } catch (const std::exception& e) {
            notes.push_back(fmt::format("replacement round {} failed: {}", round, e.what()));
            break;
        }
        std::vector<std::pair<std::size_t, std::size_t>> still;
        problems.clear();
        for (const auto& [p, j] : open) {
            if (p < fix.plans.size() && j < fix.plans[p].configs.size()) {
                auto s = check_text(fix.plans[p].configs[j], space_);
                if (s.config) {
                    slots[p][j] = std::move(s);
                    ++requeried;
                    continue;
                }
                problems.push_back(s.problem);
            }
            still.emplace_back(p, j);
        }
        open = std::move(still);
    }

    for (const auto& [p, j] : open) {
        Rng rng(derive_seed(settings_.seed, {static_cast<std::uint64_t>(req.iteration), p, j, kResampleTag}));
        std::uint64_t draws = 0;
        auto cfg = sample_one(space_, rng, kRejectionBudget, draws);
        if (!cfg) throw SpaceError("no feasible configuration could be sampled to fill a plan");
        slots[p][j].config = std::move(cfg);
    }
    if (rejected > 0) {
        notes.push_back(fmt::format("rejected {} infeasible or malformed config(s); {} replaced by re-query, {} by "
                                    "feasible resampling",
                                    rejected, requeried, rejected - std::min(rejected, requeried)));
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (auto& s : slots[p]) plans[p].configs.push_back(std::move(*s.config));
    }
    return plans;
}

std::vector<FieldResult> Orchestrator::explore(const std::vector<ExplorationPlan>& plans) const {
    std::vector<FieldResult> results(plans.size());
    const unsigned workers = std::min<unsigned>(settings_.workers ? settings_.workers : default_workers(),
                                                static_cast<unsigned>(settings_.n_agents));
    parallel_for(
        plans.size(),
        [&](std::size_t i) {
            const auto& plan = plans[i];
            auto& r = results[i];
            r.plan_id = plan.plan_id;
            r.config_count = plan.configs.size();
            r.rationale = plan.rationale;
            r.target_region = plan.target_region;
            for (const auto& cfg : plan.configs) {
                try {
                    Evaluation e;
                    e.config = cfg;
                    e.canonical = format_config(cfg);
                    e.report = evaluate(model_.workload, cfg, model_.constants);
                    e.normalized = normalize(e.report, model_.basis);
                    e.cost = weighted_cost(e.normalized, model_.profile);
                    r.evaluations.push_back(std::move(e));
                } catch (const Error& ex) {
                    r.failed = true;
                    if (!r.diagnostic.empty()) r.diagnostic += "; ";
                    r.diagnostic += fmt::format("{}: {}", format_config(cfg), ex.what());
                }
            }
            for (std::size_t k = 0; k < r.evaluations.size(); ++k) {
                const auto& e = r.evaluations[k];
                if (!r.best || better(e.cost, e.canonical, r.evaluations[*r.best].cost, r.evaluations[*r.best].canonical))
                    r.best = k;
            }
        },
        workers);
    return results;
}

void Orchestrator::evaluate_and_merge(ContextStore& ctx, const std::vector<FieldResult>& results, int iteration,
                                      const std::string& backend_used,
                                      const std::vector<std::string>& admin_notes) const {
    MergeBatch batch;
    batch.iteration = iteration;
    batch.admin_notes = admin_notes;
    const auto prior = ctx.global_best();
    const std::string stamp = settings_.timestamps ? utc_timestamp() : std::string();

    std::vector<const FieldResult*> ordered;
    for (const auto& r : results) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const FieldResult* a, const FieldResult* b) { return a->plan_id < b->plan_id; });

    for (const FieldResult* r : ordered) {
        for (const auto& e : r->evaluations) {
            ResultRow row;
            row.iteration = iteration;
            row.plan_id = r->plan_id;
            row.config = e.canonical;
            row.energy_j = e.report.energy_j;
            row.area_mm2 = e.report.area_mm2;
            row.latency_s = e.report.latency_s;
            row.mfg_cost_usd = e.report.mfg_cost_usd;
            row.norm_e = e.normalized.energy;
            row.norm_a = e.normalized.area;
            row.norm_l = e.normalized.latency;
            row.norm_c = e.normalized.cost;
            row.weighted_cost = e.cost;
            row.backend = backend_used;
            row.timestamp = stamp;
            batch.rows.push_back(std::move(row));
        }

        KnowhowEntry k;
        k.iteration = iteration;
        k.plan_id = r->plan_id;
        k.configs = static_cast<int>(r->config_count);
        if (r->best) {
            const auto& b = r->evaluations[*r->best];
            k.batch_best = b.cost;
            k.batch_config = b.canonical;
            if (prior) k.delta = b.cost - prior->cost;
            const auto& m = b.normalized;
            k.insight = fmt::format("{}: normalized E {:.3f} A {:.3f} L {:.3f} C {:.3f}, largest weighted term {}",
                                    r->target_region.empty() ? "plan" : r->target_region, m.energy, m.area,
                                    m.latency, m.cost, largest_term(m, model_.profile));
            if (k.delta && *k.delta < 0) k.insight += ", improves the global best";
            if (r->failed) k.insight += "; failures: " + r->diagnostic;
        } else {
            k.insight = "plan failed: " + r->diagnostic;
        }
        batch.knowhow.push_back(std::move(k));
    }
    ctx.merge(batch);
}

RunOutcome Orchestrator::run(ContextStore& ctx) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    out.dir = ctx.dir();
    for (int it = ctx.last_merged_iteration() + 1; it <= settings_.max_iterations; ++it) {
        std::string backend_used;
        std::vector<std::string> notes;
        const auto plans = orchestrate(ctx, it, backend_used, notes);
        const auto results = explore(plans);
        evaluate_and_merge(ctx, results, it, backend_used, notes);
        if (const auto best = ctx.global_best()) out.best_per_iteration.push_back(best->cost);
    }
    const auto best = ctx.global_best();
    if (!best) throw SpaceError("agent run produced no successful evaluation");
    out.best_config = parse_config(best->config);
    out.best_cost = best->cost;
    out.evaluations = ctx.result_rows();
    out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace chipdse
