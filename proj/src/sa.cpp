// SPDX-License-Identifier: Apache-2.0
#include "chipdse/sa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chipdse/errors.hpp"
#include "chipdse/parallel.hpp"
#include "chipdse/shorthand.hpp"

namespace chipdse {
namespace {

constexpr int kNeighborAttempts = 50;

auto links_key(const PackageSpec& p) {
    return std::tuple{p.integration, p.interconnect, p.protocol, p.lateral_interconnect, p.lateral_protocol};
}

void set_links(PackageSpec& dst, const PackageSpec& src) {
    dst.integration = src.integration;
    dst.interconnect = src.interconnect;
    dst.protocol = src.protocol;
    dst.lateral_interconnect = src.lateral_interconnect;
    dst.lateral_protocol = src.lateral_protocol;
}

template <typename T>
std::vector<T> others(const std::vector<T>& values, const T& current) {
    std::vector<T> out;
    for (const auto& v : values) {
        if (!(v == current)) out.push_back(v);
    }
    return out;
}

template <typename Pred>
std::vector<PackageSpec> filter(const std::vector<PackageSpec>& tuples, Pred pred) {
    std::vector<PackageSpec> out;
    for (const auto& t : tuples) {
        if (pred(t)) out.push_back(t);
    }
    return out;
}

struct Candidates {
    std::vector<PackageSpec> integration;
    std::vector<PackageSpec> interconnect;
    std::vector<PackageSpec> protocol;
};

Candidates link_candidates(const SystemConfig& cfg, const DesignSpace& space) {
    const auto tuples = space.package_links(cfg.count());
    const auto& p = cfg.package;
    Candidates c;
    c.integration = filter(tuples, [&](const PackageSpec& t) { return t.integration != p.integration; });
    c.interconnect = filter(tuples, [&](const PackageSpec& t) {
        return t.integration == p.integration &&
               std::tie(t.interconnect, t.lateral_interconnect) != std::tie(p.interconnect, p.lateral_interconnect);
    });
    c.protocol = filter(tuples, [&](const PackageSpec& t) {
        return t.integration == p.integration &&
               std::tie(t.interconnect, t.lateral_interconnect) == std::tie(p.interconnect, p.lateral_interconnect) &&
               std::tie(t.protocol, t.lateral_protocol) != std::tie(p.protocol, p.lateral_protocol);
    });
    return c;
}

// Resizes the chiplet list (cloning or dropping the last die) and keeps the
// package links if they are still legal, else redraws them.
bool change_count(SystemConfig& x, const DesignSpace& space, Rng& rng) {
    const auto choices = others(space.counts, x.count());
    if (choices.empty()) return false;
    const int target = choices[rng.index(choices.size())];
    while (x.count() < target) x.chiplets.push_back(x.chiplets.back());
    while (x.count() > target) x.chiplets.pop_back();
    const auto tuples = space.package_links(target);
    if (tuples.empty()) return false;
    for (const auto& t : tuples) {
        if (links_key(t) == links_key(x.package)) return true;
    }
    auto same = filter(tuples, [&](const PackageSpec& t) { return t.integration == x.package.integration; });
    const auto& pool = same.empty() ? tuples : same;
    set_links(x.package, pool[rng.index(pool.size())]);
    return true;
}

template <typename Field>
bool change_chiplet(SystemConfig& x, const std::vector<int>& values, Field field, bool homogeneous, Rng& rng) {
    const std::size_t i = rng.index(x.chiplets.size());
    const auto choices = others(values, x.chiplets[i].*field);
    if (choices.empty()) return false;
    const int v = choices[rng.index(choices.size())];
    if (homogeneous) {
        for (auto& c : x.chiplets) c.*field = v;
    } else {
        x.chiplets[i].*field = v;
    }
    return true;
}

template <typename T>
bool change_value(T& field, const std::vector<T>& values, Rng& rng) {
    const auto choices = others(values, field);
    if (choices.empty()) return false;
    field = choices[rng.index(choices.size())];
    return true;
}

bool change_flag(bool& field, const std::vector<int>& values, Rng& rng) {
    int v = field ? 1 : 0;
    if (!change_value(v, values, rng)) return false;
    field = v != 0;
    return true;
}

}  // namespace

void SaSettings::validate() const {
    if (!(t0 > t_final && t_final > 0)) throw ParseError("SA settings need t0 > t_final > 0");
    if (!(rate > 0 && rate < 1)) throw ParseError("SA cooling rate must lie in (0, 1)");
    if (moves_per_temp < 1) throw ParseError("SA moves per temperature must be >= 1");
    if (eval_budget < 1) throw ParseError("SA evaluation budget must be >= 1");
    if (!(cost_scale > 0)) throw ParseError("SA cost scale must be > 0");
}

NeighborResult neighbor(const SystemConfig& cfg, const DesignSpace& space, Rng& rng) {
    const auto links = link_candidates(cfg, space);
    std::vector<MoveDim> dims;
    auto add_if = [&dims](bool ok, MoveDim d) {
        if (ok) dims.push_back(d);
    };
    add_if(space.counts.size() > 1, MoveDim::Count);
    add_if(space.array_dims.size() > 1, MoveDim::ArrayDim);
    add_if(space.tech_nodes.size() > 1, MoveDim::TechNode);
    add_if(space.sram_kbs.size() > 1, MoveDim::SramKb);
    add_if(space.orders.size() > 1, MoveDim::Order);
    add_if(space.dataflows.size() > 1, MoveDim::Dataflow);
    add_if(space.split_k.size() > 1, MoveDim::SplitK);
    add_if(space.data_sharing.size() > 1, MoveDim::DataSharing);
    add_if(!links.integration.empty(), MoveDim::Integration);
    add_if(!links.interconnect.empty(), MoveDim::Interconnect);
    add_if(space.memories.size() > 1, MoveDim::Memory);
    add_if(!links.protocol.empty(), MoveDim::Protocol);
    add_if(space.topologies.size() > 1, MoveDim::Topology);
    if (dims.empty()) return {cfg, MoveDim::Count, true};

    for (int attempt = 0; attempt < kNeighborAttempts; ++attempt) {
        const MoveDim d = dims[rng.index(dims.size())];
        SystemConfig x = cfg;
        bool changed = false;
        switch (d) {
            case MoveDim::Count: changed = change_count(x, space, rng); break;
            case MoveDim::ArrayDim:
                changed = change_chiplet(x, space.array_dims, &ChipletSpec::array_dim, space.homogeneous, rng);
                break;
            case MoveDim::TechNode:
                changed = change_chiplet(x, space.tech_nodes, &ChipletSpec::tech_node, space.homogeneous, rng);
                break;
            case MoveDim::SramKb:
                changed = change_chiplet(x, space.sram_kbs, &ChipletSpec::sram_kb, space.homogeneous, rng);
                break;
            case MoveDim::Order: changed = change_value(x.mapping.order, space.orders, rng); break;
            case MoveDim::Dataflow: changed = change_value(x.mapping.dataflow, space.dataflows, rng); break;
            case MoveDim::SplitK: changed = change_flag(x.mapping.split_k, space.split_k, rng); break;
            case MoveDim::DataSharing: changed = change_flag(x.mapping.data_sharing, space.data_sharing, rng); break;
            case MoveDim::Integration:
                set_links(x.package, links.integration[rng.index(links.integration.size())]);
                changed = true;
                break;
            case MoveDim::Interconnect:
                set_links(x.package, links.interconnect[rng.index(links.interconnect.size())]);
                changed = true;
                break;
            case MoveDim::Protocol:
                set_links(x.package, links.protocol[rng.index(links.protocol.size())]);
                changed = true;
                break;
            case MoveDim::Memory: changed = change_value(x.package.memory, space.memories, rng); break;
            case MoveDim::Topology: changed = change_value(x.package.topology, space.topologies, rng); break;
        }
        if (changed && x != cfg && space.check(x).ok()) return {std::move(x), d, false};
    }
    return {cfg, MoveDim::Count, true};
}

double accept_probability(double delta, double t) {
    if (delta <= 0) return 1.0;
    if (t <= 0) return 0.0;
    return std::exp(-delta / t);
}

SaTrace anneal(const CostModel& model, const DesignSpace& space, const SaSettings& s) {
    s.validate();
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(s.seed, {0x5A, 1}));
    std::uint64_t draws = 0;
    auto first = sample_one(space, rng, kRejectionBudget, draws);
    if (!first) throw SpaceError("annealing: no feasible starting configuration found");

    SaTrace trace;
    SystemConfig current = std::move(*first);
    double current_cost = model.cost(current);
    trace.best_config = current;
    trace.best_cost = current_cost;
    trace.records.push_back({0, s.t0, current_cost, true, current});
    trace.best_so_far.push_back(current_cost);

    std::uint64_t evals = 1;
    for (double t = s.t0; t >= s.t_final && evals < s.eval_budget; t *= s.rate) {
        for (int move = 0; move < s.moves_per_temp && evals < s.eval_budget; ++move) {
            auto nb = neighbor(current, space, rng);
            if (nb.null_move) ++trace.null_moves;
            const double cost = model.cost(nb.config);
            const double delta = (cost - current_cost) * s.cost_scale;
            const bool accepted = delta <= 0 || rng.uniform01() < accept_probability(delta, t);
            trace.records.push_back({evals, t, cost, accepted, nb.config});
            ++evals;
            if (cost < trace.best_cost) {
                trace.best_cost = cost;
                trace.best_config = nb.config;
            }
            trace.best_so_far.push_back(trace.best_cost);
            if (accepted) {
                current = std::move(nb.config);
                current_cost = cost;
            }
        }
    }
    trace.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return trace;
}

std::vector<double> default_t0_range() {
    std::vector<double> out;
    for (int t = 4000; t <= 10000; t += 500) out.push_back(t);
    return out;
}

std::vector<double> default_rate_range() {
    std::vector<double> out;
    for (int r = 70; r <= 99; ++r) out.push_back(r / 100.0);
    return out;
}

std::vector<GridPoint> grid_sweep(const CostModel& model, const DesignSpace& space, const SaSettings& base,
                                  const std::vector<double>& t0s, const std::vector<double>& rates) {
    if (t0s.empty() || rates.empty()) throw ParseError("SA grid ranges must be non-empty");
    std::vector<GridPoint> points;
    for (double t0 : t0s) {
        for (double rate : rates) {
            GridPoint g;
            g.settings = base;
            g.settings.t0 = t0;
            g.settings.rate = rate;
            g.settings.validate();
            points.push_back(std::move(g));
        }
    }
    parallel_for(points.size(), [&](std::size_t i) {
        auto& g = points[i];
        const auto trace = anneal(model, space, g.settings);
        g.best_config = trace.best_config;
        g.best_cost = trace.best_cost;
        g.evaluations = trace.records.size();
        g.runtime_s = trace.wall_s;
    });
    return points;
}

void write_trace_csv(std::ostream& out, const SaTrace& trace) {
    out << "eval_idx,temperature,cost,accepted,config\n";
    for (const auto& r : trace.records) {
        fmt::print(out, "{},{:.10g},{:.10g},{},{}\n", r.eval_idx, r.temperature, r.cost, r.accepted ? 1 : 0,
                   format_config(r.config));
    }
}

}  // namespace chipdse
