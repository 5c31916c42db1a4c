// SPDX-License-Identifier: Apache-2.0
#include "chipdse/ppac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "chipdse/errors.hpp"

namespace chipdse {
namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

constexpr double kPj = 1e-12;

struct Box {
    double w = 0;
    double h = 0;
};

// Sides of squares, sorted descending. Greedy split into two area-balanced
// groups, recurse with the other cut axis, then abut the halves along `horizontal`.
Box floorplan(const std::vector<double>& sides, bool horizontal) {
    if (sides.empty()) return {};
    if (sides.size() == 1) return {sides[0], sides[0]};
    std::vector<double> a, b;
    double sa = 0, sb = 0;
    for (double s : sides) {
        if (sa <= sb) {
            a.push_back(s);
            sa += s * s;
        } else {
            b.push_back(s);
            sb += s * s;
        }
    }
    const Box ba = floorplan(a, !horizontal);
    const Box bb = floorplan(b, !horizontal);
    if (horizontal) return {ba.w + bb.w, std::max(ba.h, bb.h)};
    return {std::max(ba.w, bb.w), ba.h + bb.h};
}

double lane_bandwidth(double lanes, Protocol p, Topology t, const ModelConstants& c) {
    const auto& proto = c.of(p);
    return lanes * proto.lane_rate_gbps * 1e9 * proto.efficiency * c.of(t).bw_derate / 8.0;
}

// Base (bottom) die of every stack.
std::vector<double> base_areas(const SystemConfig& cfg, std::span<const double> areas) {
    std::vector<double> out;
    for (const auto& stack : stacks_of(cfg)) {
        double a = 0;
        for (int i : stack) a = std::max(a, areas[i]);
        out.push_back(a);
    }
    return out;
}

double vertical_bandwidth(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c) {
    double min_area = std::numeric_limits<double>::infinity();
    for (const auto& stack : stacks_of(cfg)) {
        for (std::size_t j = 1; j < stack.size(); ++j)
            min_area = std::min({min_area, areas[stack[j - 1]], areas[stack[j]]});
    }
    if (!std::isfinite(min_area)) return std::numeric_limits<double>::infinity();
    const double pitch = c.of(cfg.package.interconnect).bump_pitch_um;
    const double lanes = std::floor(min_area * 1e6 / (pitch * pitch)) * c.bump_utilization;
    return lane_bandwidth(lanes, cfg.package.protocol, cfg.package.topology, c);
}

double lateral_bandwidth(std::span<const double> die_areas, Interconnect ic, Protocol p, Topology t,
                         const ModelConstants& c) {
    double min_area = std::numeric_limits<double>::infinity();
    for (double a : die_areas) min_area = std::min(min_area, a);
    const double perimeter_um = 4.0 * std::sqrt(min_area) * 1000.0;
    const double lanes = std::floor(perimeter_um / c.of(ic).bump_pitch_um) * c.edge_rows;
    return lane_bandwidth(lanes, p, t, c);
}

}  // namespace

std::int64_t compute_cycles(const ChipletWork& w, const ChipletSpec& chip, Dataflow dataflow) {
    if (w.m <= 0 || w.k <= 0 || w.n <= 0) return 0;
    const std::int64_t a = chip.array_dim;
    switch (dataflow) {
        case Dataflow::OS: return ceil_div(w.m, a) * ceil_div(w.n, a) * (2 * a + w.k - 2);
        case Dataflow::WS: return ceil_div(w.k, a) * ceil_div(w.n, a) * (2 * a + w.m - 2);
        case Dataflow::IS: return ceil_div(w.k, a) * ceil_div(w.m, a) * (2 * a + w.n - 2);
    }
    return 0;
}

double chiplet_area(const ChipletSpec& chip, const ModelConstants& c) {
    const auto& n = c.node(chip.tech_node);
    const double pes = static_cast<double>(chip.array_dim) * chip.array_dim;
    return (pes * n.pe_area_mm2 + chip.sram_kb * n.sram_area_mm2_per_kb) * c.logic_overhead_factor;
}

std::vector<double> chiplet_areas(const SystemConfig& cfg, const ModelConstants& c) {
    std::vector<double> out;
    out.reserve(cfg.chiplets.size());
    for (const auto& chip : cfg.chiplets) out.push_back(chiplet_area(chip, c));
    return out;
}

double d2d_bandwidth(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c) {
    const auto& pkg = cfg.package;
    switch (pkg.integration) {
        case Integration::TwoD:
            throw ModelError("a 2D package has no die-to-die link");
        case Integration::ThreeD:
            return vertical_bandwidth(cfg, areas, c);
        case Integration::TwoPointFiveD:
            return lateral_bandwidth(areas, pkg.interconnect, pkg.protocol, pkg.topology, c);
        case Integration::Hybrid: {
            const auto bases = base_areas(cfg, areas);
            return std::min(vertical_bandwidth(cfg, areas, c),
                            lateral_bandwidth(bases, pkg.lateral_interconnect, pkg.lateral_protocol, pkg.topology, c));
        }
    }
    return 0;
}

double d2d_pj_per_byte(const PackageSpec& pkg, const ModelConstants& c) {
    switch (pkg.integration) {
        case Integration::TwoD: return 0;
        case Integration::Hybrid:
            return std::max(c.of(pkg.interconnect).pj_per_byte, c.of(pkg.lateral_interconnect).pj_per_byte);
        default: return c.of(pkg.interconnect).pj_per_byte;
    }
}

LatencyBreakdown system_latency(const SystemConfig& cfg, const MappingResult& mr, std::span<const double> areas,
                                const ModelConstants& c) {
    LatencyBreakdown out;
    const double mem_bw = c.of(cfg.package.memory).bw_gbps * 1e9;
    double max_write = 0;
    for (std::size_t i = 0; i < cfg.chiplets.size(); ++i) {
        const auto& chip = cfg.chiplets[i];
        const auto& w = mr.chiplets[i];
        const double f = c.node(chip.tech_node).freq_ghz * 1e9;
        const double t = static_cast<double>(compute_cycles(w, chip, cfg.mapping.dataflow)) / f +
                         static_cast<double>(w.dram_read_bytes) / mem_bw;
        out.per_chiplet_s.push_back(t);
        out.compute_s = std::max(out.compute_s, t);
        max_write = std::max(max_write, static_cast<double>(w.dram_write_bytes));
    }
    out.write_s = max_write / mem_bw;
    if (cfg.package.integration != Integration::TwoD && cfg.count() > 1) {
        out.d2d_bandwidth_bps = d2d_bandwidth(cfg, areas, c);
        out.d2d_s = static_cast<double>(mr.total_d2d_bytes) / out.d2d_bandwidth_bps;
    }
    out.latency_s = out.compute_s + out.d2d_s + out.write_s;
    return out;
}

EnergyBreakdown system_energy(const SystemConfig& cfg, const MappingResult& mr, const ModelConstants& c) {
    EnergyBreakdown e;
    const double dram_pj = c.of(cfg.package.memory).dram_pj_per_byte;
    for (std::size_t i = 0; i < cfg.chiplets.size(); ++i) {
        const auto& node = c.node(cfg.chiplets[i].tech_node);
        const auto& w = mr.chiplets[i];
        const double macs = static_cast<double>(w.macs);
        e.dram_j += static_cast<double>(w.dram_read_bytes + w.dram_write_bytes) * dram_pj * kPj;
        e.mac_j += macs * node.mac_pj * kPj;
        e.sram_j += c.sram_bytes_per_mac * macs * node.sram_pj_per_byte * kPj;
    }
    e.d2d_j = static_cast<double>(mr.total_d2d_bytes) * d2d_pj_per_byte(cfg.package, c) * kPj;
    e.energy_j = e.dram_j + e.mac_j + e.sram_j + e.d2d_j;
    return e;
}

AreaBreakdown system_area(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c) {
    AreaBreakdown out;
    const auto integration = cfg.package.integration;
    if (integration == Integration::TwoD || integration == Integration::ThreeD) {
        const double a = areas.empty() ? 0.0 : *std::max_element(areas.begin(), areas.end());
        out.width_mm = out.height_mm = std::sqrt(a);
        out.area_mm2 = a;
        return out;
    }
    std::vector<double> tiles = integration == Integration::Hybrid
                                    ? base_areas(cfg, areas)
                                    : std::vector<double>(areas.begin(), areas.end());
    std::vector<double> sides;
    for (double a : tiles) sides.push_back(std::sqrt(a));
    std::sort(sides.begin(), sides.end(), std::greater<>());
    const Box box = floorplan(sides, true);
    out.width_mm = box.w;
    out.height_mm = box.h;
    out.area_mm2 = box.w * box.h * c.of(integration).whitespace_factor;
    return out;
}

double dies_per_wafer(double area_mm2, const ModelConstants& c) {
    const double d = c.wafer_diameter_mm;
    const double r = d / 2.0;
    return std::numbers::pi * r * r / area_mm2 - std::numbers::pi * d / std::sqrt(2.0 * area_mm2);
}

double die_yield(double area_mm2, double d0, double alpha) { return std::pow(1.0 + area_mm2 * d0 / alpha, -alpha); }

double die_cost(double area_mm2, int tech_node, const ModelConstants& c) {
    const double r = c.wafer_diameter_mm / 2.0;
    if (!(area_mm2 > 0) || area_mm2 >= std::numbers::pi * r * r)
        throw ModelError(fmt::format("die area {:.1f} mm^2 does not fit a {} mm wafer", area_mm2, c.wafer_diameter_mm));
    const double dpw = dies_per_wafer(area_mm2, c);
    if (dpw < 1.0) throw ModelError(fmt::format("die area {:.1f} mm^2 yields no whole die per wafer", area_mm2));
    const auto& node = c.node(tech_node);
    return node.wafer_cost_usd / dpw / die_yield(area_mm2, node.defect_density_per_mm2, c.yield_alpha);
}

CostBreakdown mfg_cost(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c) {
    CostBreakdown out;
    for (std::size_t i = 0; i < cfg.chiplets.size(); ++i) {
        const auto& chip = cfg.chiplets[i];
        out.die_usd.push_back(die_cost(areas[i], chip.tech_node, c));
        out.yields.push_back(die_yield(areas[i], c.node(chip.tech_node).defect_density_per_mm2, c.yield_alpha));
        out.total_usd += out.die_usd.back();
    }
    const auto& pkg = cfg.package;
    const int links = link_count(cfg);
    double link_usd = 0;
    if (pkg.integration == Integration::Hybrid) {
        // One lateral link between the two stacks, the rest are vertical bonds.
        link_usd = c.of(pkg.lateral_interconnect).link_cost_usd +
                   (links - 1) * c.of(pkg.interconnect).link_cost_usd;
    } else if (links > 0) {
        link_usd = links * c.of(pkg.interconnect).link_cost_usd;
    }
    out.package_usd = c.of(pkg.integration).package_base_cost_usd + link_usd / std::pow(c.bond_yield, links);
    out.memory_usd = c.of(pkg.memory).cost_usd;
    out.total_usd += out.package_usd + out.memory_usd;
    return out;
}

PpacReport evaluate(const WorkloadSpec& wl, const SystemConfig& cfg, const ModelConstants& c) {
    PpacReport r;
    r.chiplet_areas_mm2 = chiplet_areas(cfg, c);
    r.mapping = map_workload(wl, cfg);
    r.latency = system_latency(cfg, r.mapping, r.chiplet_areas_mm2, c);
    r.energy = system_energy(cfg, r.mapping, c);
    r.area = system_area(cfg, r.chiplet_areas_mm2, c);
    r.cost = mfg_cost(cfg, r.chiplet_areas_mm2, c);
    r.latency_s = r.latency.latency_s;
    r.energy_j = r.energy.energy_j;
    r.area_mm2 = r.area.area_mm2;
    r.mfg_cost_usd = r.cost.total_usd;
    return r;
}

AreaFn area_model(const ModelConstants& c) {
    return [c](const ChipletSpec& chip) { return chiplet_area(chip, c); };
}

DesignSpace make_space(const ModelConstants& c, Blacklist blacklist) {
    return DesignSpace::full(std::move(blacklist), area_model(c));
}

}  // namespace chipdse
