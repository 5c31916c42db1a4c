// SPDX-License-Identifier: Apache-2.0
#pragma once

// Closed-form surrogates for latency, energy, area and manufacturing cost.

#include <cstdint>
#include <span>
#include <vector>

#include "chipdse/constants.hpp"
#include "chipdse/design_space.hpp"
#include "chipdse/mapping.hpp"
#include "chipdse/types.hpp"

namespace chipdse {

std::int64_t compute_cycles(const ChipletWork& work, const ChipletSpec& chip, Dataflow dataflow);

double chiplet_area(const ChipletSpec& chip, const ModelConstants& c);
std::vector<double> chiplet_areas(const SystemConfig& cfg, const ModelConstants& c);

/// Die-to-die bandwidth in bytes/s. Throws ModelError for 2D packages.
double d2d_bandwidth(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c);

/// Energy per D2D byte in pJ; for 2.5D+3D the worse of the two links.
double d2d_pj_per_byte(const PackageSpec& pkg, const ModelConstants& c);

struct LatencyBreakdown {
    double latency_s = 0;
    double compute_s = 0;  // slowest chiplet, compute plus operand reads
    double d2d_s = 0;
    double write_s = 0;
    double d2d_bandwidth_bps = 0;  // bytes/s; 0 without D2D links
    std::vector<double> per_chiplet_s;
};

LatencyBreakdown system_latency(const SystemConfig& cfg, const MappingResult& mr, std::span<const double> areas,
                                const ModelConstants& c);

struct EnergyBreakdown {
    double energy_j = 0;
    double dram_j = 0;
    double mac_j = 0;
    double sram_j = 0;
    double d2d_j = 0;

    [[nodiscard]] double compute_j() const { return mac_j + sram_j; }
};

EnergyBreakdown system_energy(const SystemConfig& cfg, const MappingResult& mr, const ModelConstants& c);

struct AreaBreakdown {
    double area_mm2 = 0;  // package footprint
    double width_mm = 0;
    double height_mm = 0;
};

AreaBreakdown system_area(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c);

double dies_per_wafer(double area_mm2, const ModelConstants& c);
double die_yield(double area_mm2, double defect_density_per_mm2, double alpha);
/// Wafer cost / gross dies / yield. Throws ModelError when the die does not fit the wafer.
double die_cost(double area_mm2, int tech_node, const ModelConstants& c);

struct CostBreakdown {
    double total_usd = 0;
    std::vector<double> die_usd;
    std::vector<double> yields;
    double package_usd = 0;
    double memory_usd = 0;
};

CostBreakdown mfg_cost(const SystemConfig& cfg, std::span<const double> areas, const ModelConstants& c);

struct PpacReport {
    double latency_s = 0;
    double energy_j = 0;
    double area_mm2 = 0;
    double mfg_cost_usd = 0;

    LatencyBreakdown latency;
    EnergyBreakdown energy;
    AreaBreakdown area;
    CostBreakdown cost;
    std::vector<double> chiplet_areas_mm2;
    MappingResult mapping;
};

PpacReport evaluate(const WorkloadSpec& wl, const SystemConfig& cfg, const ModelConstants& c);

/// Area function bound to a constants table, for feasibility checks.
AreaFn area_model(const ModelConstants& c);

/// The full design space with the given blacklist and the area model of `c`.
DesignSpace make_space(const ModelConstants& c, Blacklist blacklist);

}  // namespace chipdse
