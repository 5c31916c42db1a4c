// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chipdse/cost.hpp"
#include "chipdse/design_space.hpp"
#include "chipdse/rng.hpp"

namespace chipdse {

struct SaSettings {
    double t0 = 4000;
    double t_final = 1.0;
    double rate = 0.97;
    int moves_per_temp = 50;
    std::uint64_t seed = 1;
    std::uint64_t eval_budget = 100000;
    /// Cost deltas are multiplied by this before the Metropolis test, so the
    /// temperature range (thousands) is commensurate with O(1) normalized costs.
    double cost_scale = 1000;

    /// Throws ParseError when the invariants do not hold.
    void validate() const;
};

struct SaRecord {
    std::uint64_t eval_idx = 0;
    double temperature = 0;
    double cost = 0;
    bool accepted = false;
    SystemConfig config;
};

struct SaTrace {
    std::vector<SaRecord> records;
    std::vector<double> best_so_far;  // one entry per record
    SystemConfig best_config;
    double best_cost = 0;
    std::uint64_t null_moves = 0;
    double wall_s = 0;
};

/// Dimensions neighbor() may perturb.
enum class MoveDim : std::uint8_t {
    Count,
    ArrayDim,
    TechNode,
    SramKb,
    Order,
    Dataflow,
    SplitK,
    DataSharing,
    Integration,
    Interconnect,
    Memory,
    Protocol,
    Topology,
};
inline constexpr int kMoveDims = 13;

struct NeighborResult {
    SystemConfig config;
    MoveDim dim = MoveDim::Count;
    bool null_move = false;
};

/// One random perturbation: a dimension is picked uniformly among those that
/// can change, resampled to a different value of the space, and dependent
/// fields repaired. Up to 50 attempts, then the input comes back unchanged.
NeighborResult neighbor(const SystemConfig& cfg, const DesignSpace& space, Rng& rng);

/// Metropolis acceptance probability for a cost increase `delta` at temperature `t`.
double accept_probability(double delta, double t);

/// Geometric-cooling annealing from a uniform feasible start.
SaTrace anneal(const CostModel& model, const DesignSpace& space, const SaSettings& settings);

struct GridPoint {
    SaSettings settings;
    SystemConfig best_config;
    double best_cost = 0;
    std::uint64_t evaluations = 0;
    double runtime_s = 0;
};

/// 4000, 4500, ..., 10000.
std::vector<double> default_t0_range();
/// 0.70, 0.71, ..., 0.99.
std::vector<double> default_rate_range();

/// One anneal per (t0, rate) pair, t0-major, sharing every other setting with `base`.
std::vector<GridPoint> grid_sweep(const CostModel& model, const DesignSpace& space, const SaSettings& base,
                                  const std::vector<double>& t0s, const std::vector<double>& rates);

/// Columns: eval_idx, temperature, cost, accepted, config.
void write_trace_csv(std::ostream& out, const SaTrace& trace);

}  // namespace chipdse
