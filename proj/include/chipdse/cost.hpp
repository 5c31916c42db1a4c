// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chipdse/constants.hpp"
#include "chipdse/design_space.hpp"
#include "chipdse/mapping.hpp"
#include "chipdse/ppac.hpp"

namespace chipdse {

/// Weights on normalized energy, area, latency and manufacturing cost.
struct Profile {
    std::string name;
    double alpha = 0;
    double beta = 0;
    double gamma = 0;
    double theta = 0;

    [[nodiscard]] bool all_zero() const { return alpha == 0 && beta == 0 && gamma == 0 && theta == 0; }
    bool operator==(const Profile&) const = default;
};

/// balance, mobile, automotive, wearables.
const std::vector<Profile>& builtin_profiles();
/// A built-in name (case-insensitive) or an explicit "a,b,c,d" weight list.
Profile resolve_profile(std::string_view text);

struct NormalizationBasis {
    std::string workload;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double energy_j = 1;
    double area_mm2 = 1;
    double latency_s = 1;
    double cost_usd = 1;

    [[nodiscard]] nlohmann::json to_json() const;
    static NormalizationBasis from_json(const nlohmann::json& j);
    static NormalizationBasis load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Sort-based median; even sizes average the middle two.
double median(std::vector<double> values);

/// Medians of each raw metric over `reports`.
NormalizationBasis basis_from_reports(std::string workload, std::span<const PpacReport> reports,
                                      std::uint64_t seed);

/// Evaluates n uniform feasible samples of `space` and records the medians.
NormalizationBasis compute_basis(const WorkloadSpec& wl, const DesignSpace& space, const ModelConstants& c,
                                 std::size_t n = 10000, std::uint64_t seed = 7);

struct NormalizedMetrics {
    double energy = 0;
    double area = 0;
    double latency = 0;
    double cost = 0;
};

NormalizedMetrics normalize(const PpacReport& r, const NormalizationBasis& b);
double weighted_cost(const NormalizedMetrics& m, const Profile& p);
double weighted_cost(const PpacReport& r, const NormalizationBasis& b, const Profile& p);

/// Everything needed to turn a config into a scalar cost.
struct CostModel {
    WorkloadSpec workload;
    Profile profile;
    NormalizationBasis basis;
    ModelConstants constants;

    [[nodiscard]] double cost(const SystemConfig& cfg) const;
};

/// Lowest cost; ties go to the lexicographically smallest canonical string.
/// Throws SpaceError on an empty list.
std::pair<SystemConfig, double> argmin_over(std::span<const SystemConfig> configs, const CostModel& model);

/// Strict ordering used for every "best" selection: cost, then canonical string.
bool better(double cost_a, const std::string& canon_a, double cost_b, const std::string& canon_b);

}  // namespace chipdse
