// SPDX-License-Identifier: Apache-2.0
#include "chipdse/cost.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chipdse/errors.hpp"
#include "chipdse/parallel.hpp"
#include "chipdse/shorthand.hpp"

namespace chipdse {

using nlohmann::json;

const std::vector<Profile>& builtin_profiles() {
    static const std::vector<Profile> profiles{
        {"balance", 1.0, 1.0, 1.0, 1.0},
        {"mobile", 0.8, 0.2, 0.1, 0.1},
        {"automotive", 0.1, 0.1, 0.7, 0.7},
        {"wearables", 0.6, 0.6, 0.1, 0.1},
    };
    return profiles;
}

Profile resolve_profile(std::string_view text) {
    std::string lower;
    for (char ch : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (const auto& p : builtin_profiles()) {
        if (p.name == lower) return p;
    }
    std::vector<double> w;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = std::min(text.find(',', start), text.size());
        auto tok = text.substr(start, pos - start);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        double v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw ParseError(fmt::format("unknown profile '{}' (use a built-in name or a,b,c,d)", text));
        if (v < 0) throw ParseError(fmt::format("profile '{}': weights must be >= 0", text));
        w.push_back(v);
        start = pos + 1;
    }
    if (w.size() != 4) throw ParseError(fmt::format("profile '{}': expected four weights", text));
    return {fmt::format("custom({},{},{},{})", w[0], w[1], w[2], w[3]), w[0], w[1], w[2], w[3]};
}

json NormalizationBasis::to_json() const {
    return {{"workload", workload},
            {"n", n},
            {"seed", seed},
            {"medians", {{"energy_j", energy_j}, {"area_mm2", area_mm2}, {"latency_s", latency_s}, {"cost_usd", cost_usd}}}};
}

NormalizationBasis NormalizationBasis::from_json(const json& j) {
    try {
        NormalizationBasis b;
        b.workload = j.at("workload").get<std::string>();
        b.n = j.at("n").get<std::uint64_t>();
        b.seed = j.at("seed").get<std::uint64_t>();
        const auto& m = j.at("medians");
        b.energy_j = m.at("energy_j").get<double>();
        b.area_mm2 = m.at("area_mm2").get<double>();
        b.latency_s = m.at("latency_s").get<double>();
        b.cost_usd = m.at("cost_usd").get<double>();
        if (!(b.energy_j > 0 && b.area_mm2 > 0 && b.latency_s > 0 && b.cost_usd > 0))
            throw ParseError("basis medians must be > 0");
        return b;
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("bad basis file: {}", e.what()));
    }
}

NormalizationBasis NormalizationBasis::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot read basis file '{}'", path.string()));
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void NormalizationBasis::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << to_json().dump(2) << '\n';
}

double median(std::vector<double> v) {
    if (v.empty()) throw SpaceError("median of an empty sample");
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

NormalizationBasis basis_from_reports(std::string workload, std::span<const PpacReport> reports,
                                      std::uint64_t seed) {
    std::vector<double> e, a, l, c;
    for (const auto& r : reports) {
        e.push_back(r.energy_j);
        a.push_back(r.area_mm2);
        l.push_back(r.latency_s);
        c.push_back(r.mfg_cost_usd);
    }
    NormalizationBasis b;
    b.workload = std::move(workload);
    b.n = reports.size();
    b.seed = seed;
    b.energy_j = median(std::move(e));
    b.area_mm2 = median(std::move(a));
    b.latency_s = median(std::move(l));
    b.cost_usd = median(std::move(c));
    return b;
}

NormalizationBasis compute_basis(const WorkloadSpec& wl, const DesignSpace& space, const ModelConstants& c,
                                 std::size_t n, std::uint64_t seed) {
    if (n < 1) throw SpaceError("basis sample size must be >= 1");
    const auto sample = sample_uniform(space, n, seed);
    std::vector<PpacReport> reports(sample.size());
    parallel_for(sample.size(), [&](std::size_t i) { reports[i] = evaluate(wl, sample[i], c); });
    return basis_from_reports(wl.name, reports, seed);
}

NormalizedMetrics normalize(const PpacReport& r, const NormalizationBasis& b) {
    return {r.energy_j / b.energy_j, r.area_mm2 / b.area_mm2, r.latency_s / b.latency_s, r.mfg_cost_usd / b.cost_usd};
}

double weighted_cost(const NormalizedMetrics& m, const Profile& p) {
    return p.alpha * m.energy + p.beta * m.area + p.gamma * m.latency + p.theta * m.cost;
}

double weighted_cost(const PpacReport& r, const NormalizationBasis& b, const Profile& p) {
    return weighted_cost(normalize(r, b), p);
}

double CostModel::cost(const SystemConfig& cfg) const {
    return weighted_cost(evaluate(workload, cfg, constants), basis, profile);
}

bool better(double cost_a, const std::string& canon_a, double cost_b, const std::string& canon_b) {
    if (cost_a != cost_b) return cost_a < cost_b;
    return canon_a < canon_b;
}

std::pair<SystemConfig, double> argmin_over(std::span<const SystemConfig> configs, const CostModel& model) {
    if (configs.empty()) throw SpaceError("argmin over an empty set of configurations");
    std::vector<double> costs(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) { costs[i] = model.cost(configs[i]); });
    std::size_t best = 0;
    std::string best_canon = format_config(configs[0]);
    for (std::size_t i = 1; i < configs.size(); ++i) {
        if (costs[i] > costs[best]) continue;
        auto canon = format_config(configs[i]);
        if (better(costs[i], canon, costs[best], best_canon)) {
            best = i;
            best_canon = std::move(canon);
        }
    }
    return {configs[best], costs[best]};
}

}  // namespace chipdse
