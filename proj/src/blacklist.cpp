// SPDX-License-Identifier: Apache-2.0
#include "chipdse/blacklist.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace chipdse {
namespace {

using json = nlohmann::json;

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = path.find('.', start);
        if (pos == std::string_view::npos) {
            out.push_back(path.substr(start));
            return out;
        }
        out.push_back(path.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<int> to_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::string> chiplet_field(const ChipletSpec& c, std::string_view field) {
    if (field == "array_dim") return std::to_string(c.array_dim);
    if (field == "tech_node") return std::to_string(c.tech_node);
    if (field == "sram_kb") return std::to_string(c.sram_kb);
    return std::nullopt;
}

std::optional<std::string> json_int_token(const json& v) {
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_string()) {
        if (auto i = to_int(v.get<std::string>())) return std::to_string(*i);
    }
    return std::nullopt;
}

std::optional<std::string> json_flag_token(const json& v) {
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (auto t = json_int_token(v); t && (*t == "0" || *t == "1")) return t;
    return std::nullopt;
}

template <typename Parse>
std::optional<std::string> json_enum_token(const json& v, Parse parse) {
    if (!v.is_string()) return std::nullopt;
    if (auto e = parse(v.get<std::string>())) return std::string{to_string(*e)};
    return std::nullopt;
}

/// Validates `path` and normalizes `value` to the token field_value() produces.
std::optional<std::string> canonical_rule_value(std::string_view path, const json& value) {
    const auto parts = split_path(path);
    if (parts.size() == 1 && parts[0] == "count") {
        auto t = json_int_token(value);
        if (t && std::stoi(*t) >= 1 && std::stoi(*t) <= kMaxChiplets) return t;
        return std::nullopt;
    }
    if (parts.size() == 3 && parts[0] == "chiplets") {
        if (parts[1] != "*") {
            const auto idx = to_int(parts[1]);
            if (!idx || *idx < 0 || *idx >= kMaxChiplets) return std::nullopt;
        }
        auto t = json_int_token(value);
        if (!t) return std::nullopt;
        const int v = std::stoi(*t);
        if (parts[2] == "array_dim" && is_array_dim(v)) return t;
        if (parts[2] == "tech_node" && is_tech_node(v)) return t;
        if (parts[2] == "sram_kb" && is_sram_kb(v)) return t;
        return std::nullopt;
    }
    if (parts.size() != 2) return std::nullopt;
    const auto group = parts[0];
    const auto field = parts[1];
    if (group == "mapping") {
        if (field == "order") {
            if (value.is_string()) {
                const auto s = value.get<std::string>();
                if (s == "descending") return "0";
                if (s == "ascending") return "1";
            }
            return json_flag_token(value);
        }
        if (field == "dataflow") return json_enum_token(value, dataflow_from);
        if (field == "split_k" || field == "data_sharing") return json_flag_token(value);
        return std::nullopt;
    }
    if (group == "package") {
        if (field == "integration") return json_enum_token(value, integration_from);
        if (field == "interconnect" || field == "lateral_interconnect")
            return json_enum_token(value, interconnect_from);
        if (field == "memory") return json_enum_token(value, memory_from);
        if (field == "protocol" || field == "lateral_protocol") return json_enum_token(value, protocol_from);
        if (field == "topology") return json_enum_token(value, topology_from);
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> field_value(const SystemConfig& cfg, std::string_view path) {
    const auto parts = split_path(path);
    if (parts.size() == 1 && parts[0] == "count") return std::to_string(cfg.count());
    if (parts.size() == 3 && parts[0] == "chiplets") {
        const auto idx = to_int(parts[1]);
        if (!idx || *idx < 0 || *idx >= cfg.count()) return std::nullopt;
        return chiplet_field(cfg.chiplets[*idx], parts[2]);
    }
    if (parts.size() != 2) return std::nullopt;
    const auto& m = cfg.mapping;
    const auto& p = cfg.package;
    if (parts[0] == "mapping") {
        if (parts[1] == "order") return std::to_string(static_cast<int>(m.order));
        if (parts[1] == "dataflow") return std::string{to_string(m.dataflow)};
        if (parts[1] == "split_k") return m.split_k ? "1" : "0";
        if (parts[1] == "data_sharing") return m.data_sharing ? "1" : "0";
    } else if (parts[0] == "package") {
        if (parts[1] == "integration") return std::string{to_string(p.integration)};
        if (parts[1] == "interconnect") return std::string{to_string(p.interconnect)};
        if (parts[1] == "memory") return std::string{to_string(p.memory)};
        if (parts[1] == "protocol") return std::string{to_string(p.protocol)};
        if (parts[1] == "topology") return std::string{to_string(p.topology)};
        if (parts[1] == "lateral_interconnect") return std::string{to_string(p.lateral_interconnect)};
        if (parts[1] == "lateral_protocol") return std::string{to_string(p.lateral_protocol)};
    }
    return std::nullopt;
}

bool BlacklistRule::matches(const SystemConfig& cfg) const {
    if (matchers.empty()) return false;
    for (const auto& m : matchers) {
        if (m.path.starts_with("chiplets.*.")) {
            const auto field = std::string_view{m.path}.substr(11);
            bool any = false;
            for (const auto& c : cfg.chiplets) {
                if (chiplet_field(c, field) == m.value) {
                    any = true;
                    break;
                }
            }
            if (!any) return false;
        } else if (field_value(cfg, m.path) != m.value) {
            return false;
        }
    }
    return true;
}

Blacklist Blacklist::from_json_text(std::string_view text) {
    Blacklist bl;
    auto fail = [&](std::string msg) {
        bl.rules_.clear();
        bl.error_ = std::move(msg);
        return bl;
    };
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        return fail(fmt::format("not valid JSON: {}", e.what()));
    }
    if (!doc.is_array()) return fail("top level must be an array of rules");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& r = doc[i];
        if (!r.is_object() || !r.contains("rule_id") || !r["rule_id"].is_string() || !r.contains("when") ||
            !r["when"].is_object()) {
            return fail(fmt::format("rule #{} must have string 'rule_id' and object 'when'", i));
        }
        BlacklistRule rule;
        rule.rule_id = r["rule_id"].get<std::string>();
        if (r.contains("message")) {
            if (!r["message"].is_string()) return fail(fmt::format("rule '{}': message must be a string", rule.rule_id));
            rule.message = r["message"].get<std::string>();
        }
        if (!seen.insert(rule.rule_id).second) return fail(fmt::format("duplicate rule_id '{}'", rule.rule_id));
        for (const auto& [path, value] : r["when"].items()) {
            auto canon = canonical_rule_value(path, value);
            if (!canon) {
                return fail(fmt::format("rule '{}': unknown path or value '{}' = {}", rule.rule_id, path,
                                        value.dump()));
            }
            rule.matchers.push_back({path, *canon});
        }
        if (rule.matchers.empty()) return fail(fmt::format("rule '{}' has no matchers", rule.rule_id));
        bl.rules_.push_back(std::move(rule));
    }
    return bl;
}

Blacklist Blacklist::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        Blacklist bl;
        bl.error_ = fmt::format("cannot read '{}'", path.string());
        return bl;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    auto bl = from_json_text(ss.str());
    if (bl.error_) bl.error_ = fmt::format("{}: {}", path.string(), *bl.error_);
    return bl;
}

Blacklist Blacklist::from_rules(std::vector<BlacklistRule> rules) {
    Blacklist bl;
    std::set<std::string> seen;
    for (const auto& r : rules) {
        if (r.matchers.empty()) {
            bl.error_ = fmt::format("rule '{}' has no matchers", r.rule_id);
            return bl;
        }
        if (!seen.insert(r.rule_id).second) {
            bl.error_ = fmt::format("duplicate rule_id '{}'", r.rule_id);
            return bl;
        }
    }
    bl.rules_ = std::move(rules);
    return bl;
}

Feasibility check_structural(const SystemConfig& cfg, std::span<const double> areas) {
    Feasibility f;
    auto violate = [&](std::string_view id, std::string diag) {
        f.violations.emplace_back(id);
        f.diagnostics.push_back(std::move(diag));
    };
    const int n = cfg.count();
    const auto integ = cfg.package.integration;

    if (n < 1 || n > kMaxChiplets) {
        violate(rule::kShape, fmt::format("chiplet count {} outside 1..{}", n, kMaxChiplets));
        return f;
    }
    for (const auto& c : cfg.chiplets) {
        if (!is_array_dim(c.array_dim) || !is_tech_node(c.tech_node) || !is_sram_kb(c.sram_kb)) {
            violate(rule::kShape, "chiplet field outside its allowed set");
            return f;
        }
    }

    const bool uses_uc3 = cfg.package.protocol == Protocol::UC3 || cfg.package.lateral_protocol == Protocol::UC3;
    if (uses_uc3 && integ != Integration::ThreeD && integ != Integration::Hybrid) {
        violate(rule::kUc3Requires3d, fmt::format("protocol UC3 used in a {} system", to_string(integ)));
    }
    if (integ == Integration::Hybrid && n < 3) {
        violate(rule::kHybridMinChiplets, fmt::format("2.5D+3D needs at least 3 chiplets, got {}", n));
    }
    if (integ == Integration::ThreeD || integ == Integration::Hybrid) {
        if (areas.size() != cfg.chiplets.size()) {
            violate(rule::kStackAreaOrder, "chiplet areas unavailable");
        } else {
            for (const auto& stack : stacks_of(cfg)) {
                for (std::size_t i = 1; i < stack.size(); ++i) {
                    if (areas[stack[i]] > areas[stack[i - 1]]) {
                        violate(rule::kStackAreaOrder,
                                fmt::format("die {} ({:.3f} mm2) stacked on smaller die {} ({:.3f} mm2)",
                                            stack[i], areas[stack[i]], stack[i - 1], areas[stack[i - 1]]));
                        break;
                    }
                }
            }
        }
    }
    if ((n == 1) != (integ == Integration::TwoD)) {
        violate(rule::kSingleChipletIs2d,
                fmt::format("{} chiplet(s) with {} integration; 2D is exactly the single-die case", n,
                            to_string(integ)));
    }
    if (!package_links_ok(cfg.package)) {
        violate(rule::kLinkCompatibility, fmt::format("interconnect/protocol pairing not legal for {}",
                                                      to_string(integ)));
    }
    for (std::size_t i = 0; i < cfg.chiplets.size(); ++i) {
        const auto& c = cfg.chiplets[i];
        if (c.sram_kb < minimum_sram_kb(c.array_dim)) {
            violate(rule::kMinimumSram, fmt::format("chiplet {}: {} KB below minimum {} KB for array {}", i,
                                                    c.sram_kb, minimum_sram_kb(c.array_dim), c.array_dim));
            break;
        }
    }
    return f;
}

Feasibility check_feasible(const SystemConfig& cfg, const Blacklist& rules, std::span<const double> areas) {
    auto f = check_structural(cfg, areas);
    if (!rules.valid()) {
        f.violations.emplace_back(rule::kBlacklistInvalid);
        f.diagnostics.push_back(*rules.error());
        return f;
    }
    for (const auto& r : rules.rules()) {
        if (r.matches(cfg)) {
            f.violations.push_back(r.rule_id);
            f.diagnostics.push_back(r.message);
        }
    }
    return f;
}

}  // namespace chipdse
