// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chipdse/types.hpp"

namespace chipdse {

// Structural rule ids. These are always enforced and never come from a file.
namespace rule {
inline constexpr std::string_view kUc3Requires3d = "structural.uc3_requires_3d";          // (a)
inline constexpr std::string_view kHybridMinChiplets = "structural.hybrid_min_chiplets";  // (b)
inline constexpr std::string_view kStackAreaOrder = "structural.stack_area_order";        // (c)
inline constexpr std::string_view kSingleChipletIs2d = "structural.single_chiplet_2d";    // (d)
inline constexpr std::string_view kLinkCompatibility = "structural.link_compatibility";   // (e)
inline constexpr std::string_view kMinimumSram = "structural.minimum_sram";               // (f)
inline constexpr std::string_view kShape = "structural.shape";
inline constexpr std::string_view kBlacklistInvalid = "blacklist.invalid";
}  // namespace rule

/// One (dot.path == value) predicate. `value` is held in canonical token form.
struct RuleMatcher {
    std::string path;
    std::string value;
};

struct BlacklistRule {
    std::string rule_id;
    std::vector<RuleMatcher> matchers;  // conjunctive
    std::string message;

    [[nodiscard]] bool matches(const SystemConfig& cfg) const;
};

/// A parsed BLACKLIST.json. Loading never throws: a malformed file yields a
/// blacklist in the failed state, which rejects every configuration.
class Blacklist {
public:
    Blacklist() = default;

    static Blacklist from_json_text(std::string_view text);
    static Blacklist from_file(const std::filesystem::path& path);
    static Blacklist from_rules(std::vector<BlacklistRule> rules);

    [[nodiscard]] bool valid() const { return !error_.has_value(); }
    [[nodiscard]] const std::optional<std::string>& error() const { return error_; }
    [[nodiscard]] const std::vector<BlacklistRule>& rules() const { return rules_; }

private:
    std::vector<BlacklistRule> rules_;
    std::optional<std::string> error_;
};

/// Canonical value of a dot path on `cfg`, or nullopt if the path is unknown.
/// "chiplets.*.<field>" is handled by BlacklistRule::matches, not here.
std::optional<std::string> field_value(const SystemConfig& cfg, std::string_view path);

struct Feasibility {
    std::vector<std::string> violations;  // rule ids, structural first
    std::vector<std::string> diagnostics;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    explicit operator bool() const { return ok(); }
};

/// `areas[i]` is the die area in mm^2 of cfg.chiplets[i].
Feasibility check_feasible(const SystemConfig& cfg, const Blacklist& rules, std::span<const double> areas);

/// Only the compiled-in structural rules.
Feasibility check_structural(const SystemConfig& cfg, std::span<const double> areas);

}  // namespace chipdse
