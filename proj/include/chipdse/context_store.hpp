// SPDX-License-Identifier: Apache-2.0
#pragma once

// Run directory:
//   AGENTS.md, MODEL_INFO.md, BLACKLIST.json   persistent, copied at creation
//   KNOWHOW.md, BEST.csv, RESULTS.csv          evolving
//   .merged_iteration                          last merged iteration (watermark)

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chipdse/backend.hpp"

namespace chipdse {

inline constexpr std::string_view kResultsHeader =
    "iteration,plan_id,config,energy_j,area_mm2,latency_s,mfg_cost_usd,norm_e,norm_a,norm_l,norm_c,"
    "weighted_cost,backend,timestamp_iso8601";
inline constexpr std::string_view kBestHeader = "rank,weighted_cost,config,iteration_found";
inline constexpr std::size_t kBestDepth = 20;

/// Fixed-precision rendering shared by every CSV and KNOWHOW number.
std::string format_number(double v);

struct BestEntry {
    double cost = 0;
    std::string config;
    int iteration_found = 0;
};

struct ResultRow {
    int iteration = 0;
    int plan_id = 0;
    std::string config;
    double energy_j = 0;
    double area_mm2 = 0;
    double latency_s = 0;
    double mfg_cost_usd = 0;
    double norm_e = 0;
    double norm_a = 0;
    double norm_l = 0;
    double norm_c = 0;
    double weighted_cost = 0;
    std::string backend;
    std::string timestamp;  // empty when timestamps are disabled
};

struct KnowhowEntry {
    int iteration = 0;
    int plan_id = 0;
    int configs = 0;
    std::optional<double> batch_best;  // nullopt when every evaluation failed
    std::string batch_config;
    std::optional<double> delta;  // vs. the global best before this merge
    std::string insight;
};

std::string format_knowhow_entry(const KnowhowEntry& e);

struct MergeBatch {
    int iteration = 0;
    std::vector<ResultRow> rows;
    std::vector<KnowhowEntry> knowhow;  // plan_id order
    std::vector<std::string> admin_notes;
};

class ContextStore {
public:
    struct Docs {
        std::string agents;
        std::string model_info;
        std::string blacklist;
    };

    /// Creates (or resets) a run directory with empty evolving context.
    static ContextStore create(const std::filesystem::path& dir, const Docs& docs);
    /// Loads an existing run directory. Throws ParseError when files are missing or malformed.
    static ContextStore open(const std::filesystem::path& dir);

    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
    [[nodiscard]] const Docs& docs() const { return docs_; }
    [[nodiscard]] const std::string& knowhow() const { return knowhow_; }
    [[nodiscard]] const std::vector<BestEntry>& best() const { return best_; }
    [[nodiscard]] std::optional<BestEntry> global_best() const;
    [[nodiscard]] std::size_t result_rows() const { return result_rows_; }
    [[nodiscard]] int last_merged_iteration() const { return watermark_; }

    /// Top of the best table plus the last merged iteration's knowhow entries,
    /// capped at `limit` bytes.
    [[nodiscard]] std::string digest(std::size_t limit = kDigestLimit) const;

    /// Appends results and knowhow, re-ranks the best table and advances the
    /// watermark. Rejects an iteration at or below the watermark. Every file is
    /// staged first, so a write failure leaves the directory and this object unchanged.
    void merge(const MergeBatch& batch);

private:
    std::filesystem::path dir_;
    Docs docs_;
    std::string knowhow_;
    std::string results_;
    std::vector<BestEntry> best_;
    std::size_t result_rows_ = 0;
    int watermark_ = 0;
    std::string last_knowhow_;
};

std::string best_csv(const std::vector<BestEntry>& best);
std::string result_line(const ResultRow& r);

}  // namespace chipdse
