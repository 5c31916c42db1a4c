// SPDX-License-Identifier: Apache-2.0
#include "chipdse/context_store.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "chipdse/csv.hpp"
#include "chipdse/errors.hpp"

namespace chipdse {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kKnowhowHeader = "# KNOWHOW\n";
constexpr std::string_view kWatermark = ".merged_iteration";

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

int to_int(std::string_view s, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(fmt::format("{}: '{}' is not an integer", what, s));
    return v;
}

double to_double(std::string_view s, std::string_view what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(fmt::format("{}: '{}' is not a number", what, s));
    }
}

// Staged multi-file write: every file lands in a temp sibling first. If a
// later rename fails, files already moved get their previous content back.
class Staging {
public:
    void add(const fs::path& path, std::string_view content, std::string previous) {
        auto tmp = path;
        tmp += ".stage";
        try {
            write_text_atomic(tmp, content);
        } catch (...) {
            discard();
            throw;
        }
        staged_.push_back({tmp, path, std::move(previous)});
    }
    void commit() {
        for (std::size_t i = 0; i < staged_.size(); ++i) {
            std::error_code ec;
            fs::rename(staged_[i].tmp, staged_[i].dst, ec);
            if (ec) {
                for (std::size_t j = 0; j < i; ++j) {
                    try {
                        write_text_atomic(staged_[j].dst, staged_[j].previous);
                    } catch (const std::exception&) {
                    }
                }
                discard();
                throw ContextError(fmt::format("cannot move '{}' into place", staged_[i].dst.string()));
            }
        }
        staged_.clear();
    }
    void discard() {
        for (const auto& f : staged_) {
            std::error_code ec;
            fs::remove(f.tmp, ec);
        }
        staged_.clear();
    }
    ~Staging() { discard(); }

private:
    struct File {
        fs::path tmp;
        fs::path dst;
        std::string previous;
    };
    std::vector<File> staged_;
};

}  // namespace

std::string format_number(double v) { return fmt::format("{:.12g}", v); }

std::string format_knowhow_entry(const KnowhowEntry& e) {
    const std::string best = e.batch_best ? format_number(*e.batch_best) : "n/a";
    const std::string cfg = e.batch_best ? e.batch_config : "n/a";
    const std::string delta = e.delta ? fmt::format("{:+.12g}", *e.delta) : "n/a";
    return fmt::format("## Iter {} / Plan {}\n- configs: {}\n- batch best: {} @ {}\n- delta vs global best: {}\n- "
                       "insight: {}\n",
                       e.iteration, e.plan_id, e.configs, best, cfg, delta, one_line(e.insight));
}

std::string best_csv(const std::vector<BestEntry>& best) {
    std::string out(kBestHeader);
    out += '\n';
    for (std::size_t i = 0; i < best.size(); ++i) {
        out += csv_line({std::to_string(i + 1), format_number(best[i].cost), best[i].config,
                         std::to_string(best[i].iteration_found)});
    }
    return out;
}

std::string result_line(const ResultRow& r) {
    return csv_line({std::to_string(r.iteration), std::to_string(r.plan_id), r.config, format_number(r.energy_j),
                     format_number(r.area_mm2), format_number(r.latency_s), format_number(r.mfg_cost_usd),
                     format_number(r.norm_e), format_number(r.norm_a), format_number(r.norm_l),
                     format_number(r.norm_c), format_number(r.weighted_cost), r.backend, r.timestamp});
}

ContextStore ContextStore::create(const fs::path& dir, const Docs& docs) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ContextError(fmt::format("cannot create run directory '{}'", dir.string()));
    ContextStore s;
    s.dir_ = dir;
    s.docs_ = docs;
    s.knowhow_ = std::string(kKnowhowHeader);
    s.results_ = std::string(kResultsHeader) + "\n";
    write_text_atomic(dir / "AGENTS.md", docs.agents);
    write_text_atomic(dir / "MODEL_INFO.md", docs.model_info);
    write_text_atomic(dir / "BLACKLIST.json", docs.blacklist);
    write_text_atomic(dir / "KNOWHOW.md", s.knowhow_);
    write_text_atomic(dir / "BEST.csv", best_csv(s.best_));
    write_text_atomic(dir / "RESULTS.csv", s.results_);
    write_text_atomic(dir / kWatermark, "0\n");
    return s;
}

ContextStore ContextStore::open(const fs::path& dir) {
    ContextStore s;
    s.dir_ = dir;
    s.docs_.agents = read_text(dir / "AGENTS.md");
    s.docs_.model_info = read_text(dir / "MODEL_INFO.md");
    s.docs_.blacklist = read_text(dir / "BLACKLIST.json");
    s.knowhow_ = read_text(dir / "KNOWHOW.md");
    s.results_ = read_text(dir / "RESULTS.csv");

    const auto results = parse_csv(s.results_);
    if (results.header.empty() || csv_line(results.header) != std::string(kResultsHeader) + "\n")
        throw ParseError(fmt::format("{}: unexpected RESULTS.csv header", dir.string()));
    s.result_rows_ = results.rows.size();

    const auto best = read_csv(dir / "BEST.csv");
    if (csv_line(best.header) != std::string(kBestHeader) + "\n")
        throw ParseError(fmt::format("{}: unexpected BEST.csv header", dir.string()));
    for (const auto& row : best.rows) {
        if (row.size() != 4) throw ParseError(fmt::format("{}: malformed BEST.csv row", dir.string()));
        s.best_.push_back({to_double(row[1], "BEST.csv weighted_cost"), row[2], to_int(row[3], "BEST.csv iteration")});
    }

    auto mark = read_text(dir / kWatermark);
    while (!mark.empty() && (mark.back() == '\n' || mark.back() == '\r')) mark.pop_back();
    s.watermark_ = to_int(mark, std::string(kWatermark));

    if (s.watermark_ > 0) {
        const auto admin = s.knowhow_.find(fmt::format("### Admin (iter {})", s.watermark_));
        const auto entry = s.knowhow_.find(fmt::format("## Iter {} /", s.watermark_));
        const auto start = std::min(admin, entry);
        if (start != std::string::npos) s.last_knowhow_ = s.knowhow_.substr(start);
    }
    return s;
}

std::optional<BestEntry> ContextStore::global_best() const {
    if (best_.empty()) return std::nullopt;
    return best_.front();
}

std::string ContextStore::digest(std::size_t limit) const {
    std::string out = fmt::format("## Best configurations (top {})\n", kBestDepth);
    out += best_csv(best_);
    if (!last_knowhow_.empty()) out += "\n## Notes from iteration " + std::to_string(watermark_) + "\n" + last_knowhow_;
    return truncate_digest(out, limit);
}

void ContextStore::merge(const MergeBatch& batch) {
    if (batch.iteration <= watermark_)
        throw ContextError(fmt::format("iteration {} is already merged (watermark {})", batch.iteration, watermark_));

    // Existing rows come first so a stable sort keeps them ahead on equal cost.
    std::vector<BestEntry> best = best_;
    std::set<std::string> seen;
    for (const auto& b : best) seen.insert(b.config);
    for (const auto& r : batch.rows) {
        if (seen.insert(r.config).second) best.push_back({r.weighted_cost, r.config, batch.iteration});
    }
    std::stable_sort(best.begin(), best.end(), [](const BestEntry& a, const BestEntry& b) { return a.cost < b.cost; });
    if (best.size() > kBestDepth) best.resize(kBestDepth);

    std::string block;
    if (!batch.admin_notes.empty()) {
        block += fmt::format("\n### Admin (iter {})\n", batch.iteration);
        for (const auto& note : batch.admin_notes) block += "- " + one_line(note) + "\n";
    }
    for (const auto& e : batch.knowhow) block += "\n" + format_knowhow_entry(e);
    std::string knowhow = knowhow_ + block;

    std::string results = results_;
    for (const auto& r : batch.rows) results += result_line(r);

    Staging stage;
    stage.add(dir_ / "KNOWHOW.md", knowhow, knowhow_);
    stage.add(dir_ / "RESULTS.csv", results, results_);
    stage.add(dir_ / "BEST.csv", best_csv(best), best_csv(best_));
    stage.add(dir_ / kWatermark, fmt::format("{}\n", batch.iteration), fmt::format("{}\n", watermark_));
    stage.commit();

    knowhow_ = std::move(knowhow);
    results_ = std::move(results);
    best_ = std::move(best);
    result_rows_ += batch.rows.size();
    watermark_ = batch.iteration;
    last_knowhow_ = block.empty() ? block : block.substr(1);
}

}  // namespace chipdse
