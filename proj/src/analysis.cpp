// SPDX-License-Identifier: Apache-2.0
#include "chipdse/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "chipdse/context_store.hpp"
#include "chipdse/csv.hpp"
#include "chipdse/errors.hpp"
#include "chipdse/parallel.hpp"
#include "chipdse/shorthand.hpp"

namespace chipdse {

using nlohmann::json;

namespace {

constexpr std::size_t kChunk = 8192;

double parse_double(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(fmt::format("{}: '{}' is not a number", what, s));
    }
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

json read_run_json(const std::filesystem::path& dir) {
    try {
        return json::parse(read_text(dir / "RUN.json"));
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("{}/RUN.json: {}", dir.string(), e.what()));
    }
}

std::string runtime_field(const json& run) {
    if (run.contains("runtime_s") && run["runtime_s"].is_number()) return format_number(run["runtime_s"].get<double>());
    return {};
}

double min_column(const CsvTable& t, std::string_view column, const std::filesystem::path& file) {
    const int col = t.column(column);
    if (col < 0) throw ParseError(fmt::format("{}: no '{}' column", file.string(), column));
    if (t.rows.empty()) throw ParseError(fmt::format("{}: no rows", file.string()));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : t.rows) {
        if (static_cast<std::size_t>(col) >= row.size())
            throw ParseError(fmt::format("{}: short row", file.string()));
        best = std::min(best, parse_double(row[col], file.string()));
    }
    return best;
}

}  // namespace

bool dominates(const ParetoPoint& p, const ParetoPoint& q) {
    return p.runtime_s <= q.runtime_s && p.cost <= q.cost && (p.runtime_s < q.runtime_s || p.cost < q.cost);
}

std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points) {
    if (points.empty()) throw SpaceError("Pareto frontier of an empty point set");
    std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        return std::tie(a.runtime_s, a.cost, a.label) < std::tie(b.runtime_s, b.cost, b.label);
    });
    std::vector<ParetoPoint> out;
    for (auto& p : points) {
        if (out.empty() || p.cost < out.back().cost ||
            (p.cost == out.back().cost && p.runtime_s == out.back().runtime_s)) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::string pareto_svg(const std::vector<ParetoPoint>& points, const std::vector<ParetoPoint>& frontier,
                       const std::string& title) {
    constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& p : points) {
        if (!(p.runtime_s > 0)) continue;
        xmin = std::min(xmin, std::log10(p.runtime_s));
        xmax = std::max(xmax, std::log10(p.runtime_s));
        ymin = std::min(ymin, p.cost);
        ymax = std::max(ymax, p.cost);
    }
    if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0;
    if (xmax - xmin < 1e-9) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto sx = [&](double rt) { return kL + (std::log10(rt) - xmin) / (xmax - xmin) * (kW - kL - kR); };
    auto sy = [&](double c) { return kH - kB - (c - ymin) / (ymax - ymin) * (kH - kT - kB); };

    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{3}</text>\n",
        kW, kH, kW / 2, xml_escape(title));
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kL, kH - kB, kW - kR);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kL, kT, kH - kB);
    for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
        const double x = sx(std::pow(10.0, e));
        s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1}\" x2=\"{0:.1f}\" y2=\"{2}\" stroke=\"black\"/>\n"
                         "<text x=\"{0:.1f}\" y=\"{3}\" font-family=\"sans-serif\" font-size=\"11\" "
                         "text-anchor=\"middle\">1e{4}</text>\n",
                         x, kH - kB, kH - kB + 5, kH - kB + 18, e);
    }
    for (int i = 0; i <= 4; ++i) {
        const double c = ymin + (ymax - ymin) * i / 4.0;
        s += fmt::format("<text x=\"{0}\" y=\"{1:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
                         "text-anchor=\"end\">{2:.4g}</text>\n",
                         kL - 6, sy(c) + 4, c);
    }
    s += fmt::format("<text x=\"{0}\" y=\"{1}\" font-family=\"sans-serif\" font-size=\"12\" "
                     "text-anchor=\"middle\">runtime (s, log scale)</text>\n",
                     (kL + kW - kR) / 2, kH - 12);
    s += fmt::format("<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 16 {0})\">cost</text>\n",
                     (kT + kH - kB) / 2);
    for (const auto& p : points) {
        if (!(p.runtime_s > 0)) continue;
        s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"#999\"><title>{}</title></circle>\n",
                         sx(p.runtime_s), sy(p.cost), xml_escape(p.label));
    }
    std::string path;
    for (const auto& p : frontier) {
        if (!(p.runtime_s > 0)) continue;
        path += fmt::format("{:.1f},{:.1f} ", sx(p.runtime_s), sy(p.cost));
    }
    if (!path.empty()) {
        path.pop_back();
        s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"#c00\" stroke-width=\"1.5\"/>\n", path);
    }
    for (const auto& p : frontier) {
        if (!(p.runtime_s > 0)) continue;
        s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"#c00\"><title>{}</title></circle>\n",
                         sx(p.runtime_s), sy(p.cost), xml_escape(p.label));
    }
    s += "</svg>\n";
    return s;
}

std::vector<ParetoPoint> read_pareto_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const int rt = t.column("runtime_s");
    int cost = t.column("cost");
    if (cost < 0) cost = t.column("best_cost");
    const int label = t.column("label") >= 0 ? t.column("label") : t.column("settings");
    if (rt < 0 || cost < 0) throw ParseError(fmt::format("{}: needs runtime_s and cost columns", path.string()));
    std::vector<ParetoPoint> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() != t.header.size()) throw ParseError(fmt::format("{}: row {} has the wrong width", path.string(), i + 1));
        if (row[rt].empty())
            throw ParseError(fmt::format("{}: row {} has no runtime (recorded without timestamps?)", path.string(), i + 1));
        ParetoPoint p;
        p.runtime_s = parse_double(row[rt], path.string());
        p.cost = parse_double(row[cost], path.string());
        p.label = label >= 0 ? row[label] : fmt::format("row{}", i + 1);
        if (!(p.runtime_s > 0) || !std::isfinite(p.cost))
            throw ParseError(fmt::format("{}: row {} needs runtime > 0 and a finite cost", path.string(), i + 1));
        out.push_back(std::move(p));
    }
    return out;
}

void write_pareto_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
    out << "label,runtime_s,cost\n";
    for (const auto& p : points) out << csv_line({p.label, format_number(p.runtime_s), format_number(p.cost)});
}

OracleResult brute_force(const CostModel& model, const DesignSpace& space, std::uint64_t cap,
                         std::string description) {
    const auto start = std::chrono::steady_clock::now();
    Enumerator en(space);
    OracleResult out;
    out.description = std::move(description);
    out.candidates = en.candidate_count();
    if (out.candidates > cap) {
        throw CapExceededError(fmt::format("restricted space has {} candidate configurations, above the cap of {}; "
                                           "tighten the restriction",
                                           out.candidates, cap));
    }
    bool have = false;
    std::string best_canon;
    std::vector<SystemConfig> chunk;
    std::vector<double> costs;
    for (;;) {
        chunk.clear();
        while (chunk.size() < kChunk) {
            auto cfg = en.next();
            if (!cfg) break;
            chunk.push_back(std::move(*cfg));
        }
        if (chunk.empty()) break;
        costs.assign(chunk.size(), 0.0);
        parallel_for(chunk.size(), [&](std::size_t i) { costs[i] = model.cost(chunk[i]); });
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            if (have && costs[i] > out.best_cost) continue;
            auto canon = format_config(chunk[i]);
            if (!have || better(costs[i], canon, out.best_cost, best_canon)) {
                have = true;
                out.best_cost = costs[i];
                out.best_config = chunk[i];
                best_canon = std::move(canon);
            }
        }
        out.enumerated += chunk.size();
    }
    if (!have) throw SpaceError("the restricted space holds no feasible configuration");
    out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<SummaryRow> summarize_run(const std::filesystem::path& dir) {
    const json run = read_run_json(dir);
    const std::string method = run.value("method", "");
    const std::string settings = run.value("settings", "");
    std::vector<SummaryRow> rows;
    if (method == "agent") {
        const auto results = read_csv(dir / "RESULTS.csv");
        SummaryRow r{method, settings, min_column(results, "weighted_cost", dir / "RESULTS.csv"), runtime_field(run),
                     results.rows.size()};
        rows.push_back(std::move(r));
    } else if (method == "sa") {
        const auto trace = read_csv(dir / "trace.csv");
        rows.push_back({method, settings, min_column(trace, "cost", dir / "trace.csv"), runtime_field(run),
                        trace.rows.size()});
    } else if (method == "sa-grid") {
        const auto grid = read_csv(dir / "grid.csv");
        const int s = grid.column("settings"), c = grid.column("best_cost"), rt = grid.column("runtime_s"),
                  ev = grid.column("evaluations");
        if (s < 0 || c < 0 || rt < 0 || ev < 0) throw ParseError(fmt::format("{}/grid.csv: missing columns", dir.string()));
        for (const auto& row : grid.rows) {
            if (row.size() != grid.header.size()) throw ParseError(fmt::format("{}/grid.csv: short row", dir.string()));
            rows.push_back({method, row[s], parse_double(row[c], "grid.csv"), row[rt],
                            static_cast<std::uint64_t>(parse_double(row[ev], "grid.csv"))});
        }
    } else if (method == "bruteforce") {
        if (!run.contains("best_cost") || !run.contains("evaluations"))
            throw ParseError(fmt::format("{}/RUN.json: missing best_cost or evaluations", dir.string()));
        rows.push_back({method, settings, run["best_cost"].get<double>(), runtime_field(run),
                        run["evaluations"].get<std::uint64_t>()});
    } else {
        throw ParseError(fmt::format("{}/RUN.json: unknown method '{}'", dir.string(), method));
    }
    return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out(kSummaryHeader);
    out += '\n';
    for (const auto& r : rows)
        out += csv_line({r.method, r.settings, format_number(r.best_cost), r.runtime_s, std::to_string(r.evaluations)});
    return out;
}

}  // namespace chipdse
