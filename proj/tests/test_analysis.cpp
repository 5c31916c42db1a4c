// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "chipdse/analysis.hpp"
#include "chipdse/errors.hpp"
#include "chipdse/rng.hpp"
#include "helpers.hpp"

using namespace chipdse;
using chipdse::testing::consts;
using chipdse::testing::full_space;
using chipdse::testing::restriction;
using chipdse::testing::scratch_dir;
namespace fs = std::filesystem;

namespace {

std::vector<ParetoPoint> pts(std::initializer_list<std::pair<double, double>> xy) {
    std::vector<ParetoPoint> out;
    int i = 0;
    for (const auto& [r, c] : xy) out.push_back({r, c, "p" + std::to_string(i++)});
    return out;
}

// Independent frontier: keep points no other point dominates.
std::vector<ParetoPoint> naive_frontier(const std::vector<ParetoPoint>& all) {
    std::vector<ParetoPoint> out;
    for (const auto& q : all) {
        bool dominated = false;
        for (const auto& p : all) {
            if ((p.runtime_s <= q.runtime_s && p.cost <= q.cost) &&
                (p.runtime_s < q.runtime_s || p.cost < q.cost)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.push_back(q);
    }
    std::sort(out.begin(), out.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        return std::tie(a.runtime_s, a.cost, a.label) < std::tie(b.runtime_s, b.cost, b.label);
    });
    return out;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

CostModel model_for(int wl_index) {
    const auto& wl = builtin_workloads()[wl_index];
    return CostModel{wl, resolve_profile("balance"), compute_basis(wl, full_space(), consts(), 500, 3), consts()};
}

}  // namespace

TEST_CASE("dominance") {
    CHECK(dominates({1, 1, ""}, {2, 2, ""}));
    CHECK(dominates({1, 2, ""}, {1, 3, ""}));
    CHECK_FALSE(dominates({1, 1, ""}, {1, 1, ""}));
    CHECK_FALSE(dominates({1, 3, ""}, {2, 2, ""}));
}

TEST_CASE("pareto frontier") {
    const auto f = pareto_frontier(pts({{10, 5}, {20, 4}, {15, 6}}));
    REQUIRE(f.size() == 2);
    CHECK(f[0] == ParetoPoint{10, 5, "p0"});
    CHECK(f[1] == ParetoPoint{20, 4, "p1"});
    CHECK(pareto_frontier(pts({{3, 3}})) == pts({{3, 3}}));
    CHECK_THROWS_AS(pareto_frontier({}), SpaceError);

    // Exact duplicates survive together; weakly dominated points do not.
    const auto d = pareto_frontier(pts({{1, 5}, {1, 5}, {1, 6}, {2, 5}}));
    CHECK(d.size() == 2);

    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ParetoPoint> all;
        const int n = 1 + static_cast<int>(rng.index(60));
        for (int i = 0; i < n; ++i)
            all.push_back({static_cast<double>(rng.index(20)), static_cast<double>(rng.index(20)), std::to_string(i)});
        const auto front = pareto_frontier(all);
        CHECK(front == naive_frontier(all));
        CHECK(pareto_frontier(front) == front);
        for (const auto& q : all) {
            bool on_front = std::find(front.begin(), front.end(), q) != front.end();
            bool covered = on_front;
            for (const auto& p : front) {
                CHECK_FALSE(dominates(q, p));
                covered |= dominates(p, q);
            }
            CHECK(covered);
        }
    }
}

TEST_CASE("pareto csv and svg") {
    const auto dir = scratch_dir("pareto");
    write(dir / "a.csv", "label,runtime_s,cost\nx,1.5,3\ny,2,1\n");
    write(dir / "grid.csv", "settings,t0,rate,best_cost,runtime_s,evaluations,best_config\ns1,4000,0.7,2.5,0.25,100,c\n");
    write(dir / "blank.csv", "label,runtime_s,cost\nx,,3\n");
    write(dir / "nocost.csv", "label,runtime_s\nx,1\n");

    const auto a = read_pareto_csv(dir / "a.csv");
    CHECK(a == std::vector<ParetoPoint>{{1.5, 3, "x"}, {2, 1, "y"}});
    const auto g = read_pareto_csv(dir / "grid.csv");
    CHECK(g == std::vector<ParetoPoint>{{0.25, 2.5, "s1"}});
    CHECK_THROWS_AS(read_pareto_csv(dir / "blank.csv"), ParseError);
    CHECK_THROWS_AS(read_pareto_csv(dir / "nocost.csv"), ParseError);
    CHECK_THROWS_AS(read_pareto_csv(dir / "missing.csv"), ParseError);

    std::ostringstream out;
    write_pareto_csv(out, a);
    CHECK(out.str() == "label,runtime_s,cost\nx,1.5,3\ny,2,1\n");

    const auto svg = pareto_svg(a, pareto_frontier(a), "WL-6 balance");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("WL-6 balance") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("brute force matches a hand count") {
    // One chiplet: 2D with DDR5 only (HBM3 is blacklisted on 2D), 4 chiplet types, 24 mappings = 96.
    // Two chiplets: 3D only, 4 types x {uB, HB} x UC3 x {DDR5, HBM3} x 24 mappings = 384.
    const auto space = full_space().restricted(restriction(
        R"({"count":[1,2],"homogeneous":true,"array_dim":[64,96],"tech_node":[7],"sram_kb":[256,512],)"
        R"("integration":["2D","3D"],"memory":["DDR5","HBM3"],"topology":["mesh"]})"));
    const auto model = model_for(0);
    const auto r = brute_force(model, space, kBruteForceCap, "hand");
    CHECK(r.enumerated == 96 + 384);
    CHECK(r.description == "hand");

    // The reported optimum is the exact minimum with the canonical tie rule.
    Enumerator e(space);
    std::optional<std::pair<double, std::string>> best;
    while (auto c = e.next()) {
        const double cost = model.cost(*c);
        const auto canon = format_config(*c);
        if (!best || cost < best->first || (cost == best->first && canon < best->second)) best = {cost, canon};
    }
    CHECK(r.best_cost == best->first);
    CHECK(format_config(r.best_config) == best->second);

    SUBCASE("determinism") {
        const auto again = brute_force(model, space);
        CHECK(again.best_cost == r.best_cost);
        CHECK(format_config(again.best_config) == format_config(r.best_config));
    }
    SUBCASE("cap") {
        CHECK_THROWS_AS(brute_force(model, space, 10), CapExceededError);
        CHECK_THROWS_AS(brute_force(model, full_space()), CapExceededError);
    }
    SUBCASE("singleton") {
        const auto one = full_space().restricted(restriction(
            R"({"count":[1],"array_dim":[64],"tech_node":[7],"sram_kb":[256],"order":[0],"dataflow":["OS"],)"
            R"("split_k":[0],"data_sharing":[0],"memory":["DDR5"],"topology":["ring"]})"));
        const auto s = brute_force(model, one);
        CHECK(s.enumerated == 1);
        CHECK(format_config(s.best_config) == "1|64-7-256|0-OS-0|0|2D-NA-DDR5|NA|ring");
    }
    SUBCASE("empty") {
        const auto none = full_space().restricted(restriction(R"({"count":[1],"memory":["HBM3"]})"));
        CHECK_THROWS_AS(brute_force(model, none), SpaceError);
    }
}

TEST_CASE("run summaries") {
    const auto root = scratch_dir("summary");
    fs::create_directories(root / "agent");
    write(root / "agent" / "RUN.json", R"({"method":"agent","settings":"agents=2","runtime_s":1.5})");
    write(root / "agent" / "RESULTS.csv",
          "iteration,plan_id,config,energy_j,area_mm2,latency_s,mfg_cost_usd,norm_e,norm_a,norm_l,norm_c,weighted_"
          "cost,backend,timestamp_iso8601\n"
          "1,1,a,1,1,1,1,1,1,1,1,3.5,heuristic,\n1,2,b,1,1,1,1,1,1,1,1,2.25,heuristic,\n");
    fs::create_directories(root / "sa");
    write(root / "sa" / "RUN.json", R"({"method":"sa","settings":"t0=4000","runtime_s":null})");
    write(root / "sa" / "trace.csv", "eval_idx,temperature,cost,accepted,config\n0,4000,5,1,a\n1,4000,4,1,b\n2,4000,4.5,0,c\n");
    fs::create_directories(root / "grid");
    write(root / "grid" / "RUN.json", R"({"method":"sa-grid","runtime_s":null})");
    write(root / "grid" / "grid.csv",
          "settings,t0,rate,best_cost,runtime_s,evaluations,best_config\ns1,4000,0.7,2.5,,100,c\ns2,4000,0.71,2.4,,120,d\n");
    fs::create_directories(root / "bf");
    write(root / "bf" / "RUN.json", R"({"method":"bruteforce","settings":"","best_cost":2.0,"evaluations":480,"runtime_s":0.1})");

    std::vector<SummaryRow> rows;
    for (const char* d : {"agent", "sa", "grid", "bf"}) {
        for (auto& r : summarize_run(root / d)) rows.push_back(r);
    }
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].best_cost == 2.25);
    CHECK(rows[0].evaluations == 2);
    CHECK(rows[0].runtime_s == "1.5");
    CHECK(rows[1].best_cost == 4);
    CHECK(rows[1].evaluations == 3);
    CHECK(rows[1].runtime_s.empty());
    CHECK(rows[3].settings == "s2");
    CHECK(rows[4].evaluations == 480);
    const auto csv = summary_csv(rows);
    CHECK(csv ==
          "method,settings,best_cost,runtime_s,evaluations\n"
          "agent,agents=2,2.25,1.5,2\nsa,t0=4000,4,,3\nsa-grid,s1,2.5,,100\nsa-grid,s2,2.4,,120\nbruteforce,,2,0.1,480\n");

    fs::create_directories(root / "bad");
    write(root / "bad" / "RUN.json", R"({"method":"magic"})");
    CHECK_THROWS_AS(summarize_run(root / "bad"), ParseError);
    CHECK_THROWS_AS(summarize_run(root / "nothing"), ParseError);
}
