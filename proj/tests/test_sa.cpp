// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "chipdse/errors.hpp"
#include "chipdse/sa.hpp"
#include "helpers.hpp"

using namespace chipdse;
using chipdse::testing::cfg;
using chipdse::testing::consts;
using chipdse::testing::full_space;

namespace {

const CostModel& model() {
    static const CostModel m = [] {
        const auto& wl = builtin_workloads()[5];
        return CostModel{wl, resolve_profile("balance"), compute_basis(wl, full_space(), consts(), 500, 3), consts()};
    }();
    return m;
}

SaSettings quick(std::uint64_t seed) {
    SaSettings s;
    s.seed = seed;
    s.t0 = 4000;
    s.rate = 0.8;
    s.moves_per_temp = 20;
    return s;
}

}  // namespace

TEST_CASE("settings validation") {
    SaSettings s;
    CHECK_NOTHROW(s.validate());
    s.t_final = s.t0;
    CHECK_THROWS_AS(s.validate(), ParseError);
    s = {};
    s.rate = 1.0;
    CHECK_THROWS_AS(s.validate(), ParseError);
    s = {};
    s.moves_per_temp = 0;
    CHECK_THROWS_AS(s.validate(), ParseError);
    s = {};
    s.t_final = 0;
    CHECK_THROWS_AS(s.validate(), ParseError);
}

TEST_CASE("neighbor moves") {
    const auto start = cfg("3|128-7-1024;96-10-512;64-14-256|0-OS-0|1|2.5D-RDL-DDR5|UCS|mesh");
    REQUIRE(full_space().feasible(start));
    Rng rng(21);
    std::set<MoveDim> hit;
    for (int i = 0; i < 10000; ++i) {
        const auto nb = neighbor(start, full_space(), rng);
        CHECK(full_space().feasible(nb.config));
        if (nb.null_move) {
            CHECK(format_config(nb.config) == format_config(start));
        } else {
            CHECK(format_config(nb.config) != format_config(start));
            hit.insert(nb.dim);
        }
    }
    CHECK(hit.size() == kMoveDims);

    // A walk stays feasible.
    auto cur = start;
    for (int i = 0; i < 2000; ++i) {
        cur = neighbor(cur, full_space(), rng).config;
        REQUIRE(full_space().feasible(cur));
    }
}

TEST_CASE("acceptance probability") {
    CHECK(accept_probability(500, 1000) == doctest::Approx(std::exp(-0.5)));
    CHECK(accept_probability(0, 1000) == 1.0);
    CHECK(accept_probability(-3, 10) == 1.0);
    CHECK(accept_probability(1, 1e-12) == doctest::Approx(0.0));

    Rng rng(99);
    const int trials = 100000;
    int accepted = 0;
    for (int i = 0; i < trials; ++i) accepted += rng.uniform01() < accept_probability(500, 1000);
    const double p = std::exp(-0.5);
    const double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(accepted) / trials - p) <= 3 * sigma);
}

TEST_CASE("anneal trace") {
    const auto s = quick(4);
    const auto trace = anneal(model(), full_space(), s);
    REQUIRE(!trace.records.empty());
    CHECK(trace.records.size() <= s.eval_budget);
    CHECK(trace.records.size() == trace.best_so_far.size());
    for (std::size_t i = 1; i < trace.best_so_far.size(); ++i) CHECK(trace.best_so_far[i] <= trace.best_so_far[i - 1]);
    CHECK(trace.best_cost == trace.best_so_far.back());
    CHECK(model().cost(trace.best_config) == trace.best_cost);
    for (const auto& r : trace.records) CHECK(full_space().feasible(r.config));
    double lowest = INFINITY;
    for (const auto& r : trace.records) lowest = std::min(lowest, r.cost);
    CHECK(lowest == trace.best_cost);

    SUBCASE("same seed, same trace") {
        const auto again = anneal(model(), full_space(), s);
        std::ostringstream a, b;
        write_trace_csv(a, trace);
        write_trace_csv(b, again);
        CHECK(a.str() == b.str());
        const auto other = anneal(model(), full_space(), quick(5));
        std::ostringstream c;
        write_trace_csv(c, other);
        CHECK(c.str() != a.str());
    }
    SUBCASE("trace csv") {
        std::ostringstream out;
        write_trace_csv(out, trace);
        std::istringstream in(out.str());
        std::string header;
        std::getline(in, header);
        CHECK(header == "eval_idx,temperature,cost,accepted,config");
        std::size_t rows = 0;
        for (std::string line; std::getline(in, line);) ++rows;
        CHECK(rows == trace.records.size());
    }
    SUBCASE("budget caps the trace") {
        auto capped = s;
        capped.eval_budget = 37;
        CHECK(anneal(model(), full_space(), capped).records.size() == 37);
    }
}

TEST_CASE("near-zero temperature accepts only improvements") {
    SaSettings s;
    s.seed = 8;
    s.t_final = 1e-9;
    s.t0 = 1e-9 * (1 + 1e-6);
    s.moves_per_temp = 400;
    const auto trace = anneal(model(), full_space(), s);
    double current = trace.records.front().cost;
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        if (r.cost > current) CHECK_FALSE(r.accepted);
        if (r.cost <= current) CHECK(r.accepted);
        if (r.accepted) current = r.cost;
    }
}

TEST_CASE("grid sweep") {
    CHECK(default_t0_range().size() == 13);
    CHECK(default_t0_range().front() == 4000);
    CHECK(default_t0_range().back() == 10000);
    CHECK(default_rate_range().size() == 30);
    CHECK(default_rate_range().front() == doctest::Approx(0.70));
    CHECK(default_rate_range().back() == doctest::Approx(0.99));

    SaSettings base;
    base.eval_budget = 20;
    const auto grid = grid_sweep(model(), full_space(), base, default_t0_range(), default_rate_range());
    REQUIRE(grid.size() == 390);
    CHECK(grid[0].settings.t0 == 4000);
    CHECK(grid[0].settings.rate == doctest::Approx(0.70));
    CHECK(grid[1].settings.rate == doctest::Approx(0.71));
    CHECK(grid[30].settings.t0 == 4500);
    for (const auto& g : grid) {
        CHECK(g.evaluations == 20);
        CHECK(model().cost(g.best_config) == g.best_cost);
    }
    CHECK(grid_sweep(model(), full_space(), base, {5000}, {0.9}).size() == 1);
    CHECK_THROWS_AS(grid_sweep(model(), full_space(), base, {}, {0.9}), ParseError);
}

TEST_CASE("annealing never beats the exhaustive optimum") {
    const auto space = full_space().restricted(chipdse::testing::restriction(
        R"({"count":[1,2],"array_dim":[64,128],"tech_node":[7],"sram_kb":[256,1024],"memory":["DDR5"],"topology":["mesh"]})"));
    double optimum = INFINITY;
    Enumerator e(space);
    while (auto c = e.next()) optimum = std::min(optimum, model().cost(*c));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto t = anneal(model(), space, quick(seed));
        CHECK(t.best_cost >= optimum);
        for (const auto& r : t.records) CHECK(space.feasible(r.config));
    }
}
