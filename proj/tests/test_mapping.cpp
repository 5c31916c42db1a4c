// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <tuple>

#include "chipdse/errors.hpp"
#include "chipdse/mapping.hpp"
#include "chipdse/rng.hpp"
#include "helpers.hpp"

using namespace chipdse;
using chipdse::testing::cfg;
using chipdse::testing::full_space;

namespace {

const WorkloadSpec& wl(int i) { return builtin_workloads().at(i - 1); }

std::int64_t total_reads(const MappingResult& r) {
    std::int64_t s = 0;
    for (const auto& w : r.chiplets) s += w.dram_read_bytes;
    return s;
}

// Block-by-block replay: every output block loads its A row panel and B
// column panel from DRAM, truncated at the matrix edges.
std::int64_t simulate_reads(std::int64_t m, std::int64_t k, std::int64_t n, std::int64_t bm, std::int64_t bn) {
    std::int64_t bytes = 0;
    for (std::int64_t i0 = 0; i0 < m; i0 += bm) {
        for (std::int64_t j0 = 0; j0 < n; j0 += bn) {
            const auto rows = std::min(bm, m - i0);
            const auto cols = std::min(bn, n - j0);
            bytes += rows * k;  // A panel, 1-byte elements
            bytes += k * cols;  // B panel
        }
    }
    return bytes;
}

struct Oracle {
    std::int64_t reads;
    std::int64_t bm;
    std::int64_t bn;
};

// Exhaustive search over every legal (Bm, Bn) pair.
Oracle best_block(std::int64_t m, std::int64_t k, std::int64_t n, int a, int sram_kb, Dataflow df) {
    const std::int64_t cap = static_cast<std::int64_t>(sram_kb) * 1024;
    std::optional<std::tuple<std::int64_t, std::int64_t, std::int64_t>> best;
    Oracle out{0, a, a};
    for (std::int64_t bm = a; bm < m + a; bm += a) {
        for (std::int64_t bn = a; bn < n + a; bn += a) {
            if (bm * k + k * bn + 4 * bm * bn > cap) continue;
            const auto reads = simulate_reads(m, k, n, bm, bn);
            std::tuple<std::int64_t, std::int64_t, std::int64_t> key;
            switch (df) {
                case Dataflow::OS: key = {reads, -bm * bn, -bm}; break;
                case Dataflow::WS: key = {reads, -bn, -bm}; break;
                case Dataflow::IS: key = {reads, -bm, -bn}; break;
            }
            if (!best || key < *best) {
                best = key;
                out = {reads, bm, bn};
            }
        }
    }
    if (!best) out = {simulate_reads(m, k, n, a, a), a, a};
    return out;
}

ChipletWork work(std::int64_t m, std::int64_t k, std::int64_t n) { return {m, k, n, m * k * n, 0, 0, 0, 0, 0}; }

}  // namespace

TEST_CASE("bundled workloads") {
    REQUIRE(builtin_workloads().size() == 6);
    CHECK(wl(1).label == "GPT-2 - MLP (feed-forward)");
    CHECK(std::tie(wl(6).m, wl(6).k, wl(6).n) == std::tuple{1316, 24, 144});
    const auto file = load_workloads(data_dir() / "workloads.json");
    CHECK(file == builtin_workloads());

    CHECK(resolve_workload("WL-6") == wl(6));
    CHECK(resolve_workload("wl6") == wl(6));
    CHECK(resolve_workload("6") == wl(6));
    const auto custom = resolve_workload("10,20,30");
    CHECK(std::tie(custom.m, custom.k, custom.n) == std::tuple{10, 20, 30});
    CHECK_THROWS_AS(resolve_workload("WL-7"), ParseError);
    CHECK_THROWS_AS(resolve_workload("1,2"), ParseError);
    CHECK_THROWS_AS(resolve_workload("0,2,3"), ParseError);
}

TEST_CASE("single chiplet gets the whole GEMM") {
    const auto r = map_workload(wl(1), cfg("1|96-7-1024|1-WS-1|1|2D-NA-DDR5|NA|ring"));
    REQUIRE(r.chiplets.size() == 1);
    const auto& w = r.chiplets[0];
    CHECK(std::tie(w.m, w.k, w.n) == std::tie(wl(1).m, wl(1).k, wl(1).n));
    CHECK(w.d2d_send_bytes == 0);
    CHECK(r.total_d2d_bytes == 0);
    CHECK(w.dram_write_bytes == wl(1).m * wl(1).n * 4);
}

TEST_CASE("split-K on two identical chiplets") {
    const auto r = partition(wl(6), cfg("2|64-7-256;64-7-256|0-OS-1|0|3D-HB-DDR5|UC3|ring"));
    REQUIRE(r.chiplets.size() == 2);
    for (const auto& w : r.chiplets) {
        CHECK(w.k == 12);
        CHECK(w.m == 1316);
        CHECK(w.n == 144);
    }
    CHECK(r.chiplets[0].d2d_send_bytes == 0);
    CHECK(r.chiplets[1].d2d_send_bytes == 1316 * 144 * 4);
    CHECK(r.total_d2d_bytes == 1316 * 144 * 4);
    CHECK(r.chiplets[0].dram_write_bytes == 1316 * 144 * 4);
    CHECK(r.chiplets[1].dram_write_bytes == 0);
}

TEST_CASE("N split proportional to array area") {
    const WorkloadSpec even{"even", 512, 768, 3000, ""};
    const auto r = partition(even, cfg("2|128-7-1024;64-7-256|0-OS-0|0|2.5D-RDL-DDR5|UCS|ring"));
    CHECK(r.chiplets[0].n == 2400);  // 128^2 : 64^2 = 4 : 1
    CHECK(r.chiplets[1].n == 600);
    CHECK(allocation_rank(cfg("2|128-7-1024;64-7-256|0-OS-0|0|2.5D-RDL-DDR5|UCS|ring")) == std::vector{0, 1});

    // One leftover column goes to whichever chiplet is allocated first.
    const WorkloadSpec odd{"odd", 512, 768, 3001, ""};
    const auto desc = partition(odd, cfg("2|128-7-1024;64-7-256|0-OS-0|0|2.5D-RDL-DDR5|UCS|ring"));
    CHECK(desc.chiplets[0].n == 2401);
    CHECK(desc.chiplets[1].n == 600);
    const auto asc = partition(odd, cfg("2|128-7-1024;64-7-256|1-OS-0|0|2.5D-RDL-DDR5|UCS|ring"));
    CHECK(asc.chiplets[0].n == 2400);
    CHECK(asc.chiplets[1].n == 601);
    CHECK(allocation_rank(cfg("2|128-7-1024;64-7-256|1-OS-0|0|2.5D-RDL-DDR5|UCS|ring")) == std::vector{1, 0});
}

TEST_CASE("blocked DRAM model against a tiling replay") {
    SUBCASE("frozen reference: WL-6 on 64-7-256") {
        const auto t = dram_traffic(work(1316, 24, 144), {64, 7, 256}, parse_mapping("0-OS-0"));
        const auto o = best_block(1316, 24, 144, 64, 256, Dataflow::OS);
        CHECK(t.read_bytes() == o.reads);
        CHECK(t.block_m == o.bm);
        CHECK(t.block_n == o.bn);
        CHECK(t.read_bytes() == 48864);
        CHECK(t.block_m == 320);
        CHECK(t.block_n == 192);
        CHECK(t.write_bytes == 1316 * 144 * 4);
    }
    SUBCASE("seeded random works across chiplet types and dataflows") {
        Rng rng(99);
        for (int trial = 0; trial < 150; ++trial) {
            const std::int64_t m = 1 + static_cast<std::int64_t>(rng.index(700));
            const std::int64_t k = 1 + static_cast<std::int64_t>(rng.index(3000));
            const std::int64_t n = 1 + static_cast<std::int64_t>(rng.index(700));
            const int a = kArrayDims[rng.index(kArrayDims.size())];
            const int s = kSramSizes[rng.index(kSramSizes.size())];
            const auto df = kDataflows[rng.index(kDataflows.size())];
            CAPTURE(m);
            CAPTURE(k);
            CAPTURE(n);
            CAPTURE(a);
            CAPTURE(s);
            MappingSpec mapping;
            mapping.dataflow = df;
            const auto t = dram_traffic(work(m, k, n), {a, 7, s}, mapping);
            const auto o = best_block(m, k, n, a, s, df);
            CHECK(t.read_bytes() == o.reads);
            CHECK(t.block_m == o.bm);
            CHECK(t.block_n == o.bn);
        }
    }
    SUBCASE("whole problem fits: each operand read once") {
        const auto t = dram_traffic(work(64, 64, 64), {64, 7, 2048}, {});
        CHECK(t.read_bytes() == 64 * 64 + 64 * 64);
    }
    SUBCASE("minimal block overflow falls back to A x A") {
        const auto t = dram_traffic(work(256, 100000, 256), {64, 7, 256}, {});
        CHECK(t.block_m == 64);
        CHECK(t.block_n == 64);
        CHECK(t.read_bytes() == simulate_reads(256, 100000, 256, 64, 64));
    }
}

TEST_CASE("data sharing on two identical split-K chiplets halves shared reads") {
    const auto base = cfg("2|64-7-256;64-7-256|0-OS-1|0|3D-HB-DDR5|UC3|ring");
    auto shared_cfg = base;
    shared_cfg.mapping.data_sharing = true;
    const auto plain = partition(wl(6), base);
    const auto shared = apply_data_sharing(plain, shared_cfg.mapping);
    CHECK(apply_data_sharing(plain, base.mapping) == plain);
    CHECK(total_reads(shared) * 2 == total_reads(plain));
    CHECK(shared.shared_dram_savings_bytes == total_reads(plain) / 2);
    CHECK(shared.total_d2d_bytes - plain.total_d2d_bytes == shared.shared_dram_savings_bytes);
    // Equal volumes: the lowest index owns the broadcast.
    CHECK(shared.chiplets[0].dram_read_bytes == plain.chiplets[0].dram_read_bytes);
    CHECK(shared.chiplets[1].dram_read_bytes == 0);
}

TEST_CASE("data sharing is the identity on one chiplet") {
    const auto c = cfg("1|64-7-256|0-OS-1|1|2D-NA-DDR5|NA|ring");
    const auto p = partition(wl(3), c);
    CHECK(apply_data_sharing(p, c.mapping) == p);
}

TEST_CASE("mapping properties over seeded samples") {
    const auto samples = sample_uniform(full_space(), 1000, 2024);
    int wl_idx = 0;
    for (const auto& c : samples) {
        const auto& w = builtin_workloads()[wl_idx++ % 6];
        CAPTURE(format_config(c));
        const auto p = partition(w, c);
        const auto r = apply_data_sharing(p, c.mapping);

        std::int64_t macs = 0, d2d = 0;
        for (const auto& cw : r.chiplets) {
            macs += cw.macs;
            d2d += cw.d2d_send_bytes;
            CHECK(cw.macs == cw.m * cw.k * cw.n);
            CHECK(cw.dram_read_bytes >= 0);
            CHECK(cw.d2d_send_bytes >= 0);
            if (!c.mapping.split_k) CHECK(cw.k == w.k);
        }
        CHECK(macs == w.m * w.k * w.n);
        CHECK(d2d == r.total_d2d_bytes);

        CHECK(total_reads(r) <= total_reads(p));
        CHECK(r.total_d2d_bytes >= p.total_d2d_bytes);

        if (c.count() == 1) {
            auto flipped = c;
            flipped.mapping.split_k = !flipped.mapping.split_k;
            CHECK(map_workload(w, flipped) == r);
        }

        // SRAM monotonicity on the first chiplet's work.
        const auto& cw = p.chiplets[0];
        if (cw.m > 0 && cw.k > 0 && cw.n > 0) {
            auto chip = c.chiplets[0];
            std::int64_t prev = -1;
            for (int s : kSramSizes) {
                if (s < minimum_sram_kb(chip.array_dim)) continue;
                chip.sram_kb = s;
                const auto reads = dram_traffic(cw, chip, c.mapping).read_bytes();
                if (prev >= 0) CHECK(reads <= prev);
                prev = reads;
            }
        }
    }
}

TEST_CASE("order flip with identical chiplets") {
    for (int n = 2; n <= 6; ++n) {
        SystemConfig c;
        c.chiplets.assign(n, {96, 7, 512});
        c.package = parse_package("3D-HB-HBM3");
        for (bool sk : {false, true}) {
            c.mapping = {AssignOrder::Ascending, Dataflow::WS, sk, false};
            auto a = partition(wl(2), c).chiplets;
            c.mapping.order = AssignOrder::Descending;
            auto d = partition(wl(2), c).chiplets;
            auto key = [](const ChipletWork& x) { return std::tie(x.m, x.k, x.n, x.dram_read_bytes, x.d2d_send_bytes); };
            auto less = [&](const ChipletWork& x, const ChipletWork& y) { return key(x) < key(y); };
            std::sort(a.begin(), a.end(), less);
            std::sort(d.begin(), d.end(), less);
            CHECK(a == d);
        }
    }
}

TEST_CASE("equal-size chiplets rank by spec, not position") {
    const auto a = cfg("2|96-7-768;96-10-256|0-OS-0|1|2.5D-RDL-DDR5|UCS|ring");
    const auto b = cfg("2|96-10-256;96-7-768|0-OS-0|1|2.5D-RDL-DDR5|UCS|ring");
    CHECK(allocation_rank(a) == std::vector{0, 1});
    CHECK(allocation_rank(b) == std::vector{1, 0});

    // N = 3 odd split: the 7 nm die gets the extra column in either order.
    const WorkloadSpec wl{"t", 64, 64, 3, ""};
    const auto ra = map_workload(wl, a);
    const auto rb = map_workload(wl, b);
    CHECK(ra.chiplets[0] == rb.chiplets[1]);
    CHECK(ra.chiplets[1] == rb.chiplets[0]);
    CHECK(ra.chiplets[0].n == 2);
}
