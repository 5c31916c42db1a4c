// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <set>

#include "chipdse/design_space.hpp"
#include "chipdse/errors.hpp"
#include "chipdse/shorthand.hpp"
#include "helpers.hpp"
#include "table_rows.hpp"

using namespace chipdse;
using chipdse::testing::cfg;
using chipdse::testing::consts;
using chipdse::testing::full_space;
using chipdse::testing::kTableRows;
using chipdse::testing::restriction;

namespace {

bool has_violation(const Feasibility& f, std::string_view id) {
    for (const auto& v : f.violations)
        if (v == id) return true;
    return false;
}

Feasibility check(const SystemConfig& c) { return full_space().check(c); }

SystemConfig two_chiplet(Integration integ, Interconnect ic, Protocol proto) {
    SystemConfig c;
    c.chiplets = {{64, 7, 256}, {64, 7, 256}};
    c.package.integration = integ;
    c.package.interconnect = ic;
    c.package.protocol = proto;
    return c;
}

}  // namespace

TEST_CASE("chiplet shorthand") {
    CHECK(parse_chiplet("64-7-512") == ChipletSpec{64, 7, 512});
    CHECK(parse_chiplet("96-7-1024") == ChipletSpec{96, 7, 1024});
    CHECK(format_chiplet({160, 14, 1536}) == "160-14-1536");
    CHECK_THROWS_AS(parse_chiplet("64-9-512"), ParseError);
    CHECK_THROWS_AS(parse_chiplet("65-7-512"), ParseError);
    CHECK_THROWS_AS(parse_chiplet("64-7-300"), ParseError);
    CHECK_THROWS_AS(parse_chiplet("64-7"), ParseError);
    CHECK_THROWS_AS(parse_chiplet("64-7-x"), ParseError);

    try {
        parse_chiplet("64-9-512");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find('9') != std::string::npos);
    }
}

TEST_CASE("chiplet lists with replica suffixes") {
    const auto chips = parse_chiplet_list("64-7-256 x3, 96-7-512 x2");
    REQUIRE(chips.size() == 5);
    CHECK(chips[0] == ChipletSpec{64, 7, 256});
    CHECK(chips[4] == ChipletSpec{96, 7, 512});
    CHECK(format_chiplet_list(chips) == "64-7-256 x3, 96-7-512 x2");
    CHECK(format_chiplet_list(parse_chiplet_list("96-7-1024, 64-10-768")) == "96-7-1024, 64-10-768");
}

TEST_CASE("mapping shorthand") {
    CHECK(parse_mapping("1-OS-0") == MappingSpec{AssignOrder::Ascending, Dataflow::OS, false, false});
    CHECK(parse_mapping("0-IS-1") == MappingSpec{AssignOrder::Descending, Dataflow::IS, true, false});
    CHECK(format_mapping(parse_mapping("0-WS-1")) == "0-WS-1");
    CHECK_THROWS_AS(parse_mapping("0-XX-1"), ParseError);
    CHECK_THROWS_AS(parse_mapping("2-OS-1"), ParseError);
    CHECK_THROWS_AS(parse_mapping("0-OS-2"), ParseError);
}

TEST_CASE("package shorthand") {
    const auto p = parse_package("2.5D-RDL-DDR5");
    CHECK(p.integration == Integration::TwoPointFiveD);
    CHECK(p.interconnect == Interconnect::RDL);
    CHECK(p.memory == Memory::DDR5);
    CHECK(p.protocol == Protocol::UCS);
    CHECK(p.topology == Topology::Ring);

    const auto hb = parse_package("3D-HB-HBM3");
    CHECK(hb.integration == Integration::ThreeD);
    CHECK(hb.interconnect == Interconnect::HybridBond);
    CHECK(hb.memory == Memory::HBM3);
    CHECK(hb.protocol == Protocol::UC3);

    const auto flat = parse_package("2D-NA-DDR5");
    CHECK(flat.integration == Integration::TwoD);
    CHECK(flat.interconnect == Interconnect::NA);
    CHECK(flat.protocol == Protocol::NA);

    const auto hybrid = parse_package("2.5D+3D-HB/RDL-HBM3", "UC3/S");
    CHECK(hybrid.integration == Integration::Hybrid);
    CHECK(hybrid.interconnect == Interconnect::HybridBond);
    CHECK(hybrid.protocol == Protocol::UC3);
    CHECK(hybrid.lateral_interconnect == Interconnect::RDL);
    CHECK(hybrid.lateral_protocol == Protocol::UCS);

    CHECK_THROWS_AS(parse_package("2D-RDL-DDR5"), ParseError);
    CHECK_THROWS_AS(parse_package("3D-RDL-DDR5"), ParseError);
    CHECK_THROWS_AS(parse_package("2.5D-RDL-GDDR6"), ParseError);
    CHECK_THROWS_AS(parse_package("4D-RDL-DDR5"), ParseError);
}

TEST_CASE("canonical config format") {
    SystemConfig one;
    one.chiplets = {{64, 7, 512}};
    one.mapping = {AssignOrder::Ascending, Dataflow::IS, true, false};
    CHECK(format_config(one) == "1|64-7-512|1-IS-1|0|2D-NA-DDR5|NA|ring");

    const auto two = cfg("2|96-7-1024;64-10-768|0-OS-1|1|3D-HB-HBM3|UC3|mesh");
    CHECK(format_config(two).starts_with("2|96-7-1024;64-10-768|"));
    CHECK(two.chiplets[0] == ChipletSpec{96, 7, 1024});
    CHECK(two.mapping.data_sharing);
    CHECK(two.package.topology == Topology::Mesh);

    CHECK_THROWS_AS(parse_config("2|64-7-256|0-OS-0|0|2D-NA-DDR5|NA|ring"), ParseError);  // count mismatch
    CHECK_THROWS_AS(parse_config("1|64-7-256|0-OS-0|0|2D-NA-DDR5|NA"), ParseError);
    CHECK_THROWS_AS(parse_config("1|64-7-256|0-OS-0|2|2D-NA-DDR5|NA|ring"), ParseError);
}

TEST_CASE("table fixtures parse and round-trip") {
    for (const auto& row : kTableRows) {
        CAPTURE(row.chiplets);
        const auto chips = parse_chiplet_list(row.chiplets);
        CHECK(static_cast<int>(chips.size()) == row.count);
        CHECK(parse_chiplet_list(format_chiplet_list(chips)) == chips);

        const auto m = parse_mapping(row.mapping);
        CHECK(format_mapping(m) == row.mapping);

        const auto p = parse_package(row.package, row.protocol);
        CHECK(parse_package(format_package(p), format_protocol(p)) == p);

        SystemConfig c{chips, m, p};
        CHECK(parse_config(format_config(c)) == c);
    }
}

TEST_CASE("micro sign and ascii spelling decode the same interconnect") {
    CHECK(parse_package("3D-\xC2\xB5" "B-HBM3") == parse_package("3D-uB-HBM3"));
    CHECK(format_package(parse_package("3D-\xC2\xB5" "B-HBM3")) == "3D-uB-HBM3");
}

TEST_CASE("structural rules from the feasibility examples") {
    SUBCASE("3D-only protocol in a 2.5D package") {
        const auto f = check(two_chiplet(Integration::TwoPointFiveD, Interconnect::RDL, Protocol::UC3));
        CHECK(has_violation(f, rule::kUc3Requires3d));
    }
    SUBCASE("2.5D+3D with two chiplets") {
        auto c = two_chiplet(Integration::Hybrid, Interconnect::HybridBond, Protocol::UC3);
        c.package.lateral_interconnect = Interconnect::RDL;
        c.package.lateral_protocol = Protocol::UCS;
        CHECK(has_violation(check(c), rule::kHybridMinChiplets));
    }
    SUBCASE("larger die on a smaller one") {
        const auto c = cfg("2|64-7-256;128-7-1024|0-OS-0|0|3D-HB-DDR5|UC3|ring");
        CHECK(has_violation(check(c), rule::kStackAreaOrder));
        const auto ok = cfg("2|128-7-1024;64-7-256|0-OS-0|0|3D-HB-DDR5|UC3|ring");
        CHECK(check(ok).ok());
    }
    SUBCASE("single chiplet must be 2D") {
        SystemConfig c;
        c.chiplets = {{64, 7, 256}};
        c.package.integration = Integration::TwoPointFiveD;
        c.package.interconnect = Interconnect::RDL;
        c.package.protocol = Protocol::UCS;
        CHECK(has_violation(check(c), rule::kSingleChipletIs2d));
    }
    SUBCASE("link compatibility") {
        CHECK(has_violation(check(two_chiplet(Integration::TwoPointFiveD, Interconnect::RDL, Protocol::UCA)),
                            rule::kLinkCompatibility));
        CHECK(has_violation(check(two_chiplet(Integration::ThreeD, Interconnect::EMIB, Protocol::UC3)),
                            rule::kLinkCompatibility));
        CHECK(check(two_chiplet(Integration::TwoPointFiveD, Interconnect::EMIB, Protocol::UCA)).ok());
    }
}

TEST_CASE("minimum SRAM table") {
    // 4-byte accumulators for one A x A tile, rounded up to an allowed size.
    for (int a : kArrayDims) {
        const int need_kb = (4 * a * a + 1023) / 1024;
        int expected = 0;
        for (int s : kSramSizes) {
            if (s >= need_kb) {
                expected = s;
                break;
            }
        }
        CHECK(minimum_sram_kb(a) == expected);
    }
}

TEST_CASE("blacklist JSON rules") {
    const std::string text = R"([
      {"rule_id": "x.no_hbm2_ring", "when": {"package.memory": "HBM2", "package.topology": "ring"},
       "message": "demo"}])";
    const auto bl = Blacklist::from_json_text(text);
    REQUIRE(bl.valid());
    const auto hit = cfg("2|64-7-256;64-7-256|0-OS-0|0|2.5D-RDL-HBM2|UCS|ring");
    const auto miss = cfg("2|64-7-256;64-7-256|0-OS-0|0|2.5D-RDL-HBM2|UCS|mesh");
    const auto areas = chiplet_areas(hit, consts());
    CHECK_FALSE(check_feasible(hit, bl, areas).ok());
    CHECK(check_feasible(miss, bl, areas).ok());

    SUBCASE("wildcard chiplet paths") {
        const auto w = Blacklist::from_json_text(
            R"([{"rule_id": "x.no14", "when": {"chiplets.*.tech_node": 14}, "message": "m"}])");
        REQUIRE(w.valid());
        const auto c14 = cfg("2|64-7-256;64-14-256|0-OS-0|0|2.5D-RDL-DDR5|UCS|ring");
        CHECK_FALSE(check_feasible(c14, w, chiplet_areas(c14, consts())).ok());
        CHECK(check_feasible(miss, w, areas).ok());
    }

    SUBCASE("malformed files fail closed") {
        for (const char* bad : {"{", "{}", R"([{"rule_id": "a", "when": {}, "message": "m"}])",
                                R"([{"rule_id": "a", "when": {"package.colour": "red"}, "message": "m"}])",
                                R"([{"rule_id": "a", "when": {"package.memory": "HBM9"}, "message": "m"}])",
                                R"([{"rule_id": "a", "when": {"count": 2}, "message": "m"},
                                    {"rule_id": "a", "when": {"count": 3}, "message": "m"}])"}) {
            CAPTURE(bad);
            const auto b = Blacklist::from_json_text(bad);
            CHECK_FALSE(b.valid());
            const auto f = check_feasible(miss, b, areas);
            CHECK(has_violation(f, rule::kBlacklistInvalid));
        }
    }
}

TEST_CASE("bundled blacklist") {
    const auto bl = chipdse::testing::bundled_blacklist();
    REQUIRE(bl.valid());
    CHECK_FALSE(check(cfg("1|64-7-256|0-OS-0|0|2D-NA-HBM3|NA|ring")).ok());
    CHECK_FALSE(check(cfg("1|64-7-256|0-OS-0|0|2D-NA-HBM2|NA|ring")).ok());
    CHECK(check(cfg("1|64-7-256|0-OS-0|0|2D-NA-DDR4|NA|ring")).ok());
}

TEST_CASE("enumeration singleton") {
    const auto space = full_space().restricted(restriction(R"({
        "count": [1], "array_dim": [64], "tech_node": [7], "sram_kb": [512], "memory": ["DDR5"],
        "dataflow": ["OS"], "order": [0], "split_k": [0], "data_sharing": [0], "topology": ["ring"]})"));
    Enumerator en(space);
    std::vector<SystemConfig> all;
    while (auto c = en.next()) all.push_back(*c);
    REQUIRE(all.size() == 1);
    CHECK(format_config(all[0]) == "1|64-7-512|0-OS-0|0|2D-NA-DDR5|NA|ring");
}

TEST_CASE("enumeration count matches a hand count") {
    const auto space = full_space().restricted(restriction(R"({
        "count": [1, 2], "homogeneous": true, "array_dim": [64, 96], "tech_node": [7],
        "sram_kb": [256, 512], "integration": ["2D", "3D"]})"));
    // Chiplet types: 2 arrays x 1 node x 2 SRAM sizes = 4, all above the SRAM minimum.
    // Mapping: 2 orders x 3 dataflows x 2 split-K x 2 sharing = 24. Topologies: 3.
    // One chiplet: 2D only, DDR4/DDR5 (HBM is blacklisted on 2D): 4 * 2 * 3 * 24 = 576.
    // Two equal chiplets: 3D with uB or HB and UC3, any of 4 memories: 4 * 2 * 4 * 3 * 24 = 2304.
    constexpr std::uint64_t hand = 576 + 2304;
    Enumerator en(space);
    std::uint64_t n = 0;
    std::set<std::string> seen;
    while (auto c = en.next()) {
        ++n;
        CHECK(space.check(*c).ok());
        seen.insert(format_config(*c));
    }
    CHECK(n == hand);
    CHECK(seen.size() == hand);
}

TEST_CASE("enumeration agrees with an independent brute-force recount") {
    const auto space = full_space().restricted(restriction(R"({
        "count": [1, 2, 3], "homogeneous": true, "array_dim": [128], "tech_node": [10],
        "sram_kb": [1024], "dataflow": ["WS"], "order": [1], "split_k": [1], "data_sharing": [0]})"));
    std::uint64_t expected = 0;
    const ChipletSpec chip{128, 10, 1024};
    std::vector<Interconnect> ics{Interconnect::NA};
    ics.insert(ics.end(), kLinkInterconnects.begin(), kLinkInterconnects.end());
    std::vector<Protocol> protos{Protocol::NA};
    protos.insert(protos.end(), kLinkProtocols.begin(), kLinkProtocols.end());
    for (int n = 1; n <= 3; ++n) {
        for (auto integ : kIntegrations) {
            for (auto ic : ics) {
                for (auto pr : protos) {
                    for (auto lic : ics) {
                        for (auto lpr : protos) {
                            for (auto mem : kMemories) {
                                for (auto topo : kTopologies) {
                                    SystemConfig c;
                                    c.chiplets.assign(n, chip);
                                    c.mapping = {AssignOrder::Ascending, Dataflow::WS, true, false};
                                    c.package = {integ, ic, mem, pr, topo, lic, lpr};
                                    if (check_feasible(c, space.blacklist, chiplet_areas(c, consts())).ok())
                                        ++expected;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Enumerator en(space);
    std::uint64_t got = 0;
    while (en.next()) ++got;
    CHECK(got == expected);
    CHECK(en.candidate_count() >= got);
}

TEST_CASE("enumeration is deterministic and lexicographic") {
    const auto space = full_space().restricted(restriction(R"({"count": [1, 2], "homogeneous": true,
        "array_dim": [64, 96], "tech_node": [7], "sram_kb": [256], "memory": ["DDR5"]})"));
    Enumerator a(space), b(space);
    while (true) {
        auto x = a.next();
        auto y = b.next();
        REQUIRE(x.has_value() == y.has_value());
        if (!x) break;
        CHECK(*x == *y);
    }
}

TEST_CASE("empty restriction yields an empty stream") {
    const auto space = full_space().restricted(restriction(R"({"count": [1], "integration": ["3D"]})"));
    Enumerator en(space);
    CHECK_FALSE(en.next().has_value());
}

TEST_CASE("restriction values outside the space are rejected") {
    CHECK_THROWS_AS((void)full_space().restricted(restriction(R"({"array_dim": [100]})")), ParseError);
    CHECK_THROWS_AS(restriction(R"({"colour": ["red"]})"), ParseError);
}

TEST_CASE("uniform sampling") {
    const auto a = sample_uniform(full_space(), 10000, 7);
    const auto b = sample_uniform(full_space(), 10000, 7);
    REQUIRE(a.size() == 10000);
    CHECK(a == b);
    std::set<int> counts;
    for (const auto& c : a) {
        REQUIRE(full_space().check(c).ok());
        counts.insert(c.count());
        if (c.count() == 1) CHECK(c.package.integration == Integration::TwoD);
    }
    CHECK(counts.size() == 6);
    CHECK(sample_uniform(full_space(), 100, 8) != std::vector<SystemConfig>(a.begin(), a.begin() + 100));
}

TEST_CASE("over-constrained space exhausts the rejection budget") {
    auto space = full_space();
    space.blacklist = Blacklist::from_json_text("not json");  // rejects everything
    Rng rng(1);
    std::uint64_t draws = 0;
    CHECK_FALSE(sample_one(space, rng, 1000, draws).has_value());
    CHECK(draws == 1000);
}
