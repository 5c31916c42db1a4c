// SPDX-License-Identifier: Apache-2.0
#include "chipdse/shorthand.hpp"

#include <charconv>

#include <fmt/format.h>

#include "chipdse/errors.hpp"

namespace chipdse {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

int parse_int(std::string_view token, std::string_view what, std::string_view context) {
    int value = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (token.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(fmt::format("{}: '{}' is not an integer {}", context, token, what));
    }
    return value;
}

bool parse_flag(std::string_view token, std::string_view what, std::string_view context) {
    if (token == "0") return false;
    if (token == "1") return true;
    throw ParseError(fmt::format("{}: {} '{}' not in {{0,1}}", context, what, token));
}

Protocol protocol_token(std::string_view token, std::string_view context) {
    // "S"/"A" abbreviate the UCIe variants after a slash ("UC3/S").
    if (token == "S") return Protocol::UCS;
    if (token == "A") return Protocol::UCA;
    if (auto p = protocol_from(token)) return *p;
    throw ParseError(fmt::format("{}: unknown protocol '{}'", context, token));
}

}  // namespace

ChipletSpec parse_chiplet(std::string_view text) {
    const auto ctx = fmt::format("chiplet '{}'", text);
    const auto parts = split(trim(text), '-');
    if (parts.size() != 3) throw ParseError(ctx + ": expected A-T-S");
    ChipletSpec c;
    c.array_dim = parse_int(parts[0], "array size", ctx);
    c.tech_node = parse_int(parts[1], "tech node", ctx);
    c.sram_kb = parse_int(parts[2], "SRAM size", ctx);
    if (!is_array_dim(c.array_dim))
        throw ParseError(fmt::format("{}: array {} not in {{64,96,128,160,192}}", ctx, parts[0]));
    if (!is_tech_node(c.tech_node))
        throw ParseError(fmt::format("{}: node {} not in {{7,10,14}}", ctx, parts[1]));
    if (!is_sram_kb(c.sram_kb))
        throw ParseError(
            fmt::format("{}: sram {} not in {{256,512,768,1024,1536,2048}}", ctx, parts[2]));
    return c;
}

std::string format_chiplet(const ChipletSpec& c) {
    return fmt::format("{}-{}-{}", c.array_dim, c.tech_node, c.sram_kb);
}

std::vector<ChipletSpec> parse_chiplet_list(std::string_view text) {
    std::vector<ChipletSpec> out;
    for (auto item : split(text, ',')) {
        item = trim(item);
        int replicas = 1;
        if (const auto x = item.find(" x"); x != std::string_view::npos) {
            replicas = parse_int(trim(item.substr(x + 2)), "replica count", fmt::format("chiplet list '{}'", text));
            item = trim(item.substr(0, x));
            if (replicas < 1) throw ParseError(fmt::format("chiplet list '{}': replica count < 1", text));
        }
        const auto chip = parse_chiplet(item);
        out.insert(out.end(), replicas, chip);
    }
    if (out.empty() || static_cast<int>(out.size()) > kMaxChiplets) {
        throw ParseError(fmt::format("chiplet list '{}': expected 1..{} chiplets", text, kMaxChiplets));
    }
    return out;
}

std::string format_chiplet_list(const std::vector<ChipletSpec>& chips) {
    std::string out;
    for (std::size_t i = 0; i < chips.size();) {
        std::size_t j = i + 1;
        while (j < chips.size() && chips[j] == chips[i]) ++j;
        if (!out.empty()) out += ", ";
        out += format_chiplet(chips[i]);
        if (j - i > 1) out += fmt::format(" x{}", j - i);
        i = j;
    }
    return out;
}

MappingSpec parse_mapping(std::string_view text) {
    const auto ctx = fmt::format("mapping '{}'", text);
    const auto parts = split(trim(text), '-');
    if (parts.size() != 3) throw ParseError(ctx + ": expected O-D-K");
    MappingSpec m;
    m.order = parse_flag(parts[0], "order", ctx) ? AssignOrder::Ascending : AssignOrder::Descending;
    const auto df = dataflow_from(parts[1]);
    if (!df || parts[1] != to_string(*df))
        throw ParseError(fmt::format("{}: unknown dataflow '{}'", ctx, parts[1]));
    m.dataflow = *df;
    m.split_k = parse_flag(parts[2], "split-K", ctx);
    return m;
}

std::string format_mapping(const MappingSpec& m) {
    return fmt::format("{}-{}-{}", static_cast<int>(m.order), to_string(m.dataflow), m.split_k ? 1 : 0);
}

PackageSpec parse_package(std::string_view ipm, std::string_view protocol) {
    const auto ctx = fmt::format("package '{}'", ipm);
    const auto parts = split(trim(ipm), '-');
    if (parts.size() != 3) throw ParseError(ctx + ": expected I-P-M");
    PackageSpec p;
    const auto integ = integration_from(parts[0]);
    if (!integ) throw ParseError(fmt::format("{}: unknown integration '{}'", ctx, parts[0]));
    p.integration = *integ;
    const auto mem = memory_from(parts[2]);
    if (!mem) throw ParseError(fmt::format("{}: unknown memory '{}'", ctx, parts[2]));
    p.memory = *mem;

    const auto links = split(parts[1], '/');
    std::vector<Interconnect> ics;
    for (auto tok : links) {
        const auto ic = interconnect_from(tok);
        if (!ic) throw ParseError(fmt::format("{}: unknown interconnect '{}'", ctx, tok));
        ics.push_back(*ic);
    }

    protocol = trim(protocol);
    std::vector<Protocol> protos;
    if (!protocol.empty()) {
        for (auto tok : split(protocol, '/')) protos.push_back(protocol_token(trim(tok), ctx));
    }

    switch (p.integration) {
        case Integration::TwoD:
            if (ics.size() != 1 || ics[0] != Interconnect::NA)
                throw ParseError(fmt::format("{}: 2D integration requires interconnect NA", ctx));
            if (protos.size() > 1 || (protos.size() == 1 && protos[0] != Protocol::NA))
                throw ParseError(fmt::format("{}: 2D integration requires protocol NA", ctx));
            break;
        case Integration::TwoPointFiveD:
        case Integration::ThreeD: {
            const bool three_d = p.integration == Integration::ThreeD;
            if (ics.size() != 1 || (three_d ? !is_3d_interconnect(ics[0]) : !is_2p5d_interconnect(ics[0])))
                throw ParseError(fmt::format("{}: interconnect '{}' does not match integration {}", ctx,
                                             parts[1], parts[0]));
            p.interconnect = ics[0];
            if (protos.size() > 1) throw ParseError(fmt::format("{}: one protocol expected", ctx));
            p.protocol = protos.empty() ? (three_d ? Protocol::UC3 : Protocol::UCS) : protos[0];
            if (p.protocol == Protocol::NA)
                throw ParseError(fmt::format("{}: {} integration requires a protocol", ctx, parts[0]));
            break;
        }
        case Integration::Hybrid:
            if (ics.size() != 2 || !is_3d_interconnect(ics[0]) || !is_2p5d_interconnect(ics[1]))
                throw ParseError(
                    fmt::format("{}: 2.5D+3D expects <3D bond>/<2.5D link>, got '{}'", ctx, parts[1]));
            p.interconnect = ics[0];
            p.lateral_interconnect = ics[1];
            if (protos.empty()) {
                p.protocol = Protocol::UC3;
                p.lateral_protocol = Protocol::UCS;
            } else if (protos.size() == 2 && protos[0] != Protocol::NA && protos[1] != Protocol::NA) {
                p.protocol = protos[0];
                p.lateral_protocol = protos[1];
            } else {
                throw ParseError(fmt::format("{}: 2.5D+3D expects two protocols, got '{}'", ctx, protocol));
            }
            break;
    }
    return p;
}

std::string format_package(const PackageSpec& p) {
    std::string links{to_string(p.interconnect)};
    if (p.integration == Integration::Hybrid) {
        links += "/";
        links += to_string(p.lateral_interconnect);
    }
    return fmt::format("{}-{}-{}", to_string(p.integration), links, to_string(p.memory));
}

std::string format_protocol(const PackageSpec& p) {
    std::string out{to_string(p.protocol)};
    if (p.integration == Integration::Hybrid) {
        out += "/";
        out += to_string(p.lateral_protocol);
    }
    return out;
}

std::string format_config(const SystemConfig& cfg) {
    std::string chips;
    for (const auto& c : cfg.chiplets) {
        if (!chips.empty()) chips += ';';
        chips += format_chiplet(c);
    }
    return fmt::format("{}|{}|{}|{}|{}|{}|{}", cfg.count(), chips, format_mapping(cfg.mapping),
                       cfg.mapping.data_sharing ? 1 : 0, format_package(cfg.package),
                       format_protocol(cfg.package), to_string(cfg.package.topology));
}

SystemConfig parse_config(std::string_view text) {
    const auto ctx = fmt::format("config '{}'", text);
    const auto fields = split(trim(text), '|');
    if (fields.size() != 7) throw ParseError(ctx + ": expected 7 '|'-separated fields");
    SystemConfig cfg;
    const int count = parse_int(fields[0], "chiplet count", ctx);
    for (auto tok : split(fields[1], ';')) cfg.chiplets.push_back(parse_chiplet(tok));
    if (count < 1 || count > kMaxChiplets)
        throw ParseError(fmt::format("{}: chiplet count {} not in 1..{}", ctx, count, kMaxChiplets));
    if (count != cfg.count())
        throw ParseError(fmt::format("{}: count {} but {} chiplets listed", ctx, count, cfg.count()));
    cfg.mapping = parse_mapping(fields[2]);
    cfg.mapping.data_sharing = parse_flag(fields[3], "data sharing", ctx);
    cfg.package = parse_package(fields[4], fields[5]);
    const auto topo = topology_from(fields[6]);
    if (!topo) throw ParseError(fmt::format("{}: unknown topology '{}'", ctx, fields[6]));
    cfg.package.topology = *topo;
    return cfg;
}

}  // namespace chipdse
