// SPDX-License-Identifier: Apache-2.0
#include "chipdse/mapping.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chipdse/errors.hpp"

namespace chipdse {
namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t throughput_weight(const ChipletSpec& c) {
    return static_cast<std::int64_t>(c.array_dim) * c.array_dim;
}

ChipletWork make_work(std::int64_t m, std::int64_t k, std::int64_t n, const ChipletSpec& chip,
                      const MappingSpec& mapping) {
    ChipletWork w;
    w.m = m;
    w.k = k;
    w.n = n;
    w.macs = m * k * n;
    const auto t = dram_traffic(w, chip, mapping);
    w.input_read_bytes = t.input_read_bytes;
    w.weight_read_bytes = t.weight_read_bytes;
    w.dram_read_bytes = t.read_bytes();
    w.dram_write_bytes = t.write_bytes;
    return w;
}

/// Splits `total` into shares proportional to `weights` (in rank order);
/// the remainder goes one unit each to the earliest ranks.
std::vector<std::int64_t> proportional_split(std::int64_t total, const std::vector<std::int64_t>& weights) {
    const std::int64_t sum = std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
    std::vector<std::int64_t> out(weights.size());
    std::int64_t given = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = total * weights[i] / sum;
        given += out[i];
    }
    for (std::size_t i = 0; given < total; ++i, ++given) out[i % out.size()] += 1;
    return out;
}

std::optional<std::int64_t> parse_i64(std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

const std::vector<WorkloadSpec>& builtin_workloads() {
    static const std::vector<WorkloadSpec> workloads{
        {"WL-1", 512, 768, 3072, "GPT-2 - MLP (feed-forward)"},
        {"WL-2", 6304, 768, 3072, "ViT - MLP (batch=32)"},
        {"WL-3", 197, 768, 3072, "ViT - MLP (batch=1)"},
        {"WL-4", 128, 2048, 1000, "ResNet-50 - FC (classifier)"},
        {"WL-5", 64, 4096, 4096, "VGG-16 - FC (classifier)"},
        {"WL-6", 1316, 24, 144, "MobileNetV2 - Bottleneck"},
    };
    return workloads;
}

std::vector<WorkloadSpec> load_workloads(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot read workload file '{}'", path.string()));
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
    if (!doc.is_array()) throw ParseError(fmt::format("{}: expected an array of workloads", path.string()));
    std::vector<WorkloadSpec> out;
    for (const auto& w : doc) {
        try {
            WorkloadSpec spec;
            spec.name = w.at("name").get<std::string>();
            spec.m = w.at("m").get<std::int64_t>();
            spec.k = w.at("k").get<std::int64_t>();
            spec.n = w.at("n").get<std::int64_t>();
            if (w.contains("label")) spec.label = w["label"].get<std::string>();
            if (spec.m < 1 || spec.k < 1 || spec.n < 1)
                throw ParseError(fmt::format("workload '{}': dimensions must be >= 1", spec.name));
            out.push_back(std::move(spec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(fmt::format("{}: bad workload entry: {}", path.string(), e.what()));
        }
    }
    return out;
}

WorkloadSpec resolve_workload(std::string_view text) {
    if (text.find(',') != std::string_view::npos) {
        std::vector<std::int64_t> dims;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto pos = std::min(text.find(',', start), text.size());
            auto v = parse_i64(text.substr(start, pos - start));
            if (!v || *v < 1) throw ParseError(fmt::format("workload '{}': expected m,k,n >= 1", text));
            dims.push_back(*v);
            start = pos + 1;
        }
        if (dims.size() != 3) throw ParseError(fmt::format("workload '{}': expected m,k,n", text));
        return {fmt::format("gemm-{}x{}x{}", dims[0], dims[1], dims[2]), dims[0], dims[1], dims[2], "custom GEMM"};
    }
    std::string digits;
    for (char c : text) {
        if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    }
    std::string prefix;
    for (char c : text) {
        if (std::isalpha(static_cast<unsigned char>(c))) prefix += static_cast<char>(std::toupper(c));
    }
    if (!digits.empty() && (prefix.empty() || prefix == "WL")) {
        const auto name = "WL-" + digits;
        for (const auto& w : builtin_workloads()) {
            if (w.name == name) return w;
        }
    }
    throw ParseError(fmt::format("unknown workload '{}' (use WL-1..WL-6 or m,k,n)", text));
}

std::vector<int> allocation_rank(const SystemConfig& cfg) {
    std::vector<int> idx(cfg.chiplets.size());
    std::iota(idx.begin(), idx.end(), 0);
    const bool ascending = cfg.mapping.order == AssignOrder::Ascending;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const auto& ca = cfg.chiplets[a];
        const auto& cb = cfg.chiplets[b];
        const auto wa = throughput_weight(ca);
        const auto wb = throughput_weight(cb);
        if (wa != wb) return ascending ? wa < wb : wa > wb;
        if (ca.tech_node != cb.tech_node) return ca.tech_node < cb.tech_node;
        return ca.sram_kb > cb.sram_kb;
    });
    return idx;
}

DramTraffic dram_traffic(const ChipletWork& work, const ChipletSpec& chip, const MappingSpec& mapping) {
    DramTraffic t;
    const std::int64_t m = work.m, k = work.k, n = work.n;
    if (m <= 0 || k <= 0 || n <= 0) return t;
    const std::int64_t a = chip.array_dim;
    const std::int64_t sram = static_cast<std::int64_t>(chip.sram_kb) * 1024;
    const std::int64_t bm_cap = ceil_div(m, a) * a;
    const std::int64_t bn_cap = ceil_div(n, a) * a;

    auto reads = [&](std::int64_t bm, std::int64_t bn) {
        return std::pair{m * k * kInputBytes * ceil_div(n, bn), k * n * kInputBytes * ceil_div(m, bm)};
    };
    // Lower key wins.
    auto key = [&](std::int64_t bm, std::int64_t bn) {
        const auto [in, wt] = reads(bm, bn);
        switch (mapping.dataflow) {
            case Dataflow::OS: return std::tuple{in + wt, -(bm * bn), -bm};
            case Dataflow::WS: return std::tuple{in + wt, -bn, -bm};
            case Dataflow::IS: return std::tuple{in + wt, -bm, -bn};
        }
        return std::tuple{in + wt, std::int64_t{0}, std::int64_t{0}};
    };

    std::int64_t best_m = 0, best_n = 0;
    for (std::int64_t bm = a; bm <= bm_cap; bm += a) {
        const std::int64_t room = sram - bm * k * kInputBytes;
        if (room <= 0) break;
        std::int64_t bn = room / (k * kInputBytes + kAccBytes * bm);
        bn = std::min(bn / a * a, bn_cap);
        if (bn < a) break;  // larger bm only shrinks bn further
        if (best_m == 0 || key(bm, bn) < key(best_m, best_n)) {
            best_m = bm;
            best_n = bn;
        }
    }
    if (best_m == 0) {
        best_m = a;
        best_n = a;
    }
    const auto [in, wt] = reads(best_m, best_n);
    t.input_read_bytes = in;
    t.weight_read_bytes = wt;
    t.write_bytes = m * n * kOutputBytes;
    t.block_m = best_m;
    t.block_n = best_n;
    return t;
}

MappingResult partition(const WorkloadSpec& wl, const SystemConfig& cfg) {
    MappingResult r;
    const auto n_chips = cfg.chiplets.size();
    r.chiplets.resize(n_chips);
    const auto rank = allocation_rank(cfg);

    if (!cfg.mapping.split_k || n_chips == 1) {
        std::vector<std::int64_t> weights;
        for (int i : rank) weights.push_back(throughput_weight(cfg.chiplets[i]));
        const auto shares = proportional_split(wl.n, weights);
        for (std::size_t pos = 0; pos < rank.size(); ++pos) {
            const int i = rank[pos];
            r.chiplets[i] = make_work(wl.m, wl.k, shares[pos], cfg.chiplets[i], cfg.mapping);
        }
    } else {
        const std::vector<std::int64_t> even(n_chips, 1);
        const auto shares = proportional_split(wl.k, even);
        for (std::size_t pos = 0; pos < rank.size(); ++pos) {
            const int i = rank[pos];
            auto& w = r.chiplets[i];
            w = make_work(wl.m, shares[pos], wl.n, cfg.chiplets[i], cfg.mapping);
            // Partial sums reduce onto chiplet 0, which alone writes the output.
            if (i != 0) {
                w.dram_write_bytes = 0;
                w.d2d_send_bytes = w.k > 0 ? wl.m * wl.n * kAccBytes : 0;
            } else {
                w.dram_write_bytes = wl.m * wl.n * kOutputBytes;
            }
        }
    }
    for (const auto& w : r.chiplets) r.total_d2d_bytes += w.d2d_send_bytes;
    return r;
}

namespace {

// `before(i, j)` settles equal volumes; true when chiplet i should own.
template <typename TieBreak>
MappingResult share_operands(const MappingResult& result, const MappingSpec& mapping, TieBreak before) {
    if (!mapping.data_sharing || result.chiplets.size() < 2) return result;
    MappingResult r = result;

    auto share = [&](std::int64_t ChipletWork::*operand) {
        std::size_t owner = 0;
        for (std::size_t i = 1; i < r.chiplets.size(); ++i) {
            const auto vi = r.chiplets[i].*operand, vo = r.chiplets[owner].*operand;
            if (vi > vo || (vi == vo && before(i, owner))) owner = i;
        }
        for (std::size_t i = 0; i < r.chiplets.size(); ++i) {
            if (i == owner) continue;
            auto& w = r.chiplets[i];
            const std::int64_t volume = w.*operand;
            if (volume <= 0) continue;
            w.*operand = 0;
            w.dram_read_bytes -= volume;
            r.chiplets[owner].d2d_send_bytes += volume;
            r.shared_dram_savings_bytes += volume;
        }
    };
    share(&ChipletWork::input_read_bytes);
    if (mapping.split_k) share(&ChipletWork::weight_read_bytes);

    r.total_d2d_bytes = 0;
    for (const auto& w : r.chiplets) r.total_d2d_bytes += w.d2d_send_bytes;
    return r;
}

}  // namespace

MappingResult apply_data_sharing(const MappingResult& result, const MappingSpec& mapping) {
    return share_operands(result, mapping, [](std::size_t, std::size_t) { return false; });
}

MappingResult apply_data_sharing(const MappingResult& result, const MappingSpec& mapping,
                                 const std::vector<ChipletSpec>& chiplets) {
    const auto& work = result.chiplets;
    return share_operands(result, mapping, [&](std::size_t i, std::size_t j) {
        const auto ki = std::tuple{chiplets[i], work[i].m, work[i].k, work[i].n};
        const auto kj = std::tuple{chiplets[j], work[j].m, work[j].k, work[j].n};
        return ki > kj;
    });
}

MappingResult map_workload(const WorkloadSpec& wl, const SystemConfig& cfg) {
    return apply_data_sharing(partition(wl, cfg), cfg.mapping, cfg.chiplets);
}

}  // namespace chipdse
