// SPDX-License-Identifier: Apache-2.0
#include "chipdse/design_space.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chipdse/errors.hpp"

namespace chipdse {
namespace {

using json = nlohmann::json;

template <typename T>
bool has(const std::vector<T>& v, const T& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

template <typename T>
std::vector<T> subset(const std::vector<T>& current, const std::optional<std::vector<T>>& wanted,
                      std::string_view name) {
    if (!wanted) return current;
    std::vector<T> out;
    for (const auto& v : current) {
        if (has(*wanted, v)) out.push_back(v);
    }
    for (const auto& v : *wanted) {
        if (!has(current, v)) throw ParseError(fmt::format("restriction '{}' has a value outside the space", name));
    }
    return out;
}

std::vector<int> int_list(const json& j, std::string_view key) {
    if (!j.is_array()) throw ParseError(fmt::format("restriction '{}' must be an array", key));
    std::vector<int> out;
    for (const auto& v : j) {
        if (v.is_boolean()) {
            out.push_back(v.get<bool>() ? 1 : 0);
        } else if (v.is_number_integer()) {
            out.push_back(v.get<int>());
        } else {
            throw ParseError(fmt::format("restriction '{}' expects integers", key));
        }
    }
    return out;
}

template <typename E, typename Parse>
std::vector<E> enum_list(const json& j, std::string_view key, Parse parse) {
    if (!j.is_array()) throw ParseError(fmt::format("restriction '{}' must be an array", key));
    std::vector<E> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ParseError(fmt::format("restriction '{}' expects strings", key));
        auto e = parse(v.get<std::string>());
        if (!e) throw ParseError(fmt::format("restriction '{}': unknown value '{}'", key, v.get<std::string>()));
        out.push_back(*e);
    }
    return out;
}

template <typename E>
json names(const std::vector<E>& v) {
    json out = json::array();
    for (auto e : v) out.push_back(std::string{to_string(e)});
    return out;
}

void check_flags(const std::vector<int>& v, std::string_view key) {
    for (int x : v) {
        if (x != 0 && x != 1) throw ParseError(fmt::format("restriction '{}' expects 0/1", key));
    }
}

}  // namespace

Restriction Restriction::from_json(const json& j) {
    if (!j.is_object()) throw ParseError("restriction must be a JSON object");
    Restriction r;
    for (const auto& [key, value] : j.items()) {
        if (key == "count") {
            r.counts = int_list(value, key);
        } else if (key == "homogeneous") {
            if (!value.is_boolean()) throw ParseError("restriction 'homogeneous' must be a boolean");
            r.homogeneous = value.get<bool>();
        } else if (key == "array_dim") {
            r.array_dims = int_list(value, key);
        } else if (key == "tech_node") {
            r.tech_nodes = int_list(value, key);
        } else if (key == "sram_kb") {
            r.sram_kbs = int_list(value, key);
        } else if (key == "order") {
            std::vector<AssignOrder> orders;
            for (int v : int_list(value, key)) {
                if (v != 0 && v != 1) throw ParseError("restriction 'order' expects 0/1");
                orders.push_back(static_cast<AssignOrder>(v));
            }
            r.orders = orders;
        } else if (key == "dataflow") {
            r.dataflows = enum_list<Dataflow>(value, key, dataflow_from);
        } else if (key == "split_k") {
            r.split_k = int_list(value, key);
            check_flags(*r.split_k, key);
        } else if (key == "data_sharing") {
            r.data_sharing = int_list(value, key);
            check_flags(*r.data_sharing, key);
        } else if (key == "integration") {
            r.integrations = enum_list<Integration>(value, key, integration_from);
        } else if (key == "interconnect") {
            r.interconnects = enum_list<Interconnect>(value, key, interconnect_from);
        } else if (key == "memory") {
            r.memories = enum_list<Memory>(value, key, memory_from);
        } else if (key == "protocol") {
            r.protocols = enum_list<Protocol>(value, key, protocol_from);
        } else if (key == "topology") {
            r.topologies = enum_list<Topology>(value, key, topology_from);
        } else {
            throw ParseError(fmt::format("unknown restriction key '{}'", key));
        }
    }
    return r;
}

json Restriction::to_json() const {
    json j = json::object();
    if (counts) j["count"] = *counts;
    if (homogeneous) j["homogeneous"] = *homogeneous;
    if (array_dims) j["array_dim"] = *array_dims;
    if (tech_nodes) j["tech_node"] = *tech_nodes;
    if (sram_kbs) j["sram_kb"] = *sram_kbs;
    if (orders) {
        json o = json::array();
        for (auto v : *orders) o.push_back(static_cast<int>(v));
        j["order"] = o;
    }
    if (dataflows) j["dataflow"] = names(*dataflows);
    if (split_k) j["split_k"] = *split_k;
    if (data_sharing) j["data_sharing"] = *data_sharing;
    if (integrations) j["integration"] = names(*integrations);
    if (interconnects) j["interconnect"] = names(*interconnects);
    if (memories) j["memory"] = names(*memories);
    if (protocols) j["protocol"] = names(*protocols);
    if (topologies) j["topology"] = names(*topologies);
    return j;
}

DesignSpace DesignSpace::full(Blacklist blacklist, AreaFn area_of) {
    DesignSpace s;
    s.blacklist = std::move(blacklist);
    s.area_of = std::move(area_of);
    return s;
}

DesignSpace DesignSpace::restricted(const Restriction& r) const {
    DesignSpace s = *this;
    s.counts = subset(counts, r.counts, "count");
    if (r.homogeneous) s.homogeneous = *r.homogeneous || homogeneous;
    s.array_dims = subset(array_dims, r.array_dims, "array_dim");
    s.tech_nodes = subset(tech_nodes, r.tech_nodes, "tech_node");
    s.sram_kbs = subset(sram_kbs, r.sram_kbs, "sram_kb");
    s.orders = subset(orders, r.orders, "order");
    s.dataflows = subset(dataflows, r.dataflows, "dataflow");
    s.split_k = subset(split_k, r.split_k, "split_k");
    s.data_sharing = subset(data_sharing, r.data_sharing, "data_sharing");
    s.integrations = subset(integrations, r.integrations, "integration");
    // NA in a link restriction is accepted and ignored; it is implied by 2D.
    auto ics = r.interconnects;
    if (ics) std::erase(*ics, Interconnect::NA);
    s.interconnects = subset(interconnects, ics, "interconnect");
    auto protos = r.protocols;
    if (protos) std::erase(*protos, Protocol::NA);
    s.protocols = subset(protocols, protos, "protocol");
    s.memories = subset(memories, r.memories, "memory");
    s.topologies = subset(topologies, r.topologies, "topology");
    return s;
}

std::vector<double> DesignSpace::areas(const SystemConfig& cfg) const {
    std::vector<double> out;
    out.reserve(cfg.chiplets.size());
    for (const auto& c : cfg.chiplets) out.push_back(area_of ? area_of(c) : 0.0);
    return out;
}

bool DesignSpace::contains(const SystemConfig& cfg) const {
    if (!has(counts, cfg.count())) return false;
    for (const auto& c : cfg.chiplets) {
        if (!has(array_dims, c.array_dim) || !has(tech_nodes, c.tech_node) || !has(sram_kbs, c.sram_kb))
            return false;
        if (homogeneous && !(c == cfg.chiplets.front())) return false;
    }
    const auto& m = cfg.mapping;
    if (!has(orders, m.order) || !has(dataflows, m.dataflow) || !has(split_k, m.split_k ? 1 : 0) ||
        !has(data_sharing, m.data_sharing ? 1 : 0))
        return false;
    const auto& p = cfg.package;
    if (!has(integrations, p.integration) || !has(memories, p.memory) || !has(topologies, p.topology)) return false;
    if (p.integration != Integration::TwoD) {
        if (!has(interconnects, p.interconnect) || !has(protocols, p.protocol)) return false;
    }
    if (p.integration == Integration::Hybrid) {
        if (!has(interconnects, p.lateral_interconnect) || !has(protocols, p.lateral_protocol)) return false;
    }
    return true;
}

Feasibility DesignSpace::check(const SystemConfig& cfg) const {
    const auto a = areas(cfg);
    auto f = check_feasible(cfg, blacklist, a);
    if (!contains(cfg)) {
        f.violations.emplace_back("space.outside_restriction");
        f.diagnostics.emplace_back("configuration uses a value outside the restricted space");
    }
    return f;
}

std::vector<ChipletSpec> DesignSpace::chiplet_types() const {
    auto arrays = array_dims;
    auto nodes = tech_nodes;
    auto srams = sram_kbs;
    std::ranges::sort(arrays);
    std::ranges::sort(nodes);
    std::ranges::sort(srams);
    std::vector<ChipletSpec> out;
    for (int a : arrays)
        for (int t : nodes)
            for (int s : srams) out.push_back({a, t, s});
    return out;
}

std::vector<PackageSpec> DesignSpace::package_links(int count) const {
    std::vector<PackageSpec> out;
    for (auto integ : kIntegrations) {
        if (!has(integrations, integ)) continue;
        PackageSpec p;
        p.integration = integ;
        switch (integ) {
            case Integration::TwoD:
                if (count == 1) out.push_back(p);
                break;
            case Integration::TwoPointFiveD:
                if (count < 2) break;
                for (auto ic : kLinkInterconnects) {
                    for (auto pr : kLinkProtocols) {
                        if (has(interconnects, ic) && has(protocols, pr) && lateral_link_ok(ic, pr)) {
                            p.interconnect = ic;
                            p.protocol = pr;
                            out.push_back(p);
                        }
                    }
                }
                break;
            case Integration::ThreeD:
                if (count < 2) break;
                for (auto ic : kLinkInterconnects) {
                    for (auto pr : kLinkProtocols) {
                        if (has(interconnects, ic) && has(protocols, pr) && vertical_link_ok(ic, pr)) {
                            p.interconnect = ic;
                            p.protocol = pr;
                            out.push_back(p);
                        }
                    }
                }
                break;
            case Integration::Hybrid:
                if (count < 3) break;
                for (auto vic : kLinkInterconnects) {
                    for (auto vpr : kLinkProtocols) {
                        if (!has(interconnects, vic) || !has(protocols, vpr) || !vertical_link_ok(vic, vpr)) continue;
                        for (auto lic : kLinkInterconnects) {
                            for (auto lpr : kLinkProtocols) {
                                if (has(interconnects, lic) && has(protocols, lpr) && lateral_link_ok(lic, lpr)) {
                                    p.interconnect = vic;
                                    p.protocol = vpr;
                                    p.lateral_interconnect = lic;
                                    p.lateral_protocol = lpr;
                                    out.push_back(p);
                                }
                            }
                        }
                    }
                }
                break;
        }
    }
    return out;
}

// --- Enumerator -------------------------------------------------------------

Enumerator::Enumerator(const DesignSpace& space) : space_(space), types_(space.chiplet_types()) {
    for (const auto& t : types_) type_areas_.push_back(space_.area_of ? space_.area_of(t) : 0.0);
    auto counts = space_.counts;
    std::ranges::sort(counts);
    const std::uint64_t mapping_size = space_.orders.size() * space_.dataflows.size() * space_.split_k.size() *
                                       space_.data_sharing.size() * space_.memories.size() *
                                       space_.topologies.size();
    for (int c : counts) {
        std::uint64_t tuples = 1;
        if (space_.homogeneous) {
            tuples = types_.size();
        } else {
            for (int i = 0; i < c; ++i) tuples *= types_.size();
        }
        candidates_ += tuples * space_.package_links(c).size() * mapping_size;
    }
    done_ = !load_count();
}

bool Enumerator::load_count() {
    auto counts = space_.counts;
    std::ranges::sort(counts);
    while (count_idx_ < counts.size()) {
        const int c = counts[count_idx_];
        packages_ = space_.package_links(c);
        tail_size_ = packages_.size() * space_.memories.size() * space_.topologies.size() * space_.orders.size() *
                     space_.dataflows.size() * space_.split_k.size() * space_.data_sharing.size();
        digits_.assign(space_.homogeneous ? 1 : static_cast<std::size_t>(c), 0);
        tail_ = 0;
        if (tail_size_ > 0 && !types_.empty()) return true;
        ++count_idx_;
    }
    return false;
}

void Enumerator::build_current(SystemConfig& cfg) const {
    auto counts = space_.counts;
    std::ranges::sort(counts);
    const int c = counts[count_idx_];
    cfg.chiplets.clear();
    if (space_.homogeneous) {
        cfg.chiplets.assign(c, types_[digits_[0]]);
    } else {
        for (auto d : digits_) cfg.chiplets.push_back(types_[d]);
    }
    std::size_t t = tail_;
    auto take = [&t](std::size_t n) {
        const auto v = t % n;
        t /= n;
        return v;
    };
    // Innermost dimension first.
    cfg.mapping.data_sharing = space_.data_sharing[take(space_.data_sharing.size())] != 0;
    cfg.mapping.split_k = space_.split_k[take(space_.split_k.size())] != 0;
    cfg.mapping.dataflow = space_.dataflows[take(space_.dataflows.size())];
    cfg.mapping.order = space_.orders[take(space_.orders.size())];
    const auto topo = space_.topologies[take(space_.topologies.size())];
    const auto mem = space_.memories[take(space_.memories.size())];
    cfg.package = packages_[take(packages_.size())];
    cfg.package.memory = mem;
    cfg.package.topology = topo;
}

void Enumerator::advance() {
    if (++tail_ < tail_size_) return;
    tail_ = 0;
    for (std::size_t i = digits_.size(); i-- > 0;) {
        if (++digits_[i] < types_.size()) return;
        digits_[i] = 0;
    }
    ++count_idx_;
    done_ = !load_count();
}

std::optional<SystemConfig> Enumerator::next() {
    SystemConfig cfg;
    std::vector<double> areas;
    while (!done_) {
        build_current(cfg);
        areas.clear();
        if (space_.homogeneous) {
            areas.assign(cfg.chiplets.size(), type_areas_[digits_[0]]);
        } else {
            for (auto d : digits_) areas.push_back(type_areas_[d]);
        }
        advance();
        if (check_feasible(cfg, space_.blacklist, areas).ok()) return cfg;
    }
    return std::nullopt;
}

std::uint64_t candidate_count(const DesignSpace& space) { return Enumerator(space).candidate_count(); }

// --- Sampling ---------------------------------------------------------------

std::optional<SystemConfig> sample_one(const DesignSpace& space, Rng& rng, std::uint64_t max_draws,
                                       std::uint64_t& draws) {
    auto pick = [&rng](const auto& v) { return v[rng.index(v.size())]; };
    auto pick_chip = [&]() {
        ChipletSpec c;
        c.array_dim = pick(space.array_dims);
        c.tech_node = pick(space.tech_nodes);
        c.sram_kb = pick(space.sram_kbs);
        return c;
    };
    if (space.counts.empty() || space.array_dims.empty() || space.tech_nodes.empty() || space.sram_kbs.empty() ||
        space.orders.empty() || space.dataflows.empty() || space.split_k.empty() || space.data_sharing.empty() ||
        space.integrations.empty() || space.memories.empty() || space.topologies.empty()) {
        return std::nullopt;
    }
    while (draws < max_draws) {
        ++draws;
        SystemConfig cfg;
        const int count = pick(space.counts);
        if (space.homogeneous) {
            cfg.chiplets.assign(count, pick_chip());
        } else {
            for (int i = 0; i < count; ++i) cfg.chiplets.push_back(pick_chip());
        }
        cfg.mapping.order = pick(space.orders);
        cfg.mapping.dataflow = pick(space.dataflows);
        cfg.mapping.split_k = pick(space.split_k) != 0;
        cfg.mapping.data_sharing = pick(space.data_sharing) != 0;
        auto& p = cfg.package;
        p.integration = pick(space.integrations);
        if (p.integration != Integration::TwoD) {
            if (space.interconnects.empty() || space.protocols.empty()) continue;
            p.interconnect = pick(space.interconnects);
            p.protocol = pick(space.protocols);
            if (p.integration == Integration::Hybrid) {
                p.lateral_interconnect = pick(space.interconnects);
                p.lateral_protocol = pick(space.protocols);
            }
        }
        p.memory = pick(space.memories);
        p.topology = pick(space.topologies);
        if (space.check(cfg).ok()) return cfg;
    }
    return std::nullopt;
}

std::vector<SystemConfig> sample_uniform(const DesignSpace& space, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw SpaceError("sample size must be >= 1");
    Rng rng(derive_seed(seed, {0x5A4D}));
    std::vector<SystemConfig> out;
    out.reserve(n);
    std::uint64_t draws = 0;
    while (out.size() < n) {
        auto cfg = sample_one(space, rng, kRejectionBudget, draws);
        if (!cfg) {
            throw SpaceError(fmt::format("rejection budget of {} draws exhausted after {} samples; the space is "
                                         "over-constrained",
                                         kRejectionBudget, out.size()));
        }
        out.push_back(std::move(*cfg));
    }
    return out;
}

}  // namespace chipdse
