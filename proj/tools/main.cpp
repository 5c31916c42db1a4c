// SPDX-License-Identifier: Apache-2.0
// chipdse: command-line front end for evaluation, annealing, agent runs,
// exhaustive search and result analysis.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chipdse/analysis.hpp"
#include "chipdse/blacklist.hpp"
#include "chipdse/constants.hpp"
#include "chipdse/context_store.hpp"
#include "chipdse/cost.hpp"
#include "chipdse/csv.hpp"
#include "chipdse/errors.hpp"
#include "chipdse/llm_backend.hpp"
#include "chipdse/orchestrator.hpp"
#include "chipdse/ppac.hpp"
#include "chipdse/sa.hpp"
#include "chipdse/shorthand.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chipdse;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kBackend = 3, kCap = 4 };

struct Globals {
    std::string workload = "WL-1";
    std::string profile = "balance";
    std::string constants;
    std::string blacklist;
    std::string space;
    std::string basis;
    std::size_t basis_samples = 10000;
    std::uint64_t basis_seed = 7;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string out_dir = "chipdse-out";
    bool no_timestamps = false;
};

struct Setup {
    ModelConstants constants;
    std::string blacklist_text;
    DesignSpace full;
    DesignSpace space;
    std::string space_desc = "full";
    WorkloadSpec workload;
    Profile profile;
};

Setup load_setup(const Globals& g) {
    Setup s;
    if (!g.constants.empty()) {
        s.constants = ModelConstants::load(g.constants);
    } else if (fs::exists(data_dir() / "constants.json")) {
        s.constants = ModelConstants::load(data_dir() / "constants.json");
    } else {
        s.constants = ModelConstants::defaults();
    }
    const fs::path bl = g.blacklist.empty() ? data_dir() / "BLACKLIST.json" : fs::path(g.blacklist);
    s.blacklist_text = read_text(bl);
    auto rules = Blacklist::from_json_text(s.blacklist_text);
    if (!rules.valid()) throw ParseError(fmt::format("{}: {}", bl.string(), *rules.error()));
    s.full = make_space(s.constants, std::move(rules));
    s.space = s.full;
    if (!g.space.empty()) {
        json j;
        try {
            j = json::parse(read_text(g.space));
        } catch (const json::exception& e) {
            throw ParseError(fmt::format("{}: {}", g.space, e.what()));
        }
        s.space = s.full.restricted(Restriction::from_json(j));
        s.space_desc = Restriction::from_json(j).to_json().dump();
    }
    s.workload = resolve_workload(g.workload);
    s.profile = resolve_profile(g.profile);
    return s;
}

NormalizationBasis load_basis(const Globals& g, const Setup& s) {
    if (!g.basis.empty()) {
        auto b = NormalizationBasis::load(g.basis);
        if (b.workload != s.workload.name)
            throw ParseError(fmt::format("basis '{}' was computed for workload '{}', not '{}'", g.basis, b.workload,
                                         s.workload.name));
        return b;
    }
    return compute_basis(s.workload, s.full, s.constants, g.basis_samples, g.basis_seed);
}

CostModel make_model(const Globals& g, const Setup& s) { return {s.workload, s.profile, load_basis(g, s), s.constants}; }

json report_json(const PpacReport& r) {
    json j;
    j["latency_s"] = r.latency_s;
    j["energy_j"] = r.energy_j;
    j["area_mm2"] = r.area_mm2;
    j["mfg_cost_usd"] = r.mfg_cost_usd;
    j["latency"] = {{"compute_s", r.latency.compute_s},
                    {"d2d_s", r.latency.d2d_s},
                    {"write_s", r.latency.write_s},
                    {"d2d_bandwidth_bps", r.latency.d2d_bandwidth_bps},
                    {"per_chiplet_s", r.latency.per_chiplet_s}};
    j["energy"] = {{"dram_j", r.energy.dram_j},
                   {"mac_j", r.energy.mac_j},
                   {"sram_j", r.energy.sram_j},
                   {"d2d_j", r.energy.d2d_j}};
    j["area"] = {{"width_mm", r.area.width_mm}, {"height_mm", r.area.height_mm}};
    j["cost"] = {{"die_usd", r.cost.die_usd},
                 {"yields", r.cost.yields},
                 {"package_usd", r.cost.package_usd},
                 {"memory_usd", r.cost.memory_usd}};
    j["chiplet_areas_mm2"] = r.chiplet_areas_mm2;
    json chips = json::array();
    for (const auto& c : r.mapping.chiplets) {
        chips.push_back({{"m", c.m},
                         {"k", c.k},
                         {"n", c.n},
                         {"macs", c.macs},
                         {"dram_read_bytes", c.dram_read_bytes},
                         {"dram_write_bytes", c.dram_write_bytes},
                         {"d2d_send_bytes", c.d2d_send_bytes}});
    }
    j["mapping"] = {{"chiplets", chips},
                    {"total_d2d_bytes", r.mapping.total_d2d_bytes},
                    {"shared_dram_savings_bytes", r.mapping.shared_dram_savings_bytes}};
    return j;
}

json run_header(const std::string& method, const std::string& settings, const Globals& g, const Setup& s,
                const CostModel& model) {
    json j;
    j["method"] = method;
    j["settings"] = settings;
    j["workload"] = {{"name", s.workload.name}, {"m", s.workload.m}, {"k", s.workload.k}, {"n", s.workload.n}};
    j["profile"] = {{"name", s.profile.name},
                    {"alpha", s.profile.alpha},
                    {"beta", s.profile.beta},
                    {"gamma", s.profile.gamma},
                    {"theta", s.profile.theta}};
    j["seed"] = g.seed;
    j["space"] = s.space_desc;
    j["basis"] = model.basis.to_json();
    return j;
}

void set_runtime(json& j, const Globals& g, double runtime_s) {
    if (g.no_timestamps)
        j["runtime_s"] = nullptr;
    else
        j["runtime_s"] = runtime_s;
}

fs::path prepare_out(const Globals& g) {
    const fs::path dir(g.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ContextError(fmt::format("cannot create output directory '{}'", dir.string()));
    return dir;
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const Globals& g, const std::vector<std::string>& configs, bool to_file) {
    const auto s = load_setup(g);
    const auto model = make_model(g, s);
    json out = json::array();
    int status = kOk;
    for (const auto& text : configs) {
        const auto cfg = parse_config(text);
        json item;
        item["config"] = format_config(cfg);
        const auto feas = s.space.check(cfg);
        if (!feas.ok()) {
            item["feasible"] = false;
            item["violations"] = feas.violations;
            item["diagnostics"] = feas.diagnostics;
            status = kInvalid;
            for (const auto& d : feas.diagnostics) std::cerr << "infeasible: " << d << "\n";
        } else {
            const auto r = evaluate(s.workload, cfg, s.constants);
            const auto n = normalize(r, model.basis);
            item["feasible"] = true;
            item["report"] = report_json(r);
            item["normalized"] = {{"energy", n.energy}, {"area", n.area}, {"latency", n.latency}, {"cost", n.cost}};
            item["weighted_cost"] = weighted_cost(n, s.profile);
        }
        out.push_back(std::move(item));
    }
    const std::string text = out.dump(2) + "\n";
    if (to_file) write_text_atomic(prepare_out(g) / "evaluate.json", text);
    std::cout << text;
    return status;
}

// --------------------------------------------------------------- normalize

int cmd_normalize(const Globals& g, const std::string& output) {
    const auto s = load_setup(g);
    const auto basis = compute_basis(s.workload, s.full, s.constants, g.basis_samples, g.basis_seed);
    const fs::path path = output.empty() ? prepare_out(g) / fmt::format("basis-{}.json", s.workload.name) : fs::path(output);
    basis.save(path);
    std::cout << basis.to_json().dump(2) << "\n";
    std::cerr << "wrote " << path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------- sa

std::string sa_settings_string(const SaSettings& st) {
    return fmt::format("t0={};rate={};moves={};tfinal={};seed={}", format_number(st.t0), format_number(st.rate),
                       st.moves_per_temp, format_number(st.t_final), st.seed);
}

int cmd_sa(const Globals& g, SaSettings st, bool grid) {
    st.seed = g.seed;
    st.validate();
    const auto s = load_setup(g);
    const auto model = make_model(g, s);
    const auto dir = prepare_out(g);
    const auto start = std::chrono::steady_clock::now();

    if (grid) {
        const auto points = grid_sweep(model, s.space, st, default_t0_range(), default_rate_range());
        std::string csv = "settings,t0,rate,best_cost,runtime_s,evaluations,best_config\n";
        const GridPoint* best = nullptr;
        std::uint64_t evals = 0;
        for (const auto& p : points) {
            csv += csv_line({sa_settings_string(p.settings), format_number(p.settings.t0),
                             format_number(p.settings.rate), format_number(p.best_cost),
                             g.no_timestamps ? std::string() : format_number(p.runtime_s),
                             std::to_string(p.evaluations), format_config(p.best_config)});
            evals += p.evaluations;
            if (!best || better(p.best_cost, format_config(p.best_config), best->best_cost,
                                format_config(best->best_config)))
                best = &p;
        }
        write_text_atomic(dir / "grid.csv", csv);
        auto run = run_header("sa-grid", fmt::format("grid {}x{}", default_t0_range().size(),
                                                     default_rate_range().size()),
                              g, s, model);
        run["best_cost"] = best->best_cost;
        run["best_config"] = format_config(best->best_config);
        run["evaluations"] = evals;
        set_runtime(run, g, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        write_json(dir / "RUN.json", run);
        std::cout << fmt::format("grid points: {}\nbest: {} @ {}\n", points.size(), format_number(best->best_cost),
                                 format_config(best->best_config));
        return kOk;
    }

    const auto trace = anneal(model, s.space, st);
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_text_atomic(dir / "trace.csv", csv.str());
    auto run = run_header("sa", sa_settings_string(st), g, s, model);
    run["best_cost"] = trace.best_cost;
    run["best_config"] = format_config(trace.best_config);
    run["evaluations"] = trace.records.size();
    run["null_moves"] = trace.null_moves;
    set_runtime(run, g, trace.wall_s);
    write_json(dir / "RUN.json", run);
    std::cout << fmt::format("evaluations: {}\nbest: {} @ {}\n", trace.records.size(),
                             format_number(trace.best_cost), format_config(trace.best_config));
    return kOk;
}

// ------------------------------------------------------------------- agent

struct AgentOptions {
    std::string backend = "heuristic";
    std::string effort = "medium";
    bool resume = false;
};

int cmd_agent(const Globals& g, AgentRunSettings st, const AgentOptions& opt) {
    st.seed = g.seed_set ? g.seed : 7;
    st.timestamps = !g.no_timestamps;
    const auto effort = effort_from(opt.effort);
    if (!effort) throw ParseError(fmt::format("unknown effort '{}'", opt.effort));
    st.effort = *effort;
    st.validate();

    std::shared_ptr<ReasoningBackend> backend;
    if (opt.backend == "llm") {
        backend = LlmBackend::from_env();
    } else if (opt.backend != "heuristic") {
        throw ParseError(fmt::format("unknown backend '{}' (heuristic or llm)", opt.backend));
    }

    const auto s = load_setup(g);
    const auto model = make_model(g, s);
    const auto dir = prepare_out(g);
    ContextStore ctx = [&] {
        if (opt.resume && fs::exists(dir / ".merged_iteration")) return ContextStore::open(dir);
        return ContextStore::create(dir, {read_text(data_dir() / "AGENTS.md"), read_text(data_dir() / "MODEL_INFO.md"),
                                          s.blacklist_text});
    }();

    const std::string settings = fmt::format("backend={};agents={};iterations={};plan_size={};effort={};seed={}",
                                             opt.backend, st.n_agents, st.max_iterations, st.plan_size,
                                             to_string(st.effort), st.seed);
    Orchestrator orch(model, s.space, st, backend);
    const auto outcome = orch.run(ctx);

    auto run = run_header("agent", settings, g, s, model);
    run["seed"] = st.seed;
    run["best_cost"] = outcome.best_cost;
    run["best_config"] = format_config(outcome.best_config);
    run["evaluations"] = outcome.evaluations;
    set_runtime(run, g, outcome.runtime_s);
    write_json(dir / "RUN.json", run);
    std::cout << fmt::format("evaluations: {}\nbest: {} @ {}\n", outcome.evaluations, format_number(outcome.best_cost),
                             format_config(outcome.best_config));
    return kOk;
}

// -------------------------------------------------------------- bruteforce

int cmd_bruteforce(const Globals& g, std::uint64_t cap) {
    const auto s = load_setup(g);
    const auto model = make_model(g, s);
    const auto dir = prepare_out(g);
    const auto r = brute_force(model, s.space, cap, s.space_desc);

    json oracle;
    oracle["subspace"] = r.description;
    oracle["candidates"] = r.candidates;
    oracle["enumerated"] = r.enumerated;
    oracle["best_config"] = format_config(r.best_config);
    oracle["best_cost"] = r.best_cost;
    set_runtime(oracle, g, r.runtime_s);
    write_json(dir / "oracle.json", oracle);

    auto run = run_header("bruteforce", fmt::format("cap={}", cap), g, s, model);
    run["best_cost"] = r.best_cost;
    run["best_config"] = format_config(r.best_config);
    run["evaluations"] = r.enumerated;
    set_runtime(run, g, r.runtime_s);
    write_json(dir / "RUN.json", run);
    std::cout << fmt::format("enumerated: {} of {} candidates\nbest: {} @ {}\n", r.enumerated, r.candidates,
                             format_number(r.best_cost), format_config(r.best_config));
    return kOk;
}

// ------------------------------------------------------------------ pareto

int cmd_pareto(const Globals& g, const std::vector<std::string>& inputs, bool svg) {
    std::vector<ParetoPoint> points;
    for (const auto& in : inputs) {
        auto more = read_pareto_csv(in);
        points.insert(points.end(), more.begin(), more.end());
    }
    const auto frontier = pareto_frontier(points);
    const auto dir = prepare_out(g);
    std::ostringstream all, front;
    write_pareto_csv(all, points);
    write_pareto_csv(front, frontier);
    write_text_atomic(dir / "points.csv", all.str());
    write_text_atomic(dir / "frontier.csv", front.str());
    if (svg) write_text_atomic(dir / "pareto.svg", pareto_svg(points, frontier, "cost vs runtime"));
    std::cout << front.str();
    return kOk;
}

// --------------------------------------------------------------- summarize

int cmd_summarize(const std::vector<std::string>& dirs, const std::string& output) {
    std::vector<SummaryRow> rows;
    for (const auto& d : dirs) {
        auto more = summarize_run(d);
        rows.insert(rows.end(), more.begin(), more.end());
    }
    const auto text = summary_csv(rows);
    if (!output.empty()) write_text_atomic(output, text);
    std::cout << text;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chiplet accelerator design-space exploration"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--workload", g.workload, "Workload name (WL-1..WL-6) or m,k,n triple")->capture_default_str();
    app.add_option("--profile", g.profile, "Profile name or explicit alpha,beta,gamma,theta")->capture_default_str();
    app.add_option("--constants", g.constants, "Model constants JSON (default: bundled)");
    app.add_option("--blacklist", g.blacklist, "Blacklist JSON (default: bundled)");
    app.add_option("--space", g.space, "Restriction JSON limiting the design space");
    app.add_option("--basis", g.basis, "Normalization basis JSON (default: computed)");
    app.add_option("--basis-samples", g.basis_samples, "Sample count when computing the basis")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--basis-seed", g.basis_seed, "Seed when computing the basis")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_flag("--no-timestamps", g.no_timestamps, "Omit wall-clock values so outputs are reproducible");

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate configurations given in canonical form");
    std::vector<std::string> eval_configs;
    bool eval_write = false;
    evaluate->add_option("configs", eval_configs, "Canonical configuration strings")->required();
    evaluate->add_flag("--write", eval_write, "Also write evaluate.json into the output directory");

    auto* normalize_cmd = app.add_subcommand("normalize", "Compute and save a normalization basis");
    std::string basis_out;
    normalize_cmd->add_option("-o,--output", basis_out, "Basis file (default: <out-dir>/basis-<workload>.json)");

    auto* sa = app.add_subcommand("sa", "Simulated annealing");
    SaSettings sa_st;
    bool sa_grid = false;
    sa->add_option("--t0", sa_st.t0)->capture_default_str();
    sa->add_option("--rate", sa_st.rate)->capture_default_str();
    sa->add_option("--moves", sa_st.moves_per_temp)->capture_default_str();
    sa->add_option("--tfinal", sa_st.t_final)->capture_default_str();
    sa->add_option("--budget", sa_st.eval_budget)->capture_default_str();
    sa->add_option("--cost-scale", sa_st.cost_scale)->capture_default_str();
    sa->add_flag("--grid", sa_grid, "Sweep the 13 x 30 (t0, rate) grid");

    auto* agent = app.add_subcommand("agent", "Admin/field agent exploration");
    AgentRunSettings ag_st;
    AgentOptions ag_opt;
    agent->add_option("--backend", ag_opt.backend, "heuristic or llm")->capture_default_str();
    agent->add_option("--agents", ag_st.n_agents, "Plans per iteration")->capture_default_str();
    agent->add_option("--iterations", ag_st.max_iterations)->capture_default_str();
    agent->add_option("--plan-size", ag_st.plan_size)->capture_default_str();
    agent->add_option("--effort", ag_opt.effort, "low, medium, high or xhigh")->capture_default_str();
    agent->add_option("--workers", ag_st.workers, "Field-agent threads (0: all cores)");
    agent->add_flag("--resume", ag_opt.resume, "Continue an interrupted run in --out-dir");

    auto* bf = app.add_subcommand("bruteforce", "Exhaustive search of a (restricted) space");
    std::uint64_t cap = kBruteForceCap;
    bf->add_option("--cap", cap, "Largest candidate count to enumerate")->capture_default_str();

    auto* pareto = app.add_subcommand("pareto", "Pareto frontier of (runtime, cost) points");
    std::vector<std::string> pareto_in;
    bool pareto_svg_flag = false;
    pareto->add_option("inputs", pareto_in, "CSV files with runtime_s and cost/best_cost columns")->required();
    pareto->add_flag("--svg", pareto_svg_flag, "Also write pareto.svg");

    auto* summarize = app.add_subcommand("summarize", "One CSV row per run (per setting for SA grids)");
    std::vector<std::string> run_dirs;
    std::string summary_out;
    summarize->add_option("runs", run_dirs, "Run directories")->required();
    summarize->add_option("-o,--output", summary_out, "Write the summary here as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (*evaluate) return cmd_evaluate(g, eval_configs, eval_write);
        if (*normalize_cmd) return cmd_normalize(g, basis_out);
        if (*sa) return cmd_sa(g, sa_st, sa_grid);
        if (*agent) return cmd_agent(g, ag_st, ag_opt);
        if (*bf) return cmd_bruteforce(g, cap);
        if (*pareto) return cmd_pareto(g, pareto_in, pareto_svg_flag);
        if (*summarize) return cmd_summarize(run_dirs, summary_out);
    } catch (const CapExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCap;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kBackend;
    } catch (const ContextError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kFailure;
}
