// SPDX-License-Identifier: Apache-2.0
#include "chipdse/llm_backend.hpp"

#include <cctype>
#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chipdse/errors.hpp"

namespace chipdse {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

std::string system_prompt(const PlanRequest& req) {
    if (!req.agents_doc.empty()) return req.agents_doc;
    return "You are the admin agent of a chiplet design-space exploration loop.";
}

std::string reply_content(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("response body is not JSON: {}", e.what()));
    }
    try {
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ParseError("response has no choices[0].message.content string");
    }
}

}  // namespace

HttpTransport::HttpTransport(std::string base_url, std::string api_key, int timeout_s)
    : api_key_(std::move(api_key)), timeout_s_(timeout_s) {
    while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
    const auto scheme_end = base_url.find("://");
    const auto path_start = base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    path_ = (path_start == std::string::npos ? std::string() : base_url.substr(path_start)) + "/chat/completions";
}

std::string HttpTransport::post(const std::string& body) {
    httplib::Client cli(origin_);
    if (!cli.is_valid()) throw BackendError(fmt::format("cannot open a client for '{}'", origin_));
    cli.set_connection_timeout(30);
    cli.set_read_timeout(timeout_s_);
    cli.set_write_timeout(60);
    const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto res = cli.Post(path_, headers, body, "application/json");
    if (!res) throw BackendError(fmt::format("request to {}{} failed: {}", origin_, path_, httplib::to_string(res.error())));
    if (res->status < 200 || res->status >= 300)
        throw BackendError(fmt::format("HTTP {} from {}{}: {}", res->status, origin_, path_, res->body.substr(0, 2000)));
    return res->body;
}

LlmBackend::LlmBackend(std::shared_ptr<ChatTransport> transport, LlmSettings settings)
    : transport_(std::move(transport)), settings_(std::move(settings)) {
    if (!transport_) throw BackendError("LLM backend needs a transport");
    effort_supported_ = settings_.send_effort;
}

std::unique_ptr<LlmBackend> LlmBackend::from_env() {
    const std::string key = env_or("CHICO_API_KEY", "");
    if (key.empty()) throw BackendError("CHICO_API_KEY is not set");
    const std::string model = env_or("CHICO_MODEL", "");
    if (model.empty()) throw BackendError("CHICO_MODEL is not set");
    const std::string base = env_or("CHICO_API_BASE", "https://api.openai.com/v1");
    LlmSettings s;
    s.model = model;
    return std::make_unique<LlmBackend>(std::make_shared<HttpTransport>(base, key), s);
}

PlanResponse LlmBackend::generate(const PlanRequest& req) {
    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", system_prompt(req)}});
    messages.push_back({{"role", "user"}, {"content", render_user_message(req, settings_.digest_limit)}});

    std::string last_error;
    for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
        json body{{"model", settings_.model}, {"messages", messages}};
        if (effort_supported_) body["reasoning_effort"] = std::string(to_string(req.effort));

        std::string raw;
        try {
            raw = transport_->post(body.dump());
        } catch (const BackendError& e) {
            // Endpoints without the effort parameter reject it; resend once without.
            const std::string what = e.what();
            if (effort_supported_ && what.find("reasoning_effort") != std::string::npos) {
                effort_supported_ = false;
                body.erase("reasoning_effort");
                raw = transport_->post(body.dump());
            } else {
                throw;
            }
        }

        std::string content;
        try {
            content = reply_content(raw);
            const auto block = extract_fenced_block(content);
            if (!block) throw ParseError("no fenced ```json block found in the reply");
            return parse_plan_block(*block);
        } catch (const ParseError& e) {
            last_error = e.what();
        }
        messages.push_back({{"role", "assistant"}, {"content", content}});
        messages.push_back(
            {{"role", "user"},
             {"content", fmt::format("Your previous reply could not be used: {}. Reply again with exactly one fenced "
                                     "```json block that follows the output schema, and nothing else.",
                                     last_error)}});
    }
    throw BackendError(fmt::format("no usable plan block after {} retries: {}", settings_.max_retries, last_error));
}

std::string render_user_message(const PlanRequest& req, std::size_t digest_limit) {
    std::string out;
    out += "# Task\n";
    out += fmt::format("Workload {}: GEMM with M={} K={} N={}.\n", req.workload.name, req.workload.m, req.workload.k,
                       req.workload.n);
    out += fmt::format("Profile {}: alpha={} beta={} gamma={} theta={} (weights on normalized energy, area, "
                       "latency, manufacturing cost; lower total cost is better).\n",
                       req.profile.name, req.profile.alpha, req.profile.beta, req.profile.gamma, req.profile.theta);
    out += fmt::format("Iteration {}. Produce exactly {} exploration plans targeting distinct regions, each with 1 "
                       "to {} configurations ({} preferred).\n",
                       req.iteration, req.n_plans, kMaxPlanSize, req.plan_size);
    if (req.round > 0) {
        out += fmt::format("\n# Replacement round {}\nSome configurations were rejected: {}\nReturn the same number "
                           "of plans with feasible replacements.\n",
                           req.round, req.repair_note);
    }
    if (!req.model_info_doc.empty()) out += "\n# Model information\n" + req.model_info_doc + "\n";
    if (!req.blacklist_doc.empty()) out += "\n# Blacklist (illegal combinations)\n" + req.blacklist_doc + "\n";
    if (!req.digest.empty()) out += "\n# Evolving context\n" + truncate_digest(req.digest, digest_limit) + "\n";
    out += "\n# Output format\n"
           "Reply with one fenced ```json block holding an array of objects\n"
           "{\"configs\": [<canonical config>, ...], \"rationale\": <string>, \"target_region\": <string>}.\n"
           "Canonical config: <count>|<A-T-S>;...|<O-D-K>|<share 0/1>|<I-P-M>|<protocol>|<topology>\n"
           "for example 2|96-7-1024;64-7-256|1-OS-0|1|2.5D-RDL-DDR5|UCS|mesh or "
           "1|64-7-512|0-WS-0|0|2D-NA-DDR5|NA|ring.\n";
    return out;
}

std::optional<std::string> extract_fenced_block(const std::string& text) {
    std::size_t pos = 0;
    std::optional<std::string> unlabeled;
    while ((pos = text.find("```", pos)) != std::string::npos) {
        const auto line_end = text.find('\n', pos);
        if (line_end == std::string::npos) break;
        std::string label = text.substr(pos + 3, line_end - pos - 3);
        while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back()))) label.pop_back();
        const auto close = text.find("```", line_end + 1);
        if (close == std::string::npos) break;
        std::string body = text.substr(line_end + 1, close - line_end - 1);
        if (label == "json" || label == "JSON") return body;
        if (label.empty() && !unlabeled) unlabeled = body;
        pos = close + 3;
    }
    return unlabeled;
}

PlanResponse parse_plan_block(const std::string& block) {
    json doc;
    try {
        doc = json::parse(block);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("plan block is not valid JSON: {}", e.what()));
    }
    PlanResponse out;
    const json* plans = &doc;
    if (doc.is_object()) {
        if (!doc.contains("plans")) throw ParseError("plan object lacks a \"plans\" array");
        plans = &doc["plans"];
        if (doc.contains("insights") && doc["insights"].is_string()) out.insights = doc["insights"].get<std::string>();
    }
    if (!plans->is_array() || plans->empty()) throw ParseError("plans must be a non-empty array");
    for (std::size_t i = 0; i < plans->size(); ++i) {
        const auto& p = (*plans)[i];
        if (!p.is_object()) throw ParseError(fmt::format("plan {} is not an object", i));
        if (!p.contains("configs") || !p["configs"].is_array() || p["configs"].empty())
            throw ParseError(fmt::format("plan {} needs a non-empty \"configs\" array", i));
        RawPlan plan;
        for (const auto& c : p["configs"]) {
            if (!c.is_string()) throw ParseError(fmt::format("plan {}: configs must be strings", i));
            plan.configs.push_back(c.get<std::string>());
        }
        if (p.contains("rationale") && p["rationale"].is_string()) plan.rationale = p["rationale"].get<std::string>();
        if (p.contains("target_region") && p["target_region"].is_string())
            plan.target_region = p["target_region"].get<std::string>();
        out.plans.push_back(std::move(plan));
    }
    return out;
}

}  // namespace chipdse
