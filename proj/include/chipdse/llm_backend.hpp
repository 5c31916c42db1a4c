// SPDX-License-Identifier: Apache-2.0
#pragma once

// Chat-completions backend. Wire format and message template: docs/llm_protocol.md.

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "chipdse/backend.hpp"

namespace chipdse {

/// Sends one JSON request body and returns the response body. Throws BackendError.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual std::string post(const std::string& body) = 0;
};

/// POST <base>/chat/completions with a bearer token, via cpp-httplib.
class HttpTransport final : public ChatTransport {
public:
    HttpTransport(std::string base_url, std::string api_key, int timeout_s = 600);
    std::string post(const std::string& body) override;

private:
    std::string origin_;  // scheme://host[:port]
    std::string path_;    // path prefix + /chat/completions
    std::string api_key_;
    int timeout_s_;
};

struct LlmSettings {
    std::string model;
    bool send_effort = true;  // include "reasoning_effort"; dropped automatically if the endpoint rejects it
    int max_retries = 3;      // corrective follow-ups after an unusable reply
    std::size_t digest_limit = kDigestLimit;
};

class LlmBackend final : public ReasoningBackend {
public:
    LlmBackend(std::shared_ptr<ChatTransport> transport, LlmSettings settings);

    [[nodiscard]] std::string name() const override { return "llm"; }
    PlanResponse generate(const PlanRequest& req) override;

    /// Reads CHICO_API_KEY, CHICO_API_BASE (default https://api.openai.com/v1) and CHICO_MODEL.
    static std::unique_ptr<LlmBackend> from_env();

private:
    std::shared_ptr<ChatTransport> transport_;
    LlmSettings settings_;
    std::atomic<bool> effort_supported_{true};
};

std::string render_user_message(const PlanRequest& req, std::size_t digest_limit);

/// Contents of the first ```json fenced block (or the first unlabeled fence).
std::optional<std::string> extract_fenced_block(const std::string& text);

/// Decodes a plan block: an array of {configs, rationale, target_region} or an
/// object {"plans": [...], "insights": "..."}. Throws ParseError with a reason.
PlanResponse parse_plan_block(const std::string& block);

}  // namespace chipdse
