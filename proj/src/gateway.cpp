#include "ragforge/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ragforge/jsonl.hpp"

namespace ragforge::gateway {

using nlohmann::json;

void GatewayPolicy::validate() const {
    if (max_in_flight < 1 || max_retries < 0 || backoff_base_ms < 1 ||
        timeout_ms < 1) {
        throw GatewayError("invalid gateway policy");
    }
}

ChatGateway::ChatGateway(std::unique_ptr<ChatTransport> transport,
                         GatewayPolicy policy, SleepFn sleep_fn)
    : transport_(std::move(transport)),
      policy_(policy),
      sleep_fn_(std::move(sleep_fn)),
      slots_(policy.max_in_flight) {
    policy_.validate();
    if (!sleep_fn_) {
        sleep_fn_ = [](int ms) {
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        };
    }
}

ChatReply ChatGateway::complete(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw GatewayError("request has no messages");
    }
    for (const auto& m : request.messages) {
        if (m.content.empty()) throw GatewayError("empty message content");
    }

    slots_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{slots_};

    std::string last_error;
    for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
        if (attempt > 0) {
            sleep_fn_(policy_.backoff_base_ms * (1 << (attempt - 1)));
            std::lock_guard lock(usage_mutex_);
            ++usage_.retries;
        }
        auto started = std::chrono::steady_clock::now();
        TransportResult result = transport_->send(request);
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
        {
            std::lock_guard lock(usage_mutex_);
            ++usage_.calls;
            if (result.ok) {
                usage_.prompt_tokens += result.reply.prompt_tokens;
                usage_.completion_tokens += result.reply.completion_tokens;
            }
        }
        if (result.ok) {
            result.reply.latency_ms = elapsed;
            return result.reply;
        }
        last_error = result.error;
        if (!result.retryable) {
            throw GatewayError("non-retryable gateway failure: " + last_error);
        }
    }
    throw GatewayError("gateway failed after " +
                       std::to_string(policy_.max_retries + 1) +
                       " attempts; last error: " + last_error);
}

UsageTotals ChatGateway::usage() const {
    std::lock_guard lock(usage_mutex_);
    return usage_;
}

// ---------------------------------------------------------------------------
// Scripted mock
// ---------------------------------------------------------------------------

ScriptedTransport::ScriptedTransport(std::vector<ScriptRule> script) {
    if (script.empty()) {
        throw GatewayError("mock script must not be empty");
    }
    script_.reserve(script.size());
    for (auto& rule : script) {
        script_.push_back({rule, rule.fail_times});
    }
}

TransportResult ScriptedTransport::send(const ChatRequest& request) {
    int now = in_flight_.fetch_add(1) + 1;
    int seen = max_in_flight_seen_.load();
    while (now > seen && !max_in_flight_seen_.compare_exchange_weak(seen, now)) {
    }
    struct Depart {
        std::atomic<int>& c;
        ~Depart() { c.fetch_sub(1); }
    } depart{in_flight_};

    std::string prompt;
    for (const auto& m : request.messages) {
        if (!prompt.empty()) prompt += '\n';
        prompt += m.content;
    }

    std::lock_guard lock(mutex_);
    log_.push_back(prompt);
    for (auto& state : script_) {
        if (prompt.find(state.rule.match) == std::string::npos) continue;
        if (state.rule.fail_times < 0) {
            return {false, true, {}, "scripted permanent failure"};
        }
        if (state.failures_left > 0) {
            --state.failures_left;
            return {false, true, {}, "scripted transient failure"};
        }
        TransportResult result;
        result.ok = true;
        result.reply.content = state.rule.reply;
        return result;
    }
    std::string prefix = prompt.substr(0, 80);
    return {false, false, {},
            "no script rule matches request starting with: \"" + prefix + "\""};
}

std::vector<std::string> ScriptedTransport::call_log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::size_t ScriptedTransport::calls() const {
    std::lock_guard lock(mutex_);
    return log_.size();
}

std::unique_ptr<ChatGateway> mock_from_script(std::vector<ScriptRule> script,
                                              GatewayPolicy policy,
                                              ScriptedTransport** observer,
                                              ChatGateway::SleepFn sleep_fn) {
    auto transport = std::make_unique<ScriptedTransport>(std::move(script));
    if (observer) *observer = transport.get();
    return std::make_unique<ChatGateway>(std::move(transport), policy,
                                         std::move(sleep_fn));
}

std::vector<ScriptRule> load_script(const std::string& path) {
    std::vector<ScriptRule> rules;
    jsonl::for_each_record(path, [&](std::size_t, const json& rec) {
        ScriptRule rule;
        rule.match = rec.at("match").get<std::string>();
        rule.reply = rec.at("reply").get<std::string>();
        rule.fail_times = rec.value("fail_times", 0);
        rules.push_back(std::move(rule));
    });
    if (rules.empty()) {
        throw GatewayError("mock script " + path + " has no rules");
    }
    return rules;
}

// ---------------------------------------------------------------------------
// HTTP transport
// ---------------------------------------------------------------------------

HttpTransport::HttpTransport(HttpEndpointConfig config)
    : config_(std::move(config)) {}

TransportResult HttpTransport::send(const ChatRequest& request) {
    auto slash = config_.endpoint.find('/', config_.endpoint.find("//") + 2);
    std::string host = slash == std::string::npos
                           ? config_.endpoint
                           : config_.endpoint.substr(0, slash);
    std::string route =
        slash == std::string::npos ? "/" : config_.endpoint.substr(slash);

    httplib::Client client(host);
    client.set_connection_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000,
                            (config_.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }

    json body;
    body["model"] = request.model;
    body["messages"] = json::array();
    for (const auto& m : request.messages) {
        body["messages"].push_back(
            {{"role", m.role == Role::System ? "system" : "user"},
             {"content", m.content}});
    }
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;

    auto res = client.Post(route, headers, body.dump(), "application/json");
    if (!res) {
        return {false, true, {}, "connection failed (" + host + ")"};
    }
    if (res->status != 200) {
        bool retryable = res->status == 408 || res->status == 429 ||
                         res->status >= 500;
        return {false, retryable,
                {}, "endpoint returned status " + std::to_string(res->status)};
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
        return {false, false, {}, "endpoint reply is not JSON"};
    }
    TransportResult result;
    try {
        result.reply.content =
            reply.at(json::json_pointer(config_.content_pointer))
                .get<std::string>();
    } catch (const json::exception&) {
        return {false, false, {},
                "no text at content pointer " + config_.content_pointer};
    }
    if (reply.contains("usage")) {
        result.reply.prompt_tokens =
            reply["usage"].value("prompt_tokens", std::int64_t{0});
        result.reply.completion_tokens =
            reply["usage"].value("completion_tokens", std::int64_t{0});
    }
    result.ok = true;
    return result;
}

}  // namespace ragforge::gateway
