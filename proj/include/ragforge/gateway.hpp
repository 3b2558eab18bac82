#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

namespace ragforge::gateway {

class GatewayError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Role { System, User };

struct Message {
    Role role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<Message> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct ChatReply {
    std::string content;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t latency_ms = 0;
};

struct GatewayPolicy {
    int max_in_flight = 4;
    int max_retries = 2;
    int backoff_base_ms = 200;
    int timeout_ms = 30000;

    void validate() const;
};

struct TransportResult {
    bool ok = false;
    bool retryable = false;
    ChatReply reply;
    std::string error;
};

/// One attempt against an endpoint; no retries, no concurrency control.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual TransportResult send(const ChatRequest& request) = 0;
};

struct UsageTotals {
    std::int64_t calls = 0;
    std::int64_t retries = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

/// The single boundary to a chat-completion endpoint: bounds concurrent
/// requests, retries transient failures with exponential backoff, and
/// accounts token usage. Safe for concurrent callers.
class ChatGateway {
public:
    using SleepFn = std::function<void(int /*ms*/)>;

    ChatGateway(std::unique_ptr<ChatTransport> transport, GatewayPolicy policy,
                SleepFn sleep_fn = {});

    /// Returns the endpoint's content verbatim, or throws GatewayError after
    /// a non-retryable failure or max_retries+1 failed attempts.
    ChatReply complete(const ChatRequest& request);

    UsageTotals usage() const;

private:
    std::unique_ptr<ChatTransport> transport_;
    GatewayPolicy policy_;
    SleepFn sleep_fn_;
    std::counting_semaphore<> slots_;
    mutable std::mutex usage_mutex_;
    UsageTotals usage_;
};

// ---------------------------------------------------------------------------
// Scripted mock
// ---------------------------------------------------------------------------

/// One mock rule: the first rule whose `match` substring occurs in the
/// request's concatenated message contents answers the request.
/// fail_times > 0 makes the rule fail (retryably) that many times before
/// succeeding; fail_times < 0 fails forever.
struct ScriptRule {
    std::string match;
    std::string reply;
    int fail_times = 0;
};

class ScriptedTransport : public ChatTransport {
public:
    explicit ScriptedTransport(std::vector<ScriptRule> script);

    TransportResult send(const ChatRequest& request) override;

    /// Prompts in the order they were answered (single-threaded callers see
    /// exact request order).
    std::vector<std::string> call_log() const;
    int max_in_flight_seen() const { return max_in_flight_seen_.load(); }
    std::size_t calls() const;

private:
    struct RuleState {
        ScriptRule rule;
        int failures_left;
    };
    std::vector<RuleState> script_;
    mutable std::mutex mutex_;
    std::vector<std::string> log_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_seen_{0};
};

/// Builds a gateway over a scripted mock; `observer`, when non-null, receives
/// the transport so tests can read the call log and in-flight highwater mark.
std::unique_ptr<ChatGateway> mock_from_script(std::vector<ScriptRule> script,
                                              GatewayPolicy policy,
                                              ScriptedTransport** observer = nullptr,
                                              ChatGateway::SleepFn sleep_fn = {});

/// Loads mock rules from JSONL: {"match": str, "reply": str, "fail_times"?: int}.
std::vector<ScriptRule> load_script(const std::string& path);

// ---------------------------------------------------------------------------
// HTTP transport
// ---------------------------------------------------------------------------

struct HttpEndpointConfig {
    std::string endpoint;            // e.g. http://host:port/v1/chat/completions
    std::string api_key_env;         // env var holding the bearer token; may be empty
    std::string content_pointer = "/choices/0/message/content";
    int timeout_ms = 30000;
};

/// JSON-over-HTTP chat transport. Request body:
///   {"model", "messages": [{"role","content"}...], "temperature", "max_tokens"}
/// Reply content is read at `content_pointer`; usage at /usage when present.
/// 408/429/5xx and connection failures are retryable, other statuses are not.
class HttpTransport : public ChatTransport {
public:
    explicit HttpTransport(HttpEndpointConfig config);

    TransportResult send(const ChatRequest& request) override;

private:
    HttpEndpointConfig config_;
};

}  // namespace ragforge::gateway
