#include "ragforge/synthesis.hpp"

#include <thread>

#include <json.hpp>

#include "ragforge/text.hpp"

namespace ragforge::synthesis {

using nlohmann::json;

std::string render_document_lines(const std::vector<corpus::Chunk>& docs) {
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out += "[" + std::to_string(i + 1) + "] ";
        if (!docs[i].title.empty()) {
            out += "Title: " + docs[i].title + "\n";
        }
        out += docs[i].text;
        out += '\n';
    }
    return out;
}

std::string render_prompt(const SynthesisTask& task) {
    paradigms::validate_sources(task.paradigm, task.sources);
    std::string prompt;
    prompt += "<Documents>\n";
    prompt += render_document_lines(task.sources);
    prompt += "</Documents>\n\n";
    prompt +=
        "Your task is to generate an English question q* and a corresponding "
        "response a* based on the provided <Documents>. Please note that the "
        "question q* can take various forms, not limited to questions with a "
        "question mark, but also including statements, instructions, and "
        "other formats. You need to follow the requirements below to generate "
        "the q* and a*:\n\n";
    prompt += task.paradigm.rule_text;
    prompt += "\n\n";
    prompt +=
        "Additionally, to ensure diversity, richness, and high quality in the "
        "question q* you generate, we will randomly provide a question for "
        "you to emulate. In other words, while satisfying the requirements "
        "above, make q* similar in task requirement and expression to the "
        "<Simulated Instruction> below:\n\n";
    prompt += "<Simulated Instruction>\n";
    prompt += task.exemplar.text;
    prompt += "\n</Simulated Instruction>\n\n";
    prompt +=
        "Please directly generate the question-answer pair (q*, a*) following "
        "all the rules above in the format of {\"q*\": ..., \"a*\": ...}. "
        "Ensure the quality of the generated (q*, a*).";
    return prompt;
}

namespace {

/// Finds the end of the JSON value starting at `at` (must be '{'),
/// honoring strings and escapes. Returns npos when unbalanced.
std::size_t find_object_end(const std::string& s, std::size_t at) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = at; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
        } else if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) return i;
        }
    }
    return std::string::npos;
}

}  // namespace

std::pair<std::string, std::string> parse_reply(const std::string& raw) {
    for (std::size_t at = raw.find('{'); at != std::string::npos;
         at = raw.find('{', at + 1)) {
        std::size_t end = find_object_end(raw, at);
        if (end == std::string::npos) continue;
        json obj = json::parse(raw.substr(at, end - at + 1), nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) continue;
        if (!obj.contains("q*") || !obj.contains("a*")) continue;
        if (!obj["q*"].is_string() || !obj["a*"].is_string()) continue;
        std::string q = text::strip(obj["q*"].get<std::string>());
        std::string a = text::strip(obj["a*"].get<std::string>());
        if (q.empty() || a.empty()) continue;
        return {std::move(q), std::move(a)};
    }
    throw ParseError("no JSON object with non-empty \"q*\" and \"a*\" fields");
}

namespace {

constexpr const char* kStrictReminder =
    "\n\nReminder: respond with exactly one JSON object of the form "
    "{\"q*\": \"...\", \"a*\": \"...\"} and nothing else.";

std::pair<std::string, std::string> parse_and_check(
    const std::string& raw, const SynthesisOptions& options) {
    auto [q, a] = parse_reply(raw);
    if (text::count_words(q) > options.max_q_words) {
        throw ParseError("q* exceeds " + std::to_string(options.max_q_words) +
                         " words");
    }
    if (text::count_words(a) > options.max_a_words) {
        throw ParseError("a* exceeds " + std::to_string(options.max_a_words) +
                         " words");
    }
    return {std::move(q), std::move(a)};
}

}  // namespace

SynthesisRecord synthesize(const SynthesisTask& task, gateway::ChatGateway& gw,
                           const SynthesisOptions& options) {
    gateway::ChatRequest req;
    req.model = options.model;
    req.temperature = options.temperature;
    req.max_tokens = options.max_tokens;
    std::string prompt = render_prompt(task);
    req.messages = {{gateway::Role::User, prompt}};

    SynthesisRecord record;
    record.record_key = task.record_key;
    record.paradigm = task.paradigm.id;
    for (const auto& c : task.sources) record.source_chunk_ids.push_back(c.chunk_id);
    record.exemplar_id = task.exemplar.exemplar_id;

    auto first = gw.complete(req);
    try {
        auto [q, a] = parse_and_check(first.content, options);
        record.q_star = std::move(q);
        record.a_star = std::move(a);
        record.raw_reply = first.content;
        return record;
    } catch (const ParseError&) {
        // One stricter re-ask, then give up.
    }
    req.messages = {{gateway::Role::User, prompt + kStrictReminder}};
    auto second = gw.complete(req);
    auto [q, a] = parse_and_check(second.content, options);  // may throw
    record.q_star = std::move(q);
    record.a_star = std::move(a);
    record.raw_reply = second.content;
    return record;
}

SynthesisOutcome synthesize_all(const std::vector<SynthesisTask>& tasks,
                                gateway::ChatGateway& gw,
                                const SynthesisOptions& options, int workers) {
    struct Slot {
        std::optional<SynthesisRecord> record;
        std::optional<RejectEntry> reject;
    };
    std::vector<Slot> slots(tasks.size());

    auto run_one = [&](std::size_t i) {
        try {
            slots[i].record = synthesize(tasks[i], gw, options);
        } catch (const ParseError& e) {
            slots[i].reject = RejectEntry{tasks[i].record_key,
                                          std::string("parse: ") + e.what(), ""};
        } catch (const gateway::GatewayError& e) {
            slots[i].reject = RejectEntry{tasks[i].record_key,
                                          std::string("gateway: ") + e.what(), ""};
        }
    };

    if (workers <= 1 || tasks.size() < 2) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        int n = std::min<int>(workers, static_cast<int>(tasks.size()));
        pool.reserve(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size();
                     i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    SynthesisOutcome outcome;
    for (auto& slot : slots) {
        if (slot.record) {
            outcome.records.push_back(std::move(*slot.record));
        } else {
            outcome.rejects.push_back(std::move(*slot.reject));
        }
    }
    return outcome;
}

}  // namespace ragforge::synthesis
