#include "ragforge/exemplars.hpp"

#include <json.hpp>

#include "ragforge/jsonl.hpp"
#include "ragforge/text.hpp"

namespace ragforge::exemplars {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Unjudged: return "unjudged";
        case Verdict::Keep: return "keep";
        case Verdict::Drop: return "drop";
    }
    throw ExemplarError("bad verdict");
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "unjudged") return Verdict::Unjudged;
    if (s == "keep") return Verdict::Keep;
    if (s == "drop") return Verdict::Drop;
    throw ExemplarError("unknown verdict \"" + s + "\"");
}

std::vector<ExemplarInstruction> ingest_exemplars(
    const std::filesystem::path& path, const std::string& source_label,
    IngestStats* stats) {
    std::vector<ExemplarInstruction> out;
    IngestStats local;
    jsonl::for_each_record(path, [&](std::size_t lineno, const json& rec) {
        std::string question;
        if (rec.contains("question")) {
            question = rec.at("question").get<std::string>();
        } else if (rec.contains("instruction")) {
            question = rec.at("instruction").get<std::string>();
        } else {
            local.missing_field_lines.push_back(lineno);
            return;
        }
        auto words = text::split_words(question);
        if (words.empty()) {
            ++local.skipped_empty;
            return;
        }
        ExemplarInstruction ex;
        ex.exemplar_id = source_label + "#" + std::to_string(lineno);
        ex.source_dataset = source_label;
        ex.text = text::strip(question);
        ex.word_count = static_cast<std::uint32_t>(words.size());
        out.push_back(std::move(ex));
    });
    if (stats) *stats = local;
    if (!local.missing_field_lines.empty() && !stats) {
        throw ExemplarError(path.string() + ": " +
                            std::to_string(local.missing_field_lines.size()) +
                            " records lack a question/instruction field "
                            "(first at line " +
                            std::to_string(local.missing_field_lines.front()) +
                            ")");
    }
    return out;
}

std::vector<ExemplarInstruction> prefilter(
    const std::vector<ExemplarInstruction>& exemplars, std::uint32_t min_words,
    std::uint32_t max_words) {
    if (min_words > max_words) {
        throw ExemplarError("prefilter: min_words > max_words");
    }
    std::vector<ExemplarInstruction> kept;
    for (const auto& ex : exemplars) {
        if (ex.word_count >= min_words && ex.word_count <= max_words) {
            kept.push_back(ex);
        }
    }
    return kept;
}

std::string render_filter_prompt(const std::string& question) {
    return question +
           "\n\nPlease determine if retrieving external information would "
           "help answer the above question. If it helps, answer \"True\", "
           "otherwise answer \"False\".";
}

namespace {

/// Finds the first standalone "true"/"false" token, ignoring case.
std::optional<bool> parse_verdict_reply(const std::string& reply) {
    std::string low = text::to_lower_ascii(reply);
    auto is_word_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    };
    auto standalone_at = [&](std::size_t pos, std::size_t len) {
        bool left_ok = pos == 0 || !is_word_char(low[pos - 1]);
        bool right_ok =
            pos + len >= low.size() || !is_word_char(low[pos + len]);
        return left_ok && right_ok;
    };
    std::size_t best = std::string::npos;
    bool value = false;
    for (std::size_t at = low.find("true"); at != std::string::npos;
         at = low.find("true", at + 1)) {
        if (standalone_at(at, 4)) { best = at; value = true; break; }
    }
    for (std::size_t at = low.find("false"); at != std::string::npos;
         at = low.find("false", at + 1)) {
        if (standalone_at(at, 5) && at < best) { best = at; value = false; break; }
    }
    if (best == std::string::npos) return std::nullopt;
    return value;
}

}  // namespace

Verdict judge_knowledge_intensive(ExemplarInstruction& exemplar,
                                  gateway::ChatGateway& judge,
                                  const std::string& model,
                                  int max_parse_retries, JudgeAudit* audit) {
    if (exemplar.verdict != Verdict::Unjudged) {
        return exemplar.verdict;  // cached; do not re-call the gateway
    }
    gateway::ChatRequest req;
    req.model = model;
    req.temperature = 0.0;
    req.max_tokens = 8;
    req.messages = {{gateway::Role::User, render_filter_prompt(exemplar.text)}};

    std::string last_reply;
    for (int attempt = 0; attempt <= max_parse_retries; ++attempt) {
        auto reply = judge.complete(req);
        last_reply = reply.content;
        auto parsed = parse_verdict_reply(reply.content);
        if (parsed.has_value()) {
            exemplar.verdict = *parsed ? Verdict::Keep : Verdict::Drop;
            if (audit) {
                *audit = {exemplar.exemplar_id, last_reply, exemplar.verdict,
                          false};
            }
            return exemplar.verdict;
        }
    }
    exemplar.verdict = Verdict::Drop;
    exemplar.retries_exhausted = true;
    if (audit) {
        *audit = {exemplar.exemplar_id, last_reply, Verdict::Drop, true};
    }
    return exemplar.verdict;
}

const ExemplarInstruction& sample_exemplar(
    const std::vector<ExemplarInstruction>& pool, rng::Stream& stream) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].verdict == Verdict::Keep) keep.push_back(i);
    }
    if (keep.empty()) {
        throw ExemplarError("exemplar pool has no Keep entries");
    }
    return pool[keep[stream.next_index(keep.size())]];
}

void save_pool(const std::vector<ExemplarInstruction>& pool,
               const std::filesystem::path& path) {
    std::string out;
    for (const auto& ex : pool) {
        ordered_json row = {{"exemplar_id", ex.exemplar_id},
                            {"source_dataset", ex.source_dataset},
                            {"text", ex.text},
                            {"verdict", to_string(ex.verdict)}};
        out += row.dump();
        out += '\n';
    }
    jsonl::write_file(path, out);
}

std::vector<ExemplarInstruction> load_pool(const std::filesystem::path& path) {
    std::vector<ExemplarInstruction> pool;
    jsonl::for_each_record(path, [&](std::size_t, const json& rec) {
        ExemplarInstruction ex;
        ex.exemplar_id = rec.at("exemplar_id").get<std::string>();
        ex.source_dataset = rec.at("source_dataset").get<std::string>();
        ex.text = rec.at("text").get<std::string>();
        ex.word_count =
            static_cast<std::uint32_t>(text::count_words(ex.text));
        ex.verdict = verdict_from_string(rec.at("verdict").get<std::string>());
        pool.push_back(std::move(ex));
    });
    return pool;
}

}  // namespace ragforge::exemplars
