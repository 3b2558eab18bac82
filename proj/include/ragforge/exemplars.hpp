#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ragforge/gateway.hpp"
#include "ragforge/rng.hpp"

namespace ragforge::exemplars {

class ExemplarError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Verdict { Unjudged, Keep, Drop };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// One instruction sampled from an existing instruction dataset, together
/// with its knowledge-intensive verdict.
struct ExemplarInstruction {
    std::string exemplar_id;
    std::string source_dataset;
    std::string text;
    std::uint32_t word_count = 0;
    Verdict verdict = Verdict::Unjudged;
    bool retries_exhausted = false;  // audit flag: Drop came from parse failures
};

struct IngestStats {
    std::size_t skipped_empty = 0;
    std::vector<std::size_t> missing_field_lines;
};

/// Reads a JSONL instruction dataset; each record needs a "question" (or
/// "instruction") field. Ids are "<source_label>#<line>". Records with a
/// missing field are collected into `stats`; whitespace-only questions are
/// skipped and counted.
std::vector<ExemplarInstruction> ingest_exemplars(
    const std::filesystem::path& path, const std::string& source_label,
    IngestStats* stats = nullptr);

/// Keeps exemplars with min_words <= word_count <= max_words.
std::vector<ExemplarInstruction> prefilter(
    const std::vector<ExemplarInstruction>& exemplars, std::uint32_t min_words,
    std::uint32_t max_words);

/// Renders the knowledge-intensive filter prompt for one question.
std::string render_filter_prompt(const std::string& question);

struct JudgeAudit {
    std::string exemplar_id;
    std::string raw_reply;
    Verdict verdict;
    bool retries_exhausted = false;
};

/// Asks the judge whether retrieval would help answer the exemplar. The
/// reply is scanned case-insensitively for the first "true"/"false" token;
/// an unparseable reply is retried up to max_parse_retries times and then
/// dropped with the audit flag set. Already-judged exemplars are returned
/// as-is without touching the gateway.
Verdict judge_knowledge_intensive(ExemplarInstruction& exemplar,
                                  gateway::ChatGateway& judge,
                                  const std::string& model,
                                  int max_parse_retries = 2,
                                  JudgeAudit* audit = nullptr);

/// Uniform draw over Keep exemplars; errors if there are none.
const ExemplarInstruction& sample_exemplar(
    const std::vector<ExemplarInstruction>& pool, rng::Stream& stream);

/// Pool persistence: JSONL {exemplar_id, source_dataset, text, verdict}.
void save_pool(const std::vector<ExemplarInstruction>& pool,
               const std::filesystem::path& path);
std::vector<ExemplarInstruction> load_pool(const std::filesystem::path& path);

}  // namespace ragforge::exemplars
