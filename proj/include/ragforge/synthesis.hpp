#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ragforge/corpus.hpp"
#include "ragforge/exemplars.hpp"
#include "ragforge/gateway.hpp"
#include "ragforge/paradigms.hpp"

namespace ragforge::synthesis {

class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One pending generation: paradigm r, source documents D*, and the
/// exemplar instruction q' that the generated question should emulate.
struct SynthesisTask {
    std::string record_key;
    paradigms::ParadigmSpec paradigm;
    std::vector<corpus::Chunk> sources;
    exemplars::ExemplarInstruction exemplar;
};

struct SynthesisRecord {
    std::string record_key;
    paradigms::ParadigmId paradigm;
    std::vector<std::string> source_chunk_ids;
    std::string exemplar_id;
    std::string q_star;
    std::string a_star;
    std::string raw_reply;
};

struct RejectEntry {
    std::string record_key;
    std::string reason;
    std::string raw_reply;  // last reply when the failure was a parse failure
};

/// Renders "[1] Title: ...\n<text>" lines for a document block; `Title:` is
/// prepended only when the title is non-empty.
std::string render_document_lines(const std::vector<corpus::Chunk>& docs);

/// Builds the full synthesis prompt: the document block, the fixed task
/// statement, the paradigm's requirement rules, and the exemplar inside
/// <Simulated Instruction> tags.
std::string render_prompt(const SynthesisTask& task);

/// Extracts the first JSON object carrying non-empty string fields "q*" and
/// "a*", tolerating code fences and surrounding prose. Throws ParseError.
std::pair<std::string, std::string> parse_reply(const std::string& raw);

struct SynthesisOptions {
    std::string model = "gpt-4o";
    double temperature = 0.7;
    int max_tokens = 1024;
    std::uint32_t max_q_words = 200;
    std::uint32_t max_a_words = 1200;
};

/// One task through the gateway. A malformed reply is re-asked once with a
/// stricter reminder appended; a second failure throws ParseError (callers
/// turn it into a reject entry).
SynthesisRecord synthesize(const SynthesisTask& task,
                           gateway::ChatGateway& gw,
                           const SynthesisOptions& options);

struct SynthesisOutcome {
    std::vector<SynthesisRecord> records;
    std::vector<RejectEntry> rejects;
};

/// Runs every task, splitting the results into records and rejects;
/// records.size() + rejects.size() == tasks.size() always holds.
SynthesisOutcome synthesize_all(const std::vector<SynthesisTask>& tasks,
                                gateway::ChatGateway& gw,
                                const SynthesisOptions& options,
                                int workers = 1);

}  // namespace ragforge::synthesis
