#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ragforge/corpus.hpp"
#include "ragforge/retrieval.hpp"
#include "ragforge/rng.hpp"
#include "ragforge/synthesis.hpp"

namespace ragforge::assembly {

class AssemblyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExampleDocument {
    std::string chunk_id;
    std::string title;
    std::string text;
    bool is_source = false;
};

/// The final supervised pair: a shuffled block of source and noise
/// documents, the generated instruction, and its target response.
struct TrainingExample {
    std::string record_key;
    std::vector<ExampleDocument> documents;
    std::string instruction;  // q*
    std::string target;       // a*
    paradigms::ParadigmId paradigm;
    std::uint64_t shuffle_seed = 0;
    bool noise_fallback = false;  // noise came from the corpus-uniform pool
};

/// Chunk lookup by id, shared by assembly and evaluation.
class ChunkMap {
public:
    explicit ChunkMap(const std::vector<corpus::Chunk>& chunks);
    const corpus::Chunk& at(const std::string& chunk_id) const;
    std::size_t size() const { return by_id_.size(); }
    const std::vector<corpus::Chunk>& all() const { return *chunks_; }

private:
    const std::vector<corpus::Chunk>* chunks_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct NoiseResult {
    std::vector<corpus::Chunk> chunks;
    bool used_fallback = false;
};

/// Draws `count` unrelated documents for q_star: uniformly without
/// replacement from ranks (floor, ceiling] of the q_star ranking, never from
/// the excluded set. When that window cannot supply enough, the remainder
/// comes uniformly from the corpus minus the excluded set and minus the top
/// `floor` ranks, and the result is flagged as a fallback.
NoiseResult sample_noise(const retrieval::IndexedCorpus& index,
                         const ChunkMap& chunks, const std::string& q_star,
                         const std::unordered_set<std::string>& exclude,
                         std::size_t count, std::uint32_t floor,
                         std::uint32_t ceiling, rng::Stream& stream);

struct AssemblyOptions {
    std::uint32_t total_docs = 10;
    std::uint32_t noise_rank_floor = 200;
    std::uint32_t noise_rank_ceiling = 2200;
    std::uint64_t run_seed = 0;
};

/// Pads the record's sources with noise documents to total_docs and applies
/// a seeded uniform shuffle. The per-record stream is derived from
/// (run_seed, record_key), so assembly order never matters.
TrainingExample assemble(const synthesis::SynthesisRecord& record,
                         const ChunkMap& chunks,
                         const retrieval::IndexedCorpus& index,
                         const AssemblyOptions& options);

/// Renders the supervised pair in the instruction-tuning layout:
/// "### Instruction:" / reference documents / the fixed answer request /
/// q*, with a* as the target.
std::pair<std::string, std::string> render_training_text(
    const TrainingExample& example);

struct DatasetManifest {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_paradigm;
};

/// Writes dataset.jsonl ({prompt, response, meta...}) ordered by record_key;
/// re-running with identical inputs produces identical bytes.
DatasetManifest emit_dataset(const std::vector<TrainingExample>& examples,
                             const std::filesystem::path& path);

}  // namespace ragforge::assembly
