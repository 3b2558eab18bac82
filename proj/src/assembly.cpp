#include "ragforge/assembly.hpp"

#include <algorithm>

#include <json.hpp>

#include "ragforge/jsonl.hpp"
#include "ragforge/text.hpp"

namespace ragforge::assembly {

using nlohmann::ordered_json;

ChunkMap::ChunkMap(const std::vector<corpus::Chunk>& chunks)
    : chunks_(&chunks) {
    by_id_.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (!by_id_.emplace(chunks[i].chunk_id, i).second) {
            throw AssemblyError("duplicate chunk_id " + chunks[i].chunk_id);
        }
    }
}

const corpus::Chunk& ChunkMap::at(const std::string& chunk_id) const {
    auto it = by_id_.find(chunk_id);
    if (it == by_id_.end()) {
        throw AssemblyError("unknown chunk_id " + chunk_id);
    }
    return (*chunks_)[it->second];
}

NoiseResult sample_noise(const retrieval::IndexedCorpus& index,
                         const ChunkMap& chunks, const std::string& q_star,
                         const std::unordered_set<std::string>& exclude,
                         std::size_t count, std::uint32_t floor,
                         std::uint32_t ceiling, rng::Stream& stream) {
    if (floor >= ceiling) {
        throw AssemblyError("noise window needs floor < ceiling");
    }
    if (chunks.size() < count + exclude.size()) {
        throw AssemblyError("corpus too small: need " +
                            std::to_string(count + exclude.size()) +
                            " distinct chunks, have " +
                            std::to_string(chunks.size()));
    }
    NoiseResult result;
    if (count == 0) return result;

    auto ranking = index.full_ranking(q_star);

    // Primary pool: ranks (floor, ceiling], minus the excluded set.
    std::vector<const std::string*> window;
    for (std::size_t i = floor; i < ranking.size() && i < ceiling; ++i) {
        if (!exclude.contains(ranking[i].chunk_id)) {
            window.push_back(&ranking[i].chunk_id);
        }
    }

    std::unordered_set<std::string> picked;
    if (window.size() >= count) {
        for (std::size_t i : stream.sample_without_replacement(window.size(), count)) {
            picked.insert(*window[i]);
        }
    } else {
        for (const auto* id : window) picked.insert(*id);
        // Fallback: uniform over the corpus minus the excluded set and minus
        // the top `floor` ranks. Tiny corpora land here routinely.
        result.used_fallback = true;
        std::unordered_set<std::string> blocked = exclude;
        for (std::size_t i = 0; i < ranking.size() && i < floor; ++i) {
            blocked.insert(ranking[i].chunk_id);
        }
        std::vector<const std::string*> pool;
        for (const auto& chunk : chunks.all()) {
            if (!blocked.contains(chunk.chunk_id) &&
                !picked.contains(chunk.chunk_id)) {
                pool.push_back(&chunk.chunk_id);
            }
        }
        std::size_t need = count - picked.size();
        if (pool.size() < need) {
            throw AssemblyError(
                "cannot sample " + std::to_string(count) +
                " noise documents: only " +
                std::to_string(pool.size() + picked.size()) +
                " candidates outside the top " + std::to_string(floor) +
                " ranks and the excluded set");
        }
        for (std::size_t i : stream.sample_without_replacement(pool.size(), need)) {
            picked.insert(*pool[i]);
        }
    }

    // Deterministic output order regardless of set iteration order.
    std::vector<std::string> ids(picked.begin(), picked.end());
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) result.chunks.push_back(chunks.at(id));
    return result;
}

TrainingExample assemble(const synthesis::SynthesisRecord& record,
                         const ChunkMap& chunks,
                         const retrieval::IndexedCorpus& index,
                         const AssemblyOptions& options) {
    if (record.source_chunk_ids.size() > options.total_docs) {
        throw AssemblyError("record " + record.record_key + " has " +
                            std::to_string(record.source_chunk_ids.size()) +
                            " sources but total_docs is " +
                            std::to_string(options.total_docs));
    }

    std::uint64_t seed = rng::derive_seed(options.run_seed, record.record_key);
    rng::Stream stream(seed);

    TrainingExample example;
    example.record_key = record.record_key;
    example.paradigm = record.paradigm;
    example.instruction = record.q_star;
    example.target = record.a_star;
    example.shuffle_seed = seed;

    std::unordered_set<std::string> source_ids(record.source_chunk_ids.begin(),
                                               record.source_chunk_ids.end());
    for (const auto& id : record.source_chunk_ids) {
        const auto& chunk = chunks.at(id);
        example.documents.push_back({chunk.chunk_id, chunk.title, chunk.text, true});
    }

    std::size_t noise_count = options.total_docs - record.source_chunk_ids.size();
    auto noise = sample_noise(index, chunks, record.q_star, source_ids,
                              noise_count, options.noise_rank_floor,
                              options.noise_rank_ceiling, stream);
    example.noise_fallback = noise.used_fallback;
    for (const auto& chunk : noise.chunks) {
        example.documents.push_back({chunk.chunk_id, chunk.title, chunk.text, false});
    }

    stream.shuffle(example.documents);
    return example;
}

std::pair<std::string, std::string> render_training_text(
    const TrainingExample& example) {
    std::string prompt = "### Instruction:\nReference Document:\n";
    for (std::size_t i = 0; i < example.documents.size(); ++i) {
        const auto& doc = example.documents[i];
        prompt += "[" + std::to_string(i + 1) + "] ";
        if (!doc.title.empty()) prompt += "Title: " + doc.title + "\n";
        prompt += doc.text;
        prompt += '\n';
    }
    prompt +=
        "Please refer to the documents above and answer the following "
        "question:\n";
    prompt += example.instruction;
    prompt += "\n### Response:";
    return {std::move(prompt), example.target};
}

DatasetManifest emit_dataset(const std::vector<TrainingExample>& examples,
                             const std::filesystem::path& path) {
    std::vector<const TrainingExample*> ordered;
    ordered.reserve(examples.size());
    for (const auto& ex : examples) ordered.push_back(&ex);
    std::sort(ordered.begin(), ordered.end(),
              [](const TrainingExample* a, const TrainingExample* b) {
                  return a->record_key < b->record_key;
              });

    DatasetManifest manifest;
    std::string out;
    for (const auto* ex : ordered) {
        auto [prompt, response] = render_training_text(*ex);
        ordered_json source_ids = ordered_json::array();
        ordered_json noise_ids = ordered_json::array();
        for (const auto& doc : ex->documents) {
            (doc.is_source ? source_ids : noise_ids).push_back(doc.chunk_id);
        }
        ordered_json row = {
            {"prompt", prompt},
            {"response", response},
            {"meta",
             {{"paradigm", paradigms::to_string(ex->paradigm)},
              {"record_key", ex->record_key},
              {"source_ids", source_ids},
              {"noise_ids", noise_ids},
              {"seed", ex->shuffle_seed},
              {"noise_fallback", ex->noise_fallback}}}};
        out += row.dump();
        out += '\n';
        ++manifest.total;
        ++manifest.per_paradigm[paradigms::to_string(ex->paradigm)];
    }
    jsonl::write_file(path, out);
    return manifest;
}

}  // namespace ragforge::assembly
