#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragforge/corpus.hpp"

namespace ragforge::retrieval {

class RetrievalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankedHit {
    std::string chunk_id;
    double score = 0.0;
    std::uint32_t rank = 0;  // 1-based

    bool operator==(const RankedHit&) const = default;
};

/// Anything that can answer "top k chunks for this query". Implemented by
/// the built-in lexical index and by the external HTTP endpoint adapter.
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::vector<RankedHit> query(const std::string& text,
                                         std::uint32_t k) const = 0;
};

/// Inverted index over a chunk collection, scored with BM25
/// (k1=1.2, b=0.75). Tokens are lowercase alphanumeric runs; document
/// length is the chunk's word_count. Immutable once built, safe to share
/// across query threads.
class IndexedCorpus : public Retriever {
public:
    static IndexedCorpus build(const std::vector<corpus::Chunk>& chunks);

    std::vector<RankedHit> query(const std::string& text,
                                 std::uint32_t k) const override;

    /// Hits whose rank in the full ranking falls in [lo, hi] (1-based,
    /// inclusive). Empty when the ranking is shorter than lo.
    std::vector<RankedHit> query_rank_window(const std::string& text,
                                             std::uint32_t lo,
                                             std::uint32_t hi) const;

    /// Every chunk containing at least one query term, best first.
    std::vector<RankedHit> full_ranking(const std::string& text) const;

    std::size_t size() const { return chunk_ids_.size(); }
    const std::vector<std::string>& chunk_ids() const { return chunk_ids_; }
    double avg_doc_len() const { return avg_doc_len_; }

    void save(const std::filesystem::path& path) const;
    static IndexedCorpus load(const std::filesystem::path& path);

    static constexpr double kK1 = 1.2;
    static constexpr double kB = 0.75;

private:
    struct Posting {
        std::uint32_t ordinal;
        std::uint32_t tf;
    };

    // std::map keeps term order stable for byte-identical persistence.
    std::map<std::string, std::vector<Posting>> postings_;
    std::vector<std::string> chunk_ids_;       // ordinal -> chunk_id
    std::vector<std::uint32_t> doc_lengths_;   // ordinal -> word_count
    double avg_doc_len_ = 0.0;
};

/// Adapter for an external embedding retriever speaking JSON over HTTP:
/// POST {"query": str, "k": int} -> {"hits": [{"chunk_id", "score"}...]}.
/// Validates that scores arrive non-increasing; never re-ranks.
class HttpRetriever : public Retriever {
public:
    explicit HttpRetriever(std::string endpoint, int timeout_ms = 30000);

    std::vector<RankedHit> query(const std::string& text,
                                 std::uint32_t k) const override;

private:
    std::string endpoint_;
    int timeout_ms_;
};

}  // namespace ragforge::retrieval
