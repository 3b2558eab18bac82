#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ragforge::corpus {

struct SourceDocument {
    std::string doc_id;
    std::string title;  // may be empty
    std::string body;
};

/// One retrieval unit: a disjoint block of at most max_words words cut
/// from a source document. chunk_id is "<doc_id>#<index>".
struct Chunk {
    std::string chunk_id;
    std::string parent_doc_id;
    std::string title;
    std::string text;
    std::uint32_t word_count = 0;

    bool operator==(const Chunk&) const = default;
};

enum class CorpusFormat { Jsonl, PlainDir };

class CorpusError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IngestResult {
    std::vector<SourceDocument> documents;
    std::size_t skipped_empty = 0;  // records dropped for whitespace-only body
};

/// Reads a corpus from a JSONL file ({"id","title","text"}, title optional)
/// or a directory of .txt files (filename stem becomes the id).
/// Duplicate ids and malformed lines raise CorpusError; empty bodies are
/// skipped and counted.
IngestResult ingest_corpus(const std::filesystem::path& input,
                           CorpusFormat format);

/// Greedy fixed-width chunking: every chunk except possibly the last has
/// exactly max_words words, and concatenating the chunks' words in order
/// reproduces the document's word sequence. Empty body yields no chunks.
std::vector<Chunk> chunk_document(const SourceDocument& doc,
                                  std::uint32_t max_words = 100);

std::vector<Chunk> chunk_corpus(const std::vector<SourceDocument>& docs,
                                std::uint32_t max_words = 100);

/// Versioned JSONL chunk store. The header line carries format/version and
/// the chunk count so truncated files are rejected on load.
void save_chunks(const std::vector<Chunk>& chunks,
                 const std::filesystem::path& path);
std::vector<Chunk> load_chunks(const std::filesystem::path& path);

}  // namespace ragforge::corpus
