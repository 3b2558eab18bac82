#include "ragforge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ragforge/jsonl.hpp"
#include "ragforge/text.hpp"

namespace ragforge::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

IngestResult ingest_jsonl(const std::filesystem::path& path) {
    IngestResult result;
    std::unordered_set<std::string> seen;
    try {
        jsonl::for_each_record(path, [&](std::size_t lineno, const json& rec) {
            if (!rec.is_object() || !rec.contains("id") || !rec.contains("text")) {
                throw CorpusError(path.string() + " line " +
                                  std::to_string(lineno) +
                                  ": record needs \"id\" and \"text\"");
            }
            SourceDocument doc;
            doc.doc_id = rec.at("id").get<std::string>();
            doc.title = rec.value("title", std::string{});
            doc.body = rec.at("text").get<std::string>();
            if (!seen.insert(doc.doc_id).second) {
                throw CorpusError(path.string() + " line " +
                                  std::to_string(lineno) + ": duplicate id \"" +
                                  doc.doc_id + "\"");
            }
            if (text::split_words(doc.body).empty()) {
                ++result.skipped_empty;
                return;
            }
            result.documents.push_back(std::move(doc));
        });
    } catch (const jsonl::JsonlError& e) {
        throw CorpusError(e.what());
    }
    return result;
}

IngestResult ingest_plain_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw CorpusError(dir.string() + " is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    IngestResult result;
    std::unordered_set<std::string> seen;
    for (const auto& file : files) {
        SourceDocument doc;
        doc.doc_id = file.stem().string();
        doc.body = jsonl::read_file(file);
        if (!seen.insert(doc.doc_id).second) {
            throw CorpusError("duplicate id \"" + doc.doc_id + "\" in " +
                              dir.string());
        }
        if (text::split_words(doc.body).empty()) {
            ++result.skipped_empty;
            continue;
        }
        result.documents.push_back(std::move(doc));
    }
    return result;
}

}  // namespace

IngestResult ingest_corpus(const std::filesystem::path& input,
                           CorpusFormat format) {
    switch (format) {
        case CorpusFormat::Jsonl:
            return ingest_jsonl(input);
        case CorpusFormat::PlainDir:
            return ingest_plain_dir(input);
    }
    throw CorpusError("unknown corpus format");
}

std::vector<Chunk> chunk_document(const SourceDocument& doc,
                                  std::uint32_t max_words) {
    if (max_words < 1) {
        throw CorpusError("max_words must be >= 1");
    }
    auto words = text::split_words(doc.body);
    std::vector<Chunk> chunks;
    std::size_t index = 0;
    for (std::size_t at = 0; at < words.size(); at += max_words, ++index) {
        std::size_t end = std::min(words.size(), at + max_words);
        Chunk c;
        c.chunk_id = doc.doc_id + "#" + std::to_string(index);
        c.parent_doc_id = doc.doc_id;
        c.title = doc.title;
        c.text = text::join_words(words, at, end);
        c.word_count = static_cast<std::uint32_t>(end - at);
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::vector<Chunk> chunk_corpus(const std::vector<SourceDocument>& docs,
                                std::uint32_t max_words) {
    std::vector<Chunk> all;
    for (const auto& doc : docs) {
        auto chunks = chunk_document(doc, max_words);
        all.insert(all.end(), std::make_move_iterator(chunks.begin()),
                   std::make_move_iterator(chunks.end()));
    }
    return all;
}

void save_chunks(const std::vector<Chunk>& chunks,
                 const std::filesystem::path& path) {
    std::string out;
    ordered_json header = {{"format", "chunks"},
                           {"version", 1},
                           {"count", chunks.size()}};
    out += header.dump();
    out += '\n';
    for (const auto& c : chunks) {
        ordered_json row = {{"chunk_id", c.chunk_id},
                            {"parent_doc_id", c.parent_doc_id},
                            {"title", c.title},
                            {"text", c.text},
                            {"word_count", c.word_count}};
        out += row.dump();
        out += '\n';
    }
    jsonl::write_file(path, out);
}

std::vector<Chunk> load_chunks(const std::filesystem::path& path) {
    std::vector<Chunk> chunks;
    bool have_header = false;
    std::size_t expected = 0;
    try {
        jsonl::for_each_record(path, [&](std::size_t lineno, const json& rec) {
            if (lineno == 1) {
                if (!rec.is_object() || rec.value("format", "") != "chunks") {
                    throw CorpusError(path.string() +
                                      ": not a chunk store (bad header)");
                }
                if (rec.value("version", 0) != 1) {
                    throw CorpusError(path.string() +
                                      ": unsupported chunk store version");
                }
                expected = rec.at("count").get<std::size_t>();
                have_header = true;
                return;
            }
            Chunk c;
            c.chunk_id = rec.at("chunk_id").get<std::string>();
            c.parent_doc_id = rec.at("parent_doc_id").get<std::string>();
            c.title = rec.at("title").get<std::string>();
            c.text = rec.at("text").get<std::string>();
            c.word_count = rec.at("word_count").get<std::uint32_t>();
            chunks.push_back(std::move(c));
        });
    } catch (const jsonl::JsonlError& e) {
        throw CorpusError(std::string(e.what()) + " (corrupt chunk store)");
    } catch (const json::exception& e) {
        throw CorpusError(path.string() + ": corrupt chunk store: " + e.what());
    }
    if (!have_header) {
        throw CorpusError(path.string() + ": empty chunk store");
    }
    if (chunks.size() != expected) {
        throw CorpusError(path.string() + ": corrupt chunk store: header count " +
                          std::to_string(expected) + " but found " +
                          std::to_string(chunks.size()) + " chunks");
    }
    return chunks;
}

}  // namespace ragforge::corpus
