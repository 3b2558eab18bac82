#include "ragforge/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <httplib.h>
#include <json.hpp>

#include "ragforge/jsonl.hpp"
#include "ragforge/text.hpp"

namespace ragforge::retrieval {

using nlohmann::json;
using nlohmann::ordered_json;

IndexedCorpus IndexedCorpus::build(const std::vector<corpus::Chunk>& chunks) {
    if (chunks.empty()) {
        throw RetrievalError("cannot index an empty chunk collection");
    }
    IndexedCorpus index;
    index.chunk_ids_.reserve(chunks.size());
    index.doc_lengths_.reserve(chunks.size());

    std::uint64_t total_len = 0;
    for (std::uint32_t ord = 0; ord < chunks.size(); ++ord) {
        const auto& chunk = chunks[ord];
        index.chunk_ids_.push_back(chunk.chunk_id);
        index.doc_lengths_.push_back(chunk.word_count);
        total_len += chunk.word_count;

        std::unordered_map<std::string, std::uint32_t> tf;
        for (auto& tok : text::tokenize(chunk.text)) ++tf[tok];
        for (auto& [term, count] : tf) {
            index.postings_[term].push_back({ord, count});
        }
    }
    // Postings were appended in ascending ordinal order per term already;
    // keep that invariant explicit for loaded indexes too.
    for (auto& [term, list] : index.postings_) {
        std::sort(list.begin(), list.end(),
                  [](const Posting& a, const Posting& b) {
                      return a.ordinal < b.ordinal;
                  });
    }
    index.avg_doc_len_ =
        static_cast<double>(total_len) / static_cast<double>(chunks.size());
    return index;
}

std::vector<RankedHit> IndexedCorpus::full_ranking(
    const std::string& query_text) const {
    auto tokens = text::tokenize(query_text);
    // Score each unique query term once; query-side term frequency is ignored.
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

    const double n_docs = static_cast<double>(chunk_ids_.size());
    std::unordered_map<std::uint32_t, double> scores;
    for (const auto& term : tokens) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& list = it->second;
        const double df = static_cast<double>(list.size());
        // Nonnegative BM25 idf; common terms bottom out near zero instead
        // of going negative.
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        for (const auto& posting : list) {
            const double tf = static_cast<double>(posting.tf);
            const double dl = static_cast<double>(doc_lengths_[posting.ordinal]);
            const double denom =
                tf + kK1 * (1.0 - kB + kB * dl / avg_doc_len_);
            scores[posting.ordinal] += idf * tf * (kK1 + 1.0) / denom;
        }
    }

    std::vector<RankedHit> hits;
    hits.reserve(scores.size());
    for (const auto& [ordinal, score] : scores) {
        hits.push_back({chunk_ids_[ordinal], score, 0});
    }
    // Ties break on ascending chunk_id so rankings are corpus-order
    // independent.
    std::sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    for (std::size_t i = 0; i < hits.size(); ++i) {
        hits[i].rank = static_cast<std::uint32_t>(i + 1);
    }
    return hits;
}

std::vector<RankedHit> IndexedCorpus::query(const std::string& text,
                                            std::uint32_t k) const {
    if (k < 1) throw RetrievalError("query: k must be >= 1");
    auto hits = full_ranking(text);
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::vector<RankedHit> IndexedCorpus::query_rank_window(
    const std::string& text, std::uint32_t lo, std::uint32_t hi) const {
    if (lo < 1 || lo > hi) {
        throw RetrievalError("query_rank_window: need 1 <= lo <= hi");
    }
    auto hits = full_ranking(text);
    if (hits.size() < lo) return {};
    std::size_t last = std::min<std::size_t>(hits.size(), hi);
    return std::vector<RankedHit>(hits.begin() + (lo - 1), hits.begin() + last);
}

void IndexedCorpus::save(const std::filesystem::path& path) const {
    std::string out;
    ordered_json header = {{"format", "index"},
                           {"version", 1},
                           {"chunks", chunk_ids_.size()},
                           {"terms", postings_.size()}};
    out += header.dump();
    out += '\n';
    for (std::size_t ord = 0; ord < chunk_ids_.size(); ++ord) {
        ordered_json row = {{"chunk_id", chunk_ids_[ord]},
                            {"len", doc_lengths_[ord]}};
        out += row.dump();
        out += '\n';
    }
    for (const auto& [term, list] : postings_) {
        ordered_json entries = json::array();
        for (const auto& posting : list) {
            entries.push_back({posting.ordinal, posting.tf});
        }
        ordered_json row = {{"term", term}, {"postings", entries}};
        out += row.dump();
        out += '\n';
    }
    jsonl::write_file(path, out);
}

IndexedCorpus IndexedCorpus::load(const std::filesystem::path& path) {
    IndexedCorpus index;
    std::size_t expected_chunks = 0;
    std::size_t expected_terms = 0;
    bool have_header = false;
    try {
        jsonl::for_each_record(path, [&](std::size_t lineno, const json& rec) {
            if (lineno == 1) {
                if (rec.value("format", "") != "index" ||
                    rec.value("version", 0) != 1) {
                    throw RetrievalError(path.string() + ": not a v1 index file");
                }
                expected_chunks = rec.at("chunks").get<std::size_t>();
                expected_terms = rec.at("terms").get<std::size_t>();
                have_header = true;
                return;
            }
            if (rec.contains("chunk_id")) {
                index.chunk_ids_.push_back(rec.at("chunk_id").get<std::string>());
                index.doc_lengths_.push_back(rec.at("len").get<std::uint32_t>());
            } else {
                std::vector<Posting> list;
                for (const auto& e : rec.at("postings")) {
                    list.push_back({e.at(0).get<std::uint32_t>(),
                                    e.at(1).get<std::uint32_t>()});
                }
                index.postings_[rec.at("term").get<std::string>()] =
                    std::move(list);
            }
        });
    } catch (const jsonl::JsonlError& e) {
        throw RetrievalError(std::string(e.what()) + " (corrupt index)");
    } catch (const json::exception& e) {
        throw RetrievalError(path.string() + ": corrupt index: " + e.what());
    }
    if (!have_header || index.chunk_ids_.size() != expected_chunks ||
        index.postings_.size() != expected_terms) {
        throw RetrievalError(path.string() + ": corrupt index (truncated)");
    }
    std::uint64_t total = std::accumulate(index.doc_lengths_.begin(),
                                          index.doc_lengths_.end(),
                                          std::uint64_t{0});
    index.avg_doc_len_ = index.chunk_ids_.empty()
                             ? 0.0
                             : static_cast<double>(total) /
                                   static_cast<double>(index.chunk_ids_.size());
    return index;
}

HttpRetriever::HttpRetriever(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

std::vector<RankedHit> HttpRetriever::query(const std::string& text,
                                            std::uint32_t k) const {
    if (k < 1) throw RetrievalError("query: k must be >= 1");

    auto slash = endpoint_.find('/', endpoint_.find("//") + 2);
    std::string host = slash == std::string::npos ? endpoint_
                                                  : endpoint_.substr(0, slash);
    std::string route = slash == std::string::npos ? "/"
                                                   : endpoint_.substr(slash);

    httplib::Client client(host);
    client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

    json body = {{"query", text}, {"k", k}};
    auto res = client.Post(route, body.dump(), "application/json");
    if (!res) {
        throw RetrievalError("retriever endpoint unreachable: " + endpoint_);
    }
    if (res->status != 200) {
        throw RetrievalError("retriever endpoint returned status " +
                             std::to_string(res->status));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("hits")) {
        throw RetrievalError("retriever endpoint reply is not {\"hits\": [...]}");
    }
    std::vector<RankedHit> hits;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& h : reply.at("hits")) {
        RankedHit hit;
        hit.chunk_id = h.at("chunk_id").get<std::string>();
        hit.score = h.at("score").get<double>();
        if (hit.score > prev) {
            throw RetrievalError(
                "retriever endpoint returned non-monotone scores");
        }
        prev = hit.score;
        hit.rank = static_cast<std::uint32_t>(hits.size() + 1);
        hits.push_back(std::move(hit));
        if (hits.size() == k) break;
    }
    return hits;
}

}  // namespace ragforge::retrieval
