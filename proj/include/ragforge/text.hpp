#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ragforge::text {

/// Splits UTF-8 text into words: maximal runs of non-whitespace code points.
/// Whitespace is the usual Unicode set (ASCII space/tab/newlines, NBSP,
/// en/em spaces, line/paragraph separators, ideographic space).
std::vector<std::string> split_words(std::string_view text);

/// Number of words as defined by split_words.
std::size_t count_words(std::string_view text);

/// Joins words with single spaces.
std::string join_words(const std::vector<std::string>& words,
                       std::size_t begin, std::size_t end);

/// Retrieval tokens: runs of [a-z0-9] after ASCII lowercasing. Bytes >= 0x80
/// are kept as token characters so multi-byte UTF-8 words stay intact.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower_ascii(std::string_view s);

/// Strips leading/trailing Unicode whitespace.
std::string strip(std::string_view s);

// 64-bit FNV-1a, used for record keys and manifest change detection.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace ragforge::text
