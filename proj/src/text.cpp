#include "ragforge/text.hpp"

#include <array>
#include <cctype>

namespace ragforge::text {

namespace {

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
        case U' ':
        case 0x0085:  // NEL
        case 0x00A0:  // NBSP
        case 0x1680:
        case 0x2028: case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Decodes one UTF-8 code point at `i`, advancing `i`. Invalid bytes are
// returned as-is so they land inside words rather than vanishing.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    unsigned char b0 = s[i];
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else { ++i; return b0; }

    if (i + len > s.size()) { ++i; return b0; }
    for (int k = 1; k < len; ++k) {
        unsigned char bk = s[i + k];
        if ((bk & 0xC0) != 0x80) { ++i; return b0; }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

}  // namespace

std::vector<std::string> split_words(std::string_view t) {
    std::vector<std::string> words;
    std::size_t i = 0;
    std::size_t word_start = 0;
    bool in_word = false;
    while (i < t.size()) {
        std::size_t at = i;
        char32_t cp = decode_utf8(t, i);
        if (is_unicode_space(cp)) {
            if (in_word) {
                words.emplace_back(t.substr(word_start, at - word_start));
                in_word = false;
            }
        } else if (!in_word) {
            word_start = at;
            in_word = true;
        }
    }
    if (in_word) words.emplace_back(t.substr(word_start));
    return words;
}

std::size_t count_words(std::string_view text) {
    return split_words(text).size();
}

std::string join_words(const std::vector<std::string>& words,
                       std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end && i < words.size(); ++i) {
        if (i > begin) out += ' ';
        out += words[i];
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        bool is_token_char =
            (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c >= 0x80;
        if (c >= 'A' && c <= 'Z') {
            cur += static_cast<char>(c - 'A' + 'a');
        } else if (is_token_char) {
            cur += static_cast<char>(c);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string strip(std::string_view s) {
    auto words = split_words(s);
    if (words.empty()) return {};
    // Cheap path: trim byte-wise using the word boundaries.
    std::size_t i = 0, lead = 0;
    while (i < s.size()) {
        std::size_t at = i;
        char32_t cp = decode_utf8(s, i);
        if (!is_unicode_space(cp)) { lead = at; break; }
        lead = i;
    }
    std::size_t end = s.size();
    while (end > lead) {
        // Walk back one code point.
        std::size_t j = end - 1;
        while (j > lead && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) --j;
        std::size_t k = j;
        char32_t cp = decode_utf8(s, k);
        if (!is_unicode_space(cp)) break;
        end = j;
    }
    return std::string(s.substr(lead, end - lead));
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

}  // namespace ragforge::text
