#include "icls/scribe.hpp"

#include <algorithm>

namespace icls::scribe {

namespace {

const std::vector<std::string_view>& stopword_table() {
    static const std::vector<std::string_view> table = [] {
        std::vector<std::string_view> words{
            "a",     "about", "above",  "after",  "again", "against", "all",     "am",    "an",     "and",
            "any",   "are",   "as",     "at",     "be",    "because", "been",    "before", "being", "below",
            "between", "both", "but",   "by",     "can",   "could",   "did",     "do",    "does",   "doing",
            "down",  "during", "each",  "few",    "for",   "from",    "further", "had",   "has",    "have",
            "having", "he",   "her",    "here",   "hers",  "herself", "him",     "himself", "his",  "how",
            "i",     "if",    "in",     "into",   "is",    "it",      "its",     "itself", "just",  "me",
            "more",  "most",  "my",     "myself", "no",    "nor",     "not",     "now",   "of",     "off",
            "on",    "once",  "only",   "or",     "other", "our",     "ours",    "ourselves", "out", "over",
            "own",   "same",  "she",    "should", "so",    "some",    "such",    "than",  "that",   "the",
            "their", "theirs", "them",  "themselves", "then", "there", "these",  "they",  "this",   "those",
            "through", "to",  "too",    "under",  "until", "up",      "very",    "was",   "we",     "were",
            "what",  "when",  "where",  "which",  "while", "who",     "whom",    "why",   "will",   "with",
            "would", "you",   "your",   "yours",  "yourself", "yourselves"};
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        return words;
    }();
    return table;
}

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

} // namespace

std::span<const std::string_view> stopwords() noexcept { return stopword_table(); }

bool is_stopword(std::string_view term) noexcept {
    const auto& t = stopword_table();
    return std::binary_search(t.begin(), t.end(), term);
}

std::vector<std::string> normalize_terms(std::string_view text) {
    std::vector<std::string> terms;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !is_stopword(cur)) terms.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else {
            flush();
        }
    }
    flush();
    return terms;
}

std::vector<std::string> term_set(std::string_view text) {
    auto terms = normalize_terms(text);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

} // namespace icls::scribe
