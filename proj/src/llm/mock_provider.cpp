#include "icls/hash.hpp"
#include "icls/llm.hpp"

#include <array>
#include <cctype>
#include <random>
#include <set>
#include <sstream>

namespace icls::llm {

namespace {

constexpr std::array<std::string_view, 24> kFiller{
    "culture",    "tradition", "community", "heritage", "custom",    "history",
    "people",     "region",    "practice",  "ritual",   "festival",  "values",
    "expression", "identity",  "influence", "style",    "ceremony",  "symbol",
    "generation", "society",   "craft",     "language", "celebration", "respect"};

constexpr std::array<std::string_view, 8> kDistractors{
    "glacier", "algorithm", "satellite", "volcano", "submarine", "telescope", "magnet", "asteroid"};

/// The text between the first "Data: " and the template line that follows it.
std::string_view data_slot(std::string_view prompt, PromptKind kind) {
    auto start = prompt.find("Data: ");
    if (start == std::string_view::npos) return prompt;
    start += 6;
    std::string_view terminator;
    switch (kind) {
    case PromptKind::summary: terminator = " User Instruction: "; break;
    case PromptKind::quiz: terminator = "\nInstructions :"; break;
    case PromptKind::chat: terminator = "\nUsing this information"; break;
    }
    auto end = kind == PromptKind::summary ? prompt.rfind(terminator) : prompt.find(terminator, start);
    if (end == std::string_view::npos || end < start) end = prompt.size();
    return prompt.substr(start, end - start);
}

/// Alphanumeric words of the data slot, lowercased, in order of appearance.
std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string mock_summary(std::string_view data, std::mt19937_64& rng) {
    auto words = words_of(data);
    std::string out;
    int in_sentence = 0;
    int sentence_len = 10 + static_cast<int>(rng() % 6);
    for (int i = 0; i < MockProvider::kSummaryWords; ++i) {
        std::string w;
        if (!words.empty() && rng() % 2 == 0)
            w = words[rng() % words.size()];
        else
            w = std::string(kFiller[rng() % kFiller.size()]);
        if (in_sentence == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        ++in_sentence;
        bool last = i + 1 == MockProvider::kSummaryWords;
        if (in_sentence == sentence_len || last) {
            w.push_back('.');
            in_sentence = 0;
            sentence_len = 10 + static_cast<int>(rng() % 6);
        }
        if (!out.empty()) out.push_back(' ');
        out.append(w);
    }
    return out;
}

std::string mock_quiz(std::string_view data, std::mt19937_64& rng) {
    std::vector<std::string> keywords;
    std::set<std::string> seen;
    for (auto& w : words_of(data))
        if (w.size() >= 4 && seen.insert(w).second) keywords.push_back(w);
    if (keywords.empty())
        for (auto f : kFiller) keywords.emplace_back(f);

    std::ostringstream out;
    for (int q = 0; q < MockProvider::kQuizQuestions; ++q) {
        const auto& correct = keywords[rng() % keywords.size()];
        int answer = 1 + static_cast<int>(rng() % 4);
        auto offset = rng() % kDistractors.size();
        out << "*Question :** Which of these terms is discussed in the material (item " << (q + 1) << ")?\n";
        int d = 0;
        for (int opt = 1; opt <= 4; ++opt) {
            out << "*Option :** ";
            if (opt == answer)
                out << correct;
            else
                out << kDistractors[(offset + d++) % kDistractors.size()];
            out << '\n';
        }
        out << "*Answer :** " << answer << "\n\n";
    }
    return out.str();
}

std::string mock_chat(std::string_view data) {
    auto words = words_of(data);
    std::string out = "Based on the provided data:";
    for (std::size_t i = 0; i < words.size() && i < 40; ++i) out.append(" ").append(words[i]);
    out.push_back('.');
    return out;
}

} // namespace

std::string MockProvider::complete(const CompletionRequest& request) {
    std::mt19937_64 rng(fnv1a64(request.prompt) ^ static_cast<std::uint64_t>(request.provenance));
    auto data = data_slot(request.prompt, request.provenance);
    switch (request.provenance) {
    case PromptKind::summary: return mock_summary(data, rng);
    case PromptKind::quiz: return mock_quiz(data, rng);
    case PromptKind::chat: return mock_chat(data);
    }
    return {};
}

} // namespace icls::llm
