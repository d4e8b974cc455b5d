#include "icls/treasury.hpp"

#include "icls/ingestion.hpp"

#include <algorithm>

namespace icls::treasury {

namespace {

constexpr int kMaxReduceRounds = 4;
constexpr std::int64_t kPromptSlackTokens = 16;

std::string complete_summary(llm::Gateway& gateway, std::string_view text, std::string_view instruction) {
    auto prompt = llm::render_summary_prompt(text, instruction);
    return gateway.complete(gateway.make_request(std::move(prompt), llm::PromptKind::summary)).text;
}

/// Reduces `text` by summarizing window-sized pieces until the joined result
/// fits a single summary prompt.
std::string reduce_to_fit(llm::Gateway& gateway, std::string text, std::string_view instruction) {
    const auto& cfg = gateway.config();
    const auto budget = cfg.context_window - cfg.reply_reserve - llm::template_overhead_tokens(llm::PromptKind::summary) -
                        ingestion::estimate_tokens(instruction) - kPromptSlackTokens;
    if (budget < 8)
        throw Error(Errc::context_overflow, "context window leaves no room for document text");
    ingestion::ChunkParams params{budget, budget / 8};

    for (int round = 0; round < kMaxReduceRounds && needs_map_reduce(gateway, text, instruction); ++round) {
        ingestion::DocumentText doc{UnitId{}, text, ingestion::estimate_tokens(text)};
        std::string joined;
        for (const auto& piece : ingestion::chunk(doc, params)) {
            if (!joined.empty()) joined.append("\n\n");
            joined.append(complete_summary(gateway, piece.text, instruction));
        }
        text = std::move(joined);
    }
    return text;
}

} // namespace

std::string_view to_string(Strategy s) noexcept { return s == Strategy::single_pass ? "single_pass" : "map_reduce"; }

std::optional<Strategy> parse_strategy(std::string_view text) noexcept {
    if (text == "single_pass") return Strategy::single_pass;
    if (text == "map_reduce") return Strategy::map_reduce;
    return std::nullopt;
}

std::size_t word_count(std::string_view text) noexcept {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
        if (!ws && !in_word) ++count;
        in_word = !ws;
    }
    return count;
}

Validation validate_summary(std::string_view text) {
    auto words = word_count(text);
    if (words == 0) return {false, "empty"};
    if (words < kMinSummaryWords) return {false, "too-short"};
    return {true, {}};
}

bool needs_map_reduce(const llm::Gateway& gateway, std::string_view raw_text, std::string_view instruction) {
    return !gateway.prompt_fits(llm::render_summary_prompt(raw_text, instruction));
}

Summary generate_summary(llm::Gateway& gateway, UnitId unit, std::string_view raw_text,
                         std::string_view admin_instruction) {
    Summary s;
    s.unit_id = unit;
    std::string source{raw_text};
    if (needs_map_reduce(gateway, raw_text, admin_instruction)) {
        s.strategy = Strategy::map_reduce;
        source = reduce_to_fit(gateway, std::move(source), admin_instruction);
    }

    auto first = complete_summary(gateway, source, admin_instruction);
    if (validate_summary(first).accepted) {
        s.text = std::move(first);
    } else {
        std::string instruction{admin_instruction};
        if (!instruction.empty()) instruction.push_back(' ');
        instruction.append(kLengthReminder);
        std::string second;
        try {
            second = complete_summary(gateway, source, instruction);
        } catch (const Error& e) {
            if (e.code() != Errc::context_overflow) throw;
        }
        if (validate_summary(second).accepted) {
            s.text = std::move(second);
        } else {
            auto& longest = word_count(second) > word_count(first) ? second : first;
            auto words = word_count(longest);
            throw SummaryTooShort(std::move(longest), words);
        }
    }
    s.word_count = word_count(s.text);
    return s;
}

} // namespace icls::treasury
