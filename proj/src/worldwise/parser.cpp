#include "icls/worldwise.hpp"

#include <cctype>
#include <optional>

namespace icls::worldwise {

namespace {

enum class MarkerKind { question, option, answer };

struct Marker {
    MarkerKind kind;
    std::string_view content;
};

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim_decoration(std::string_view s) {
    while (!s.empty() && (is_ws(s.front()) || s.front() == '*')) s.remove_prefix(1);
    while (!s.empty() && (is_ws(s.back()) || s.back() == '*')) s.remove_suffix(1);
    return s;
}

bool starts_with_ci(std::string_view s, std::string_view word) {
    if (s.size() < word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != word[i]) return false;
    return true;
}

std::optional<Marker> match_marker(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (is_ws(line[i]) || line[i] == '*')) ++i;
    auto rest = line.substr(i);

    static constexpr std::pair<std::string_view, MarkerKind> kKeywords[] = {
        {"question", MarkerKind::question}, {"option", MarkerKind::option}, {"answer", MarkerKind::answer}};
    for (auto [word, kind] : kKeywords) {
        if (!starts_with_ci(rest, word)) continue;
        std::size_t j = word.size();
        while (j < rest.size() && is_ws(rest[j])) ++j;
        while (j < rest.size() && is_digit(rest[j])) ++j;
        while (j < rest.size() && is_ws(rest[j])) ++j;
        if (j >= rest.size() || rest[j] != ':') return std::nullopt;
        return Marker{kind, trim_decoration(rest.substr(j + 1))};
    }
    return std::nullopt;
}

enum class AnswerParse { ok, format, range };

AnswerParse parse_answer(std::string_view text, int& out) {
    auto s = trim_decoration(text);
    if (starts_with_ci(s, "option")) {
        s.remove_prefix(6);
        while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    }
    if (!s.empty() && (s.back() == '.' || s.back() == ')')) s.remove_suffix(1);
    if (s.empty() || s.size() > 9) return AnswerParse::format;
    int value = 0;
    for (char c : s) {
        if (!is_digit(c)) return AnswerParse::format;
        value = value * 10 + (c - '0');
    }
    if (value < 1 || value > 4) return AnswerParse::range;
    out = value;
    return AnswerParse::ok;
}

struct Block {
    std::string raw;
    std::string stem;
    std::vector<std::string> options;
    std::vector<std::string> answers;
    enum class Field { stem, option, answer } last{Field::stem};

    void append_continuation(std::string_view text) {
        auto t = trim_decoration(text);
        if (t.empty()) return;
        std::string* target = nullptr;
        if (last == Field::stem)
            target = &stem;
        else if (last == Field::option && !options.empty())
            target = &options.back();
        if (!target) return;
        if (!target->empty()) target->push_back(' ');
        target->append(t);
    }
};

void scrub_carriage_returns(std::string& s) {
    for (auto& c : s)
        if (c == '\r') c = ' ';
}

void finish_block(Block& b, ParseResult& result) {
    scrub_carriage_returns(b.stem);
    for (auto& o : b.options) scrub_carriage_returns(o);
    auto reject = [&](std::string_view reason) { result.rejects.push_back({std::move(b.raw), std::string(reason)}); };
    if (b.stem.empty()) return reject(kRejectEmptyStem);
    if (b.options.size() != 4) return reject(kRejectOptionCount);
    for (const auto& o : b.options)
        if (o.empty()) return reject(kRejectEmptyOption);
    if (b.answers.empty()) return reject(kRejectAnswerMissing);
    if (b.answers.size() > 1) return reject(kRejectAnswerDuplicate);
    int answer = 0;
    switch (parse_answer(b.answers.front(), answer)) {
    case AnswerParse::format: return reject(kRejectAnswerFormat);
    case AnswerParse::range: return reject(kRejectAnswerRange);
    case AnswerParse::ok: break;
    }
    Question q;
    q.stem = std::move(b.stem);
    for (std::size_t i = 0; i < 4; ++i) q.options[i] = std::move(b.options[i]);
    q.answer_index = answer;
    result.questions.push_back(std::move(q));
}

} // namespace

ParseResult parse_quiz(std::string_view raw) {
    ParseResult result;
    std::optional<Block> block;

    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto nl = raw.find('\n', pos);
        auto line = raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto marker = match_marker(line);
        if (marker && marker->kind == MarkerKind::question) {
            if (block) finish_block(*block, result);
            block.emplace();
            block->stem = std::string(marker->content);
            block->raw = std::string(line);
            continue;
        }
        if (!block) continue;
        if (!trim_decoration(line).empty()) {
            block->raw.push_back('\n');
            block->raw.append(line);
        }
        if (!marker) {
            block->append_continuation(line);
        } else if (marker->kind == MarkerKind::option) {
            block->options.emplace_back(marker->content);
            block->last = Block::Field::option;
        } else {
            block->answers.emplace_back(marker->content);
            block->last = Block::Field::answer;
        }
    }
    if (block) finish_block(*block, result);
    return result;
}

} // namespace icls::worldwise
