#include "icls/error.hpp"
#include "icls/worldwise.hpp"

namespace icls::worldwise {

namespace {

bool is_edge_char(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f' || c == '*';
}

} // namespace

bool is_canonical_text(std::string_view text) noexcept {
    if (text.empty() || is_edge_char(text.front()) || is_edge_char(text.back())) return false;
    return text.find_first_of("\r\n") == std::string_view::npos;
}

void validate_question(const Question& q) {
    if (!is_canonical_text(q.stem)) throw Error(Errc::invalid_quiz, "question stem is empty or not single-line");
    for (const auto& o : q.options)
        if (!is_canonical_text(o)) throw Error(Errc::invalid_quiz, "option is empty or not single-line");
    if (q.answer_index < 1 || q.answer_index > 4) throw Error(Errc::invalid_quiz, "answer_index must be in [1,4]");
}

std::string render_quiz_text(const std::vector<Question>& questions) {
    std::string out;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto& q = questions[i];
        validate_question(q);
        if (i > 0) out.push_back('\n');
        out.append("*Question :** ").append(q.stem).push_back('\n');
        for (const auto& o : q.options) out.append("*Option :** ").append(o).push_back('\n');
        out.append("*Answer :** ").append(std::to_string(q.answer_index)).push_back('\n');
    }
    return out;
}

GradeReport grade(const Quiz& quiz, const Submission& submission) {
    if (submission.quiz_id != quiz.quiz_id) throw Error(Errc::quiz_mismatch, "submission targets another quiz");
    for (const auto& [ordinal, option] : submission.answers) {
        if (ordinal >= quiz.questions.size())
            throw Error(Errc::quiz_mismatch, "answer ordinal " + std::to_string(ordinal) + " is outside the quiz");
        if (option < 1 || option > 4) throw Error(Errc::quiz_mismatch, "chosen option must be in [1,4]");
    }
    GradeReport report;
    report.total = quiz.questions.size();
    report.per_question.reserve(report.total);
    for (std::size_t i = 0; i < quiz.questions.size(); ++i) {
        QuestionFeedback fb;
        if (auto it = submission.answers.find(i); it != submission.answers.end()) {
            fb.answered = true;
            fb.chosen = it->second;
            fb.correct = it->second == quiz.questions[i].answer_index;
        }
        if (fb.correct) ++report.correct_count;
        report.per_question.push_back(fb);
    }
    report.score = report.total == 0 ? 0.0 : static_cast<double>(report.correct_count) / static_cast<double>(report.total);
    return report;
}

GenerationOutcome generate_quiz(llm::Gateway& gateway, std::string_view combined_text) {
    auto prompt = llm::render_quiz_prompt(combined_text);
    GenerationOutcome best;
    for (int attempt = 1; attempt <= kGenerationAttempts; ++attempt) {
        auto reply = gateway.complete(gateway.make_request(prompt, llm::PromptKind::quiz));
        auto parsed = parse_quiz(reply.text);
        if (attempt == 1 || parsed.questions.size() > best.questions.size()) {
            best.questions = std::move(parsed.questions);
            best.rejects = std::move(parsed.rejects);
        }
        best.attempts = attempt;
        if (best.questions.size() >= kMinQuestions) return best;
    }
    throw Error(Errc::quiz_underfull, "best of " + std::to_string(kGenerationAttempts) + " attempts yielded " +
                                          std::to_string(best.questions.size()) + " valid questions");
}

} // namespace icls::worldwise
