#pragma once

#include "icls/ids.hpp"
#include "icls/llm.hpp"
#include "icls/time.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icls::worldwise {

inline constexpr std::size_t kMinQuestions = 10;
inline constexpr int kGenerationAttempts = 3;

struct Question {
    std::string stem;
    std::array<std::string, 4> options;
    int answer_index{1};  ///< 1-based

    bool operator==(const Question&) const = default;
};

struct Quiz {
    QuizId quiz_id;
    UnitId unit_id;
    std::vector<Question> questions;

    bool operator==(const Quiz&) const = default;
};

struct Reject {
    std::string block_text;
    std::string reason;  ///< see kReject* below

    bool operator==(const Reject&) const = default;
};

inline constexpr std::string_view kRejectEmptyStem = "empty-stem";
inline constexpr std::string_view kRejectOptionCount = "option-count";
inline constexpr std::string_view kRejectEmptyOption = "empty-option";
inline constexpr std::string_view kRejectAnswerMissing = "answer-missing";
inline constexpr std::string_view kRejectAnswerDuplicate = "answer-duplicate";
inline constexpr std::string_view kRejectAnswerFormat = "answer-format";
inline constexpr std::string_view kRejectAnswerRange = "answer-range";

struct ParseResult {
    std::vector<Question> questions;
    std::vector<Reject> rejects;
};

/// Splits model output into question blocks and validates each one. Never
/// throws; every block lands in exactly one of questions or rejects.
///
/// Markers are matched leniently: leading whitespace and asterisks, the
/// keyword in any case, an optional number after it ("Option 2"), optional
/// space before the colon, and asterisks after it. An answer is a bare
/// integer or "Option N". Lines that are not markers continue the previous
/// field; text before the first question marker is ignored.
ParseResult parse_quiz(std::string_view raw);

/// True when text can be written on a single marker line and read back
/// unchanged: non-empty, no line breaks, no leading/trailing whitespace or
/// asterisks.
bool is_canonical_text(std::string_view text) noexcept;

/// Throws invalid_quiz naming the first violation.
void validate_question(const Question& q);

/// One "*Question :**", four "*Option :**" and one "*Answer :** N" line per
/// question. Throws invalid_quiz for questions that would not round-trip.
std::string render_quiz_text(const std::vector<Question>& questions);

struct Submission {
    LearnerId learner_id;
    QuizId quiz_id;
    std::map<std::size_t, int> answers;  ///< ordinal -> chosen option (1-based)
    Timestamp submitted_at;
};

struct QuestionFeedback {
    bool answered{false};
    bool correct{false};
    std::optional<int> chosen;

    bool operator==(const QuestionFeedback&) const = default;
};

struct GradeReport {
    std::size_t correct_count{0};
    std::size_t total{0};
    double score{0.0};
    std::vector<QuestionFeedback> per_question;
};

/// Unanswered questions count as incorrect. Throws quiz_mismatch when the
/// submission names another quiz or an ordinal/option outside the quiz.
GradeReport grade(const Quiz& quiz, const Submission& submission);

struct GenerationOutcome {
    std::vector<Question> questions;  ///< best attempt
    std::vector<Reject> rejects;      ///< rejects of the best attempt
    int attempts{0};
};

/// Quiz prompt -> completion -> parse, up to three attempts keeping the one
/// with the most valid questions. Throws quiz_underfull when even the best
/// attempt has fewer than ten.
GenerationOutcome generate_quiz(llm::Gateway& gateway, std::string_view combined_text);

} // namespace icls::worldwise
