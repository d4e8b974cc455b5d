#include "icls/error.hpp"
#include "icls/worldwise.hpp"
#include "support/generators.hpp"
#include "support/quiz_fuzz.hpp"

#include <gtest/gtest.h>

#include <deque>
#include <mutex>

using namespace icls;
using namespace icls::worldwise;

namespace {

const std::string kFixture = std::string(ICLS_TEST_DATA) + "/fixtures/quiz_12_blocks_2_malformed.txt";

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an icls::Error";
    return Errc::validation;
}

std::string block(const std::string& stem, int options, const std::string& answer) {
    std::string s = "*Question :** " + stem + "\n";
    for (int i = 0; i < options; ++i) s += "*Option :** opt" + std::to_string(i + 1) + "\n";
    if (!answer.empty()) s += "*Answer :** " + answer + "\n";
    return s;
}

/// Replays canned completions in order, repeating the last one.
class ScriptedProvider final : public llm::CompletionProvider {
public:
    explicit ScriptedProvider(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}
    std::string complete(const llm::CompletionRequest& req) override {
        std::lock_guard l(m_);
        ++calls;
        last_kind = req.provenance;
        if (replies_.size() > 1) {
            auto r = replies_.front();
            replies_.pop_front();
            return r;
        }
        return replies_.front();
    }
    int calls{0};
    llm::PromptKind last_kind{};

private:
    std::mutex m_;
    std::deque<std::string> replies_;
};

Quiz ten_question_quiz() {
    Quiz quiz;
    quiz.quiz_id = QuizId{7};
    for (int i = 0; i < 10; ++i)
        quiz.questions.push_back({"Q" + std::to_string(i), {"a", "b", "c", "d"}, 1 + i % 4});
    return quiz;
}

Submission submission_for(const Quiz& quiz) {
    Submission s;
    s.learner_id = LearnerId{1};
    s.quiz_id = quiz.quiz_id;
    return s;
}

} // namespace

TEST(ParseQuiz, CanonicalBlock) {
    auto r = parse_quiz("*Question :** Capital of Japan?\n*Option :** Kyoto\n*Option :** Tokyo\n*Option :** "
                        "Osaka\n*Option :** Nara\n*Answer :** 2");
    ASSERT_EQ(r.questions.size(), 1u);
    EXPECT_TRUE(r.rejects.empty());
    EXPECT_EQ(r.questions[0].stem, "Capital of Japan?");
    EXPECT_EQ(r.questions[0].options, (std::array<std::string, 4>{"Kyoto", "Tokyo", "Osaka", "Nara"}));
    EXPECT_EQ(r.questions[0].answer_index, 2);
}

TEST(ParseQuiz, ThreeOptionsRejected) {
    auto r = parse_quiz(block("Stem", 3, "1"));
    EXPECT_TRUE(r.questions.empty());
    ASSERT_EQ(r.rejects.size(), 1u);
    EXPECT_EQ(r.rejects[0].reason, kRejectOptionCount);
}

TEST(ParseQuiz, LowercaseOptionAnswer) {
    auto text = "*question :** Stem\n*option :** a\n*option :** b\n*option :** c\n*option :** d\nanswer: option 2";
    auto r = parse_quiz(text);
    ASSERT_EQ(r.questions.size(), 1u);
    EXPECT_EQ(r.questions[0].answer_index, 2);
}

TEST(ParseQuiz, NumberedMarkersAndDecoratedAnswers) {
    auto r = parse_quiz("**Question 3:** S\n**Option 1:** a\n**Option 2:** b\n**Option 3:** c\n**Option 4:** d\n"
                        "**Answer:** Option 4.\n");
    ASSERT_EQ(r.questions.size(), 1u);
    EXPECT_EQ(r.questions[0].answer_index, 4);
    EXPECT_EQ(parse_quiz(block("S", 4, "3)")).questions.at(0).answer_index, 3);
}

TEST(ParseQuiz, RejectReasons) {
    EXPECT_EQ(parse_quiz(block("", 4, "1")).rejects.at(0).reason, kRejectEmptyStem);
    EXPECT_EQ(parse_quiz(block("S", 5, "1")).rejects.at(0).reason, kRejectOptionCount);
    EXPECT_EQ(parse_quiz("*Question :** S\n*Option :** a\n*Option :**\n*Option :** c\n*Option :** d\n*Answer :** 1")
                  .rejects.at(0)
                  .reason,
              kRejectEmptyOption);
    EXPECT_EQ(parse_quiz(block("S", 4, "")).rejects.at(0).reason, kRejectAnswerMissing);
    EXPECT_EQ(parse_quiz(block("S", 4, "1") + "*Answer :** 2").rejects.at(0).reason, kRejectAnswerDuplicate);
    EXPECT_EQ(parse_quiz(block("S", 4, "Tokyo")).rejects.at(0).reason, kRejectAnswerFormat);
    EXPECT_EQ(parse_quiz(block("S", 4, "5")).rejects.at(0).reason, kRejectAnswerRange);
    EXPECT_EQ(parse_quiz(block("S", 4, "0")).rejects.at(0).reason, kRejectAnswerRange);
}

TEST(ParseQuiz, PreambleIgnoredContinuationsJoined) {
    auto r = parse_quiz("Sure! Here is your quiz:\n\n*Question :** Which\nfestival?\n*Option :** a\n*Option :** "
                        "long\noption\n*Option :** c\n*Option :** d\n*Answer :** 2\n");
    ASSERT_EQ(r.questions.size(), 1u);
    EXPECT_EQ(r.questions[0].stem, "Which festival?");
    EXPECT_EQ(r.questions[0].options[1], "long option");
}

TEST(ParseQuiz, CrlfInput) {
    auto r = parse_quiz("*Question :** S\r\n*Option :** a\r\n*Option :** b\r\n*Option :** c\r\n*Option :** d\r\n"
                        "*Answer :** 1\r\n");
    ASSERT_EQ(r.questions.size(), 1u);
    EXPECT_EQ(r.questions[0].options[3], "d");
}

TEST(ParseQuiz, FixtureYieldsTenQuestionsTwoRejects) {
    auto text = support::read_file(kFixture);
    ASSERT_FALSE(text.empty());
    auto r = parse_quiz(text);
    EXPECT_EQ(r.questions.size(), 10u);
    ASSERT_EQ(r.rejects.size(), 2u);
    EXPECT_EQ(r.rejects[0].reason, kRejectOptionCount);
    EXPECT_EQ(r.rejects[1].reason, kRejectAnswerRange);
    EXPECT_EQ(support::count_question_markers(text), 12u);
}

TEST(ParseQuiz, TotalityOnRandomBytes) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        auto text = support::random_bytes(rng, 400);
        ParseResult r;
        ASSERT_NO_THROW(r = parse_quiz(text));
        EXPECT_EQ(r.questions.size() + r.rejects.size(), support::count_question_markers(text));
    }
}

TEST(ParseQuiz, TotalityOnMutatedFixture) {
    auto fixture = support::read_file(kFixture);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
        auto text = support::mutate(fixture, rng);
        ParseResult r;
        ASSERT_NO_THROW(r = parse_quiz(text));
        EXPECT_EQ(r.questions.size() + r.rejects.size(), support::count_question_markers(text));
        for (const auto& q : r.questions) EXPECT_NO_THROW(validate_question(q));
    }
}

TEST(RenderQuizText, OneQuestionIsSixLines) {
    Question q{"Stem", {"a", "b", "c", "d"}, 4};
    auto text = render_quiz_text({q});
    std::size_t lines = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    EXPECT_EQ(lines, 6u);
    EXPECT_NE(text.find("\n*Answer :** 4"), std::string::npos);
    EXPECT_EQ(text.rfind("*Question :** Stem", 0), 0u);
}

TEST(RenderQuizText, RejectsNonCanonical) {
    EXPECT_EQ(code_of([] { render_quiz_text({Question{"two\nlines", {"a", "b", "c", "d"}, 1}}); }),
              Errc::invalid_quiz);
    EXPECT_EQ(code_of([] { render_quiz_text({Question{"S", {"a", "", "c", "d"}, 1}}); }), Errc::invalid_quiz);
    EXPECT_EQ(code_of([] { render_quiz_text({Question{"S", {"a", "b", "c", "d"}, 5}}); }), Errc::invalid_quiz);
    EXPECT_EQ(code_of([] { render_quiz_text({Question{" padded", {"a", "b", "c", "d"}, 1}}); }), Errc::invalid_quiz);
}

TEST(RenderQuizText, RoundTripProperty) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i) {
        auto qs = support::random_quiz(rng);
        auto r = parse_quiz(render_quiz_text(qs));
        ASSERT_TRUE(r.rejects.empty());
        ASSERT_EQ(r.questions, qs);
    }
}

TEST(Grade, AllCorrect) {
    auto quiz = ten_question_quiz();
    auto s = submission_for(quiz);
    for (std::size_t i = 0; i < 10; ++i) s.answers[i] = quiz.questions[i].answer_index;
    auto g = grade(quiz, s);
    EXPECT_EQ(g.correct_count, 10u);
    EXPECT_DOUBLE_EQ(g.score, 1.0);
}

TEST(Grade, NothingAnswered) {
    auto quiz = ten_question_quiz();
    auto g = grade(quiz, submission_for(quiz));
    EXPECT_DOUBLE_EQ(g.score, 0.0);
    ASSERT_EQ(g.per_question.size(), 10u);
    for (const auto& f : g.per_question) EXPECT_FALSE(f.answered);
}

TEST(Grade, SevenOfTen) {
    auto quiz = ten_question_quiz();
    auto s = submission_for(quiz);
    for (std::size_t i = 0; i < 7; ++i) s.answers[i] = quiz.questions[i].answer_index;
    for (std::size_t i = 7; i < 10; ++i) s.answers[i] = quiz.questions[i].answer_index % 4 + 1;
    auto g = grade(quiz, s);
    EXPECT_EQ(g.correct_count, 7u);
    EXPECT_DOUBLE_EQ(g.score, 7.0 / 10.0);
    EXPECT_TRUE(g.per_question[9].answered);
    EXPECT_FALSE(g.per_question[9].correct);
}

TEST(Grade, Mismatches) {
    auto quiz = ten_question_quiz();
    auto wrong_quiz = submission_for(quiz);
    wrong_quiz.quiz_id = QuizId{8};
    EXPECT_EQ(code_of([&] { grade(quiz, wrong_quiz); }), Errc::quiz_mismatch);
    auto out_of_bounds = submission_for(quiz);
    out_of_bounds.answers[10] = 1;
    EXPECT_EQ(code_of([&] { grade(quiz, out_of_bounds); }), Errc::quiz_mismatch);
    auto bad_option = submission_for(quiz);
    bad_option.answers[0] = 5;
    EXPECT_EQ(code_of([&] { grade(quiz, bad_option); }), Errc::quiz_mismatch);
}

TEST(Grade, BoundsAndMonotonicity) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        Quiz quiz;
        quiz.quiz_id = QuizId{1};
        quiz.questions = support::random_quiz(rng);
        auto s = submission_for(quiz);
        for (std::size_t i = 0; i < quiz.questions.size(); ++i)
            if (rng() % 2) s.answers[i] = 1 + static_cast<int>(rng() % 4);
        auto before = grade(quiz, s);
        EXPECT_GE(before.score, 0.0);
        EXPECT_LE(before.score, 1.0);
        auto i = support::pick(rng, quiz.questions.size());
        s.answers[i] = quiz.questions[i].answer_index;
        EXPECT_GE(grade(quiz, s).score, before.score);
    }
}

TEST(GenerateQuiz, MockProviderGivesTenQuestions) {
    llm::Gateway g(std::make_shared<llm::MockProvider>());
    auto out = generate_quiz(g, "Noh is a classical Japanese musical drama performed since the 14th century.");
    EXPECT_EQ(out.questions.size(), 10u);
    EXPECT_EQ(out.attempts, 1);
    for (const auto& q : out.questions) EXPECT_NO_THROW(validate_question(q));
}

TEST(GenerateQuiz, FixtureAcceptedFirstTry) {
    auto provider = std::make_shared<ScriptedProvider>(std::vector{support::read_file(kFixture)});
    llm::Gateway g(provider);
    auto out = generate_quiz(g, "anything");
    EXPECT_EQ(out.questions.size(), 10u);
    EXPECT_EQ(out.rejects.size(), 2u);
    EXPECT_EQ(provider->calls, 1);
    EXPECT_EQ(provider->last_kind, llm::PromptKind::quiz);
}

TEST(GenerateQuiz, UnderfullAfterThreeAttempts) {
    std::string six;
    for (int i = 0; i < 6; ++i) six += block("S" + std::to_string(i), 4, "1");
    auto provider = std::make_shared<ScriptedProvider>(std::vector<std::string>{six});
    llm::Gateway g(provider);
    EXPECT_EQ(code_of([&] { generate_quiz(g, "anything"); }), Errc::quiz_underfull);
    EXPECT_EQ(provider->calls, 3);
}

TEST(GenerateQuiz, KeepsBestAttempt) {
    std::string six, eleven;
    for (int i = 0; i < 6; ++i) six += block("S" + std::to_string(i), 4, "1");
    for (int i = 0; i < 11; ++i) eleven += block("T" + std::to_string(i), 4, "2");
    auto provider = std::make_shared<ScriptedProvider>(std::vector<std::string>{six, eleven});
    llm::Gateway g(provider);
    auto out = generate_quiz(g, "anything");
    EXPECT_EQ(out.questions.size(), 11u);
    EXPECT_EQ(out.attempts, 2);
}
