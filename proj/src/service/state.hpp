#pragma once

#include "icls/service.hpp"
#include "icls/sqlite.hpp"

#include <map>
#include <string>
#include <vector>

namespace icls::service {

struct UnitRecord {
    domain::ContentUnit unit;
    std::string instruction;
    std::vector<StageError> errors;
    Timestamp created_at;
};

struct SubmissionRecord {
    std::int64_t id{0};
    LearnerId learner;
    QuizId quiz;
    std::map<std::size_t, int> answers;
    std::size_t correct_count{0};
    std::size_t total{0};
    double score{0.0};
    Timestamp submitted_at;
};

struct PracticeRecord {
    std::int64_t id{0};
    std::size_t ordinal{0};
    bool correct{false};
    Timestamp answered_at;
};

struct StoredSession {
    LearnerId learner;
    Timestamp expires_at;
};

struct Service::State {
    std::map<CountryId, domain::Country> countries;
    std::map<CategoryId, domain::Category> categories;
    std::map<LessonId, domain::Lesson> lessons;
    std::map<UnitId, UnitRecord> units;
    std::map<UnitId, treasury::Summary> summaries;
    std::map<QuizId, worldwise::Quiz> quizzes;
    std::map<QuizId, std::vector<worldwise::Reject>> rejects;
    std::map<UnitId, QuizId> quiz_of_unit;

    std::map<LearnerId, domain::LearnerProfile> learners;
    std::map<std::string, LearnerId> by_email;
    std::map<std::pair<LearnerId, CountryId>, domain::Enrollment> enrollments;
    std::map<std::string, StoredSession> sessions;  ///< by token digest
    std::map<FriendRequestId, FriendRequest> friend_requests;
    std::map<StoryId, Story> stories;
    std::map<std::pair<LearnerId, QuizId>, std::vector<SubmissionRecord>> submissions;
    std::map<std::pair<LearnerId, UnitId>, std::vector<PracticeRecord>> practice;

    gamification::Engine engine;
    proficiency::Tracker tracker;
    std::shared_ptr<scribe::VectorStore> vectors = std::make_shared<scribe::VectorStore>();

    // hierarchy lookups
    CountryId country_of(CategoryId c) const { return categories.at(c).country_id; }
    CategoryId category_of(LessonId l) const { return lessons.at(l).category_id; }
    LessonId lesson_of(UnitId u) const { return units.at(u).unit.lesson_id; }
    CategoryId category_of_unit(UnitId u) const { return category_of(lesson_of(u)); }
    CountryId country_of_unit(UnitId u) const { return country_of(category_of_unit(u)); }
};

std::unique_ptr<Service::State> load_state(sql::Database& db);

nlohmann::json snapshot_state(const Service::State& state, sql::Database& db);

std::string encode_answers(const std::map<std::size_t, int>& answers);
std::map<std::size_t, int> decode_answers(std::string_view text);

std::string encode_errors(const std::vector<StageError>& errors);
std::vector<StageError> decode_errors(std::string_view text);

} // namespace icls::service
