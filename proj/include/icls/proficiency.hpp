#pragma once

#include "icls/domain.hpp"
#include "icls/ids.hpp"
#include "icls/time.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <variant>
#include <vector>

namespace icls::proficiency {

struct TimeSpent {
    std::int64_t seconds{0};
    bool operator==(const TimeSpent&) const = default;
};
struct QuizAttempt {
    bool operator==(const QuizAttempt&) const = default;
};
struct QuizResult {
    double score{0.0};
    bool operator==(const QuizResult&) const = default;
};

using EventKind = std::variant<TimeSpent, QuizAttempt, QuizResult>;

struct EngagementEvent {
    LearnerId learner_id;
    CountryId country_id;
    /// Set when the event concerns one category's content; feeds the
    /// per-category quiz means used by recommendations and badges.
    std::optional<CategoryId> category_id;
    EventKind kind;
    Timestamp at;

    bool operator==(const EngagementEvent&) const = default;
};

/// Throws invalid_event unless seconds > 0 and score is a finite value in [0,1].
void validate_event(const EngagementEvent& event);

struct EngagementStats {
    LearnerId learner_id;
    CountryId country_id;
    std::int64_t total_seconds{0};
    std::int64_t attempt_count{0};
    std::int64_t result_count{0};
    double score_sum{0.0};

    /// 0 when no results have been recorded.
    double mean_quiz_score() const noexcept;

    bool operator==(const EngagementStats&) const = default;
};

/// Folds one event into stats. Pure; throws invalid_event like validate_event.
EngagementStats apply_event(EngagementStats stats, const EngagementEvent& event);

/// Batch fold over an event log, filtered to (learner, country).
EngagementStats fold_events(LearnerId learner, CountryId country, const std::vector<EngagementEvent>& log);

struct ProficiencyConfig {
    double time_weight{0.2};
    double attempt_weight{0.2};
    double score_weight{0.6};
    double time_cap_seconds{36000.0};
    double attempt_cap{50.0};
};

struct ProficiencyScore {
    LearnerId learner_id;
    CountryId country_id;
    double value{0.0};
    double time_norm{0.0};
    double attempt_norm{0.0};
    double score_term{0.0};
};

ProficiencyScore compute_proficiency(const EngagementStats& stats, const ProficiencyConfig& config = {});

/// Running quiz-score mean for one category.
struct CategoryScore {
    std::int64_t results{0};
    double score_sum{0.0};
    double mean() const noexcept { return results == 0 ? 0.0 : score_sum / static_cast<double>(results); }
};

/// Thread-safe event log with incrementally maintained aggregates. Recording
/// is serialized per (learner, country); reads may run concurrently.
class Tracker {
public:
    /// Validates, appends and folds the event; returns the updated stats.
    EngagementStats record_event(const EngagementEvent& event);

    EngagementStats stats(LearnerId learner, CountryId country) const;
    std::optional<CategoryScore> category_score(LearnerId learner, CategoryId category) const;
    std::map<CategoryId, CategoryScore> category_scores(LearnerId learner) const;
    std::vector<CountryId> countries(LearnerId learner) const;
    std::vector<EngagementEvent> events() const;

private:
    mutable std::shared_mutex mutex_;
    std::vector<EngagementEvent> log_;
    std::map<std::pair<LearnerId, CountryId>, EngagementStats> stats_;
    std::map<std::pair<LearnerId, CategoryId>, CategoryScore> categories_;
};

// --- recommendations --------------------------------------------------------

struct CatalogLesson {
    LessonId lesson_id;
    CategoryId category_id;
};

struct RecommendationInput {
    /// Candidate lessons in catalog order.
    std::vector<CatalogLesson> lessons;
    /// Lessons the learner has finished; excluded from the output.
    std::set<LessonId> finished;
    /// Lessons finished by at least one friend.
    std::set<LessonId> finished_by_friends;
    /// Learner's mean quiz score per category; absent when untested.
    std::map<CategoryId, double> category_means;
};

struct RecommendationConfig {
    /// Mean assumed for categories without quiz results.
    double untested_mean{0.5};
};

/// Unfinished lessons ordered by the learner's category mean ascending
/// (weakest first), then friend-finished before the rest, then lesson id.
std::vector<LessonId> recommend(const RecommendationInput& input, const RecommendationConfig& config = {});

} // namespace icls::proficiency
