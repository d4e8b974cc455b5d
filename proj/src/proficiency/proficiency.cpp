#include "icls/proficiency.hpp"

#include "icls/error.hpp"

#include <algorithm>
#include <cmath>

namespace icls::proficiency {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

void validate_event(const EngagementEvent& event) {
    std::visit(overloaded{
                   [](const TimeSpent& t) {
                       if (t.seconds <= 0) throw Error(Errc::invalid_event, "time_spent seconds must be positive");
                   },
                   [](const QuizAttempt&) {},
                   [](const QuizResult& r) {
                       if (!std::isfinite(r.score) || r.score < 0.0 || r.score > 1.0)
                           throw Error(Errc::invalid_event, "quiz_result score must be in [0,1]");
                   },
               },
               event.kind);
}

double EngagementStats::mean_quiz_score() const noexcept {
    return result_count == 0 ? 0.0 : score_sum / static_cast<double>(result_count);
}

EngagementStats apply_event(EngagementStats stats, const EngagementEvent& event) {
    validate_event(event);
    std::visit(overloaded{
                   [&](const TimeSpent& t) { stats.total_seconds += t.seconds; },
                   [&](const QuizAttempt&) { ++stats.attempt_count; },
                   [&](const QuizResult& r) {
                       ++stats.result_count;
                       stats.score_sum += r.score;
                   },
               },
               event.kind);
    return stats;
}

EngagementStats fold_events(LearnerId learner, CountryId country, const std::vector<EngagementEvent>& log) {
    EngagementStats stats{learner, country};
    for (const auto& e : log)
        if (e.learner_id == learner && e.country_id == country) stats = apply_event(stats, e);
    return stats;
}

ProficiencyScore compute_proficiency(const EngagementStats& stats, const ProficiencyConfig& config) {
    ProficiencyScore p;
    p.learner_id = stats.learner_id;
    p.country_id = stats.country_id;
    p.time_norm = std::min(static_cast<double>(stats.total_seconds) / config.time_cap_seconds, 1.0);
    p.attempt_norm = std::min(static_cast<double>(stats.attempt_count) / config.attempt_cap, 1.0);
    p.score_term = std::clamp(stats.mean_quiz_score(), 0.0, 1.0);
    p.value = config.time_weight * p.time_norm + config.attempt_weight * p.attempt_norm +
              config.score_weight * p.score_term;
    return p;
}

EngagementStats Tracker::record_event(const EngagementEvent& event) {
    validate_event(event);
    std::unique_lock lock(mutex_);
    log_.push_back(event);
    auto key = std::make_pair(event.learner_id, event.country_id);
    auto it = stats_.find(key);
    if (it == stats_.end()) it = stats_.emplace(key, EngagementStats{event.learner_id, event.country_id}).first;
    it->second = apply_event(it->second, event);
    if (event.category_id) {
        if (const auto* r = std::get_if<QuizResult>(&event.kind)) {
            auto& cat = categories_[{event.learner_id, *event.category_id}];
            ++cat.results;
            cat.score_sum += r->score;
        }
    }
    return it->second;
}

EngagementStats Tracker::stats(LearnerId learner, CountryId country) const {
    std::shared_lock lock(mutex_);
    auto it = stats_.find({learner, country});
    return it == stats_.end() ? EngagementStats{learner, country} : it->second;
}

std::optional<CategoryScore> Tracker::category_score(LearnerId learner, CategoryId category) const {
    std::shared_lock lock(mutex_);
    auto it = categories_.find({learner, category});
    if (it == categories_.end()) return std::nullopt;
    return it->second;
}

std::map<CategoryId, CategoryScore> Tracker::category_scores(LearnerId learner) const {
    std::shared_lock lock(mutex_);
    std::map<CategoryId, CategoryScore> out;
    for (auto it = categories_.lower_bound({learner, CategoryId{}}); it != categories_.end() && it->first.first == learner;
         ++it)
        out.emplace(it->first.second, it->second);
    return out;
}

std::vector<CountryId> Tracker::countries(LearnerId learner) const {
    std::shared_lock lock(mutex_);
    std::vector<CountryId> out;
    for (auto it = stats_.lower_bound({learner, CountryId{}}); it != stats_.end() && it->first.first == learner; ++it)
        out.push_back(it->first.second);
    return out;
}

std::vector<EngagementEvent> Tracker::events() const {
    std::shared_lock lock(mutex_);
    return log_;
}

std::vector<LessonId> recommend(const RecommendationInput& input, const RecommendationConfig& config) {
    struct Ranked {
        double mean;
        bool friend_finished;
        LessonId lesson;
    };
    std::vector<Ranked> ranked;
    for (const auto& l : input.lessons) {
        if (input.finished.count(l.lesson_id)) continue;
        auto it = input.category_means.find(l.category_id);
        ranked.push_back({it == input.category_means.end() ? config.untested_mean : it->second,
                          input.finished_by_friends.count(l.lesson_id) != 0, l.lesson_id});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.mean != b.mean) return a.mean < b.mean;
        if (a.friend_finished != b.friend_finished) return a.friend_finished;
        return a.lesson < b.lesson;
    });
    std::vector<LessonId> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) out.push_back(r.lesson);
    return out;
}

} // namespace icls::proficiency
