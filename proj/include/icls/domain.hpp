#pragma once

#include "icls/ids.hpp"
#include "icls/time.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icls::domain {

/// Fixed category catalog; every Category name is one of these.
inline constexpr std::array<std::string_view, 11> kCategoryCatalog{
    "Art",     "Music",    "Cinema",  "Literature", "Festivals", "Fashion",
    "Cuisine", "Beverage", "Customs", "Dance",      "Travel"};

bool is_catalog_category(std::string_view name) noexcept;

struct LearnerProfile {
    LearnerId learner_id;
    std::string name;
    std::string email;
    std::string password_digest;
    CountryId immersion_country;
    std::string learning_motivation;
    int self_rated_knowledge{1};
    int daily_goal_minutes{1};
    bool notifications_opt_in{false};
    std::optional<std::string> org_id;
    Timestamp created_at;

    bool operator==(const LearnerProfile&) const = default;
};

/// Registration input. The password is plain text here and never stored.
struct ProfileFields {
    std::string name;
    std::string email;
    std::string password;
    CountryId immersion_country;
    std::string learning_motivation;
    int self_rated_knowledge{0};
    int daily_goal_minutes{0};
    bool notifications_opt_in{false};
    std::optional<std::string> org_id;
};

/// Trims and lowercases an email address.
std::string normalize_email(std::string_view email);

/// Throws Error(invalid_field) naming the offending field.
void validate_profile_fields(const ProfileFields& fields);

struct Country {
    CountryId country_id;
    std::string name;
    std::vector<CategoryId> categories;

    bool operator==(const Country&) const = default;
};

struct Category {
    CategoryId category_id;
    CountryId country_id;
    std::string name;
    std::vector<LessonId> lessons;

    bool operator==(const Category&) const = default;
};

struct Lesson {
    LessonId lesson_id;
    CategoryId category_id;
    std::string title;
    std::vector<UnitId> content_units;

    bool operator==(const Lesson&) const = default;
};

enum class UnitKind { document, video_transcript };

std::string_view to_string(UnitKind kind) noexcept;
std::optional<UnitKind> parse_unit_kind(std::string_view text) noexcept;

enum class UnitStatus { draft, published };

std::string_view to_string(UnitStatus status) noexcept;
std::optional<UnitStatus> parse_unit_status(std::string_view text) noexcept;

struct ContentUnit {
    UnitId unit_id;
    LessonId lesson_id;
    UnitKind kind{UnitKind::document};
    std::string source_name;
    std::string raw_text;
    std::optional<SummaryId> summary_id;
    std::optional<QuizId> quiz_id;
    bool indexed{false};
    UnitStatus status{UnitStatus::draft};

    bool operator==(const ContentUnit&) const = default;
};

/// Completion ladder for one unit. States only advance one rung at a time.
enum class ProgressState { not_started = 0, watched = 1, summary_tested = 2, practice_tested = 3 };

std::string_view to_string(ProgressState state) noexcept;
std::optional<ProgressState> parse_progress_state(std::string_view text) noexcept;

/// Throws skipped_rung or regression_attempt unless `next` is exactly one
/// rung above `current`.
void check_advance(ProgressState current, ProgressState next);

struct Enrollment {
    LearnerId learner_id;
    CountryId country_id;
    Timestamp enrolled_at;
    std::map<UnitId, ProgressState> unit_progress;

    /// Units absent from the map (published after enrollment) are not_started.
    ProgressState state_of(UnitId unit) const;

    bool operator==(const Enrollment&) const = default;
};

} // namespace icls::domain
