#pragma once

#include "icls/auth.hpp"
#include "icls/domain.hpp"
#include "icls/gamification.hpp"
#include "icls/ids.hpp"
#include "icls/llm.hpp"
#include "icls/proficiency.hpp"
#include "icls/scribe.hpp"
#include "icls/time.hpp"
#include "icls/treasury.hpp"
#include "icls/worldwise.hpp"

#include <json.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

namespace icls::sql {
class Database;
}

namespace icls::service {

struct Config {
    /// SQLite file path; "sqlite://" / "sqlite:///" prefixes are accepted.
    std::string database_path{"icls.db"};
    std::optional<std::string> admin_token;
    std::chrono::hours session_ttl{24};
    std::chrono::seconds upload_timeout{120};
    auth::HashStrength password_strength{auth::HashStrength::interactive};
    llm::GatewayConfig gateway;
};

/// DATABASE_URL, ADMIN_BOOTSTRAP_TOKEN, UPLOAD_TIMEOUT_SECONDS and the LLM_*
/// gateway settings.
Config config_from_env();

/// Strips a sqlite:// scheme from a database URL.
std::string database_path_from_url(std::string_view url);

// --- principals -------------------------------------------------------------

struct Principal {
    bool admin{false};
    std::optional<LearnerId> learner;
};

struct Session {
    std::string token;
    LearnerId learner_id;
    Timestamp expires_at;
};

// --- views ------------------------------------------------------------------

struct CategoryView {
    domain::Category category;
    std::size_t lesson_count{0};
    std::size_t finished_lessons{0};
};

struct UnitView {
    UnitId unit_id;
    domain::UnitKind kind{domain::UnitKind::document};
    std::string source_name;
    std::optional<QuizId> quiz_id;
    domain::ProgressState state{domain::ProgressState::not_started};
};

struct LessonView {
    LessonId lesson_id;
    CategoryId category_id;
    std::string title;
    std::vector<UnitView> units;
    bool finished{false};
};

struct StageError {
    std::string stage;  ///< ingestion, treasury, worldwise, scribe
    std::string code;
    std::string message;

    bool operator==(const StageError&) const = default;
};

struct UploadRequest {
    std::string country;
    std::string category;
    std::string lesson_title;
    domain::UnitKind kind{domain::UnitKind::document};
    std::string source_name;
    std::string content;
    /// "text/plain" (default), "application/x-pdf-text" for adapter output, or
    /// "text/transcript" for timestamped transcript lines.
    std::string content_type{"text/plain"};
    std::string instruction;
};

struct UnitReport {
    domain::ContentUnit unit;
    CountryId country_id;
    CategoryId category_id;
    std::optional<treasury::Summary> summary;
    std::optional<worldwise::Quiz> quiz;
    std::size_t quiz_rejects{0};
    std::size_t chunk_count{0};
    std::vector<StageError> errors;
};

struct WatchResult {
    domain::ProgressState state{domain::ProgressState::not_started};
    std::int64_t xp_delta{0};
    std::vector<gamification::Badge> new_badges;
};

struct SubmitResult {
    worldwise::GradeReport grade;
    std::int64_t xp_delta{0};
    std::int64_t coin_delta{0};
    domain::ProgressState state{domain::ProgressState::not_started};
    std::vector<gamification::Badge> new_badges;
    bool first_submission{false};
    bool daily_challenge_completed{false};
};

struct PracticeQuestion {
    UnitId unit_id;
    QuizId quiz_id;
    std::size_t ordinal{0};
    worldwise::Question question;  ///< answer withheld at the API boundary
    std::string context;           ///< best-matching chunk for the stem
    bool from_previous_mistake{false};
};

struct PracticeResult {
    bool correct{false};
    domain::ProgressState state{domain::ProgressState::not_started};
    std::int64_t xp_delta{0};
    std::vector<gamification::Badge> new_badges;
};

struct CountryProficiency {
    CountryId country_id;
    proficiency::ProficiencyScore score;
    proficiency::EngagementStats stats;
};

struct ProfileView {
    domain::LearnerProfile profile;
    std::int64_t xp{0};
    std::int64_t coins{0};
    gamification::Streak streak;
    std::vector<gamification::Badge> badges;
    std::vector<domain::Enrollment> enrollments;
    std::vector<CountryProficiency> proficiency;
    std::vector<LearnerId> friends;
};

struct DailyChallengeView {
    Date date;
    QuizId quiz_id;
    UnitId unit_id;
    worldwise::Quiz quiz;
    bool completed{false};
    bool claimed{false};
};

enum class FriendState { pending, accepted, declined };
std::string_view to_string(FriendState s) noexcept;
std::optional<FriendState> parse_friend_state(std::string_view s) noexcept;

struct FriendRequest {
    FriendRequestId request_id;
    LearnerId from;
    LearnerId to;
    FriendState state{FriendState::pending};
    Timestamp created_at;

    bool operator==(const FriendRequest&) const = default;
};

struct Story {
    StoryId story_id;
    CountryId country_id;
    std::string title;
    std::string url;

    bool operator==(const Story&) const = default;
};

struct LedgerMismatch {
    LearnerId learner_id;
    std::int64_t cached_xp{0};
    std::int64_t ledger_xp{0};
    std::int64_t cached_coins{0};
    std::int64_t ledger_coins{0};
};

// --- service ----------------------------------------------------------------

/// The sole mutation path. Holds the module engines in memory and writes
/// every mutation through to SQLite inside one transaction; a failed commit
/// reloads memory from the database so the two never diverge.
class Service {
public:
    Service(Config config, std::shared_ptr<llm::CompletionProvider> provider);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    const Config& config() const noexcept { return config_; }
    llm::Gateway& gateway() noexcept { return *gateway_; }

    // auth
    domain::LearnerProfile register_learner(const domain::ProfileFields& fields, Timestamp now);
    Session login(std::string_view email, std::string_view password, Timestamp now);
    void logout(std::string_view token);
    /// Resolves a bearer credential. Throws unauthenticated.
    Principal authenticate(std::string_view bearer, Timestamp now) const;

    // catalog
    domain::Country create_country(std::string_view name);
    /// Fails with integrity_violation while learners reference the country.
    void delete_country(CountryId country);
    std::vector<domain::Country> countries() const;
    std::vector<CategoryView> categories(CountryId country, std::optional<LearnerId> learner) const;
    std::vector<LessonView> lessons(CategoryId category, std::optional<LearnerId> learner) const;
    LessonView lesson(LessonId lesson, std::optional<LearnerId> learner) const;
    std::vector<worldwise::Quiz> lesson_quizzes(LessonId lesson) const;

    // learning flow
    domain::Enrollment enroll(LearnerId learner, CountryId country, Timestamp now);
    WatchResult watch(LearnerId learner, UnitId unit, Timestamp now);
    proficiency::EngagementStats record_time(LearnerId learner, UnitId unit, std::int64_t seconds, Timestamp now);
    treasury::Summary summary(LearnerId learner, UnitId unit) const;
    worldwise::Quiz unit_quiz(LearnerId learner, UnitId unit) const;
    SubmitResult submit(LearnerId learner, QuizId quiz, const std::map<std::size_t, int>& answers, Timestamp now);
    PracticeQuestion practice_question(LearnerId learner, UnitId unit) const;
    PracticeResult answer_practice(LearnerId learner, UnitId unit, std::size_t ordinal, int choice, Timestamp now);
    scribe::ChatAnswer chat(LearnerId learner, UnitId unit, std::string_view question);

    // social and gamification
    std::vector<gamification::LeaderboardEntry> leaderboard(LearnerId viewer, const gamification::Scope& scope,
                                                             std::size_t limit) const;
    ProfileView profile(LearnerId learner) const;
    std::vector<LessonId> recommendations(LearnerId learner) const;
    FriendRequest send_friend_request(LearnerId from, LearnerId to, Timestamp now);
    FriendRequest respond_friend_request(LearnerId learner, FriendRequestId request, bool accept);
    std::vector<FriendRequest> friend_requests(LearnerId learner) const;
    std::optional<LearnerId> learner_by_email(std::string_view email) const;
    DailyChallengeView daily_challenge(LearnerId learner, Timestamp now) const;
    gamification::CoinAward claim_daily_challenge(LearnerId learner, Timestamp now);

    // stories
    Story add_story(CountryId country, std::string_view title, std::string_view url);
    std::vector<Story> stories(std::optional<CountryId> country) const;

    // admin
    UnitReport admin_upload(const UploadRequest& request, Timestamp now);
    UnitReport admin_unit(UnitId unit) const;

    /// Compares cached learner totals with ledger sums in the database.
    std::vector<LedgerMismatch> verify_ledgers() const;

    /// Every persisted fact in a canonical JSON form (embeddings as hex of
    /// their raw bytes). Two services over the same data produce equal
    /// snapshots.
    nlohmann::json snapshot() const;

    /// Opaque in-memory mirror of the database.
    struct State;

private:
    template <class F>
    auto mutate(F&& op);
    void reload();

    Config config_;
    std::unique_ptr<llm::Gateway> gateway_;
    std::unique_ptr<sql::Database> db_;
    mutable std::shared_mutex mutex_;
    std::unique_ptr<State> state_;
};

} // namespace icls::service
