#pragma once

#include "icls/domain.hpp"
#include "icls/ids.hpp"
#include "icls/time.hpp"
#include "icls/worldwise.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

namespace icls::gamification {

struct Rules {
    std::int64_t coins_per_correct{1};
    std::int64_t daily_challenge_coins{10};
    double mastery_threshold{0.8};
};

/// Cumulative per-unit XP at each ladder rung: 0 / 5 / 7 / 12.
std::int64_t cumulative_xp(domain::ProgressState state) noexcept;

struct XpEntry {
    LearnerId learner_id;
    UnitId unit_id;
    int tier{0};  ///< cumulative total this entry brings the unit to: 5, 7 or 12
    std::int64_t amount{0};
    Timestamp at;

    bool operator==(const XpEntry&) const = default;
};

enum class CoinReason { daily_challenge, quiz_correct };

std::string_view to_string(CoinReason r) noexcept;
std::optional<CoinReason> parse_coin_reason(std::string_view text) noexcept;

struct CoinEntry {
    LearnerId learner_id;
    std::int64_t amount{0};
    CoinReason reason{CoinReason::quiz_correct};
    std::int64_t correct_count{0};  ///< quiz_correct only
    Timestamp at;

    bool operator==(const CoinEntry&) const = default;
};

enum class BadgeKind { country, category };

std::string_view to_string(BadgeKind k) noexcept;
std::optional<BadgeKind> parse_badge_kind(std::string_view text) noexcept;

struct Badge {
    LearnerId learner_id;
    BadgeKind kind{BadgeKind::category};
    std::int64_t subject_id{0};  ///< CountryId or CategoryId value
    Timestamp awarded_at;

    bool operator==(const Badge&) const = default;
};

struct Streak {
    LearnerId learner_id;
    int current_length{0};
    std::optional<Date> last_active_utc_date;

    bool operator==(const Streak&) const = default;
};

struct ChallengeDay {
    bool completed{false};
    bool claimed{false};
    bool operator==(const ChallengeDay&) const = default;
};

struct LeaderboardEntry {
    LearnerId learner_id;
    std::int64_t total_xp{0};
    int rank{0};

    bool operator==(const LeaderboardEntry&) const = default;
};

struct GlobalScope {};
struct CountryScope {
    CountryId country;
};
struct FriendsScope {
    LearnerId learner;
};
struct OrganizationScope {
    std::string org_id;
};
using Scope = std::variant<GlobalScope, CountryScope, FriendsScope, OrganizationScope>;

/// Badge evaluation input: per category, the unit states of each lesson and
/// the learner's mean quiz score in that category (if any).
struct CategoryProgress {
    CategoryId category;
    std::vector<std::vector<domain::ProgressState>> lessons;
    std::optional<double> mean_quiz_score;
};

struct CountryProgress {
    CountryId country;
    std::vector<CategoryProgress> categories;
};

/// Everything the engine knows about one learner, as stored and restored.
struct LearnerRecord {
    LearnerId learner_id;
    Timestamp registered_at;
    std::optional<std::string> org_id;
    std::vector<XpEntry> xp_ledger;
    std::vector<CoinEntry> coin_ledger;
    std::vector<Badge> badges;
    Streak streak;
    std::map<Date, ChallengeDay> challenges;
    std::set<CountryId> countries;
    std::set<LearnerId> friends;

    std::int64_t xp_total() const noexcept;
    std::int64_t coin_total() const noexcept;
    /// Highest XP tier reached per unit.
    std::map<UnitId, std::int64_t> unit_xp() const;

    bool operator==(const LearnerRecord&) const = default;
};

struct XpAward {
    std::int64_t delta{0};
    std::vector<XpEntry> entries;
};

struct CoinAward {
    std::int64_t delta{0};
    std::optional<CoinEntry> entry;
};

/// XP, coins, badges, streaks, daily challenges and leaderboards. Mutations
/// for one learner are serialized on that learner's lock; different learners
/// proceed in parallel. Totals are cached and always equal the ledger sums.
class Engine {
public:
    explicit Engine(Rules rules = {});

    const Rules& rules() const noexcept { return rules_; }

    /// Throws conflict when the learner already has state.
    void register_learner(LearnerId learner, Timestamp registered_at, std::optional<std::string> org_id = {});
    bool has_learner(LearnerId learner) const;

    /// Installs a persisted record verbatim.
    void restore(LearnerRecord record);

    void add_country(LearnerId learner, CountryId country);
    /// Symmetric.
    void add_friendship(LearnerId a, LearnerId b);

    /// Brings the unit's cumulative XP up to the tier for `reached`. Throws
    /// duplicate_award when that tier was already paid, invalid_params for
    /// not_started.
    XpAward award_lesson_xp(LearnerId learner, UnitId unit, domain::ProgressState reached, Timestamp at);

    /// coins_per_correct per correct answer; no entry when nothing is earned.
    CoinAward award_quiz_coins(LearnerId learner, const worldwise::GradeReport& grade, Timestamp at);

    Streak record_login(LearnerId learner, Timestamp at);

    void mark_challenge_completed(LearnerId learner, Date date);
    ChallengeDay challenge(LearnerId learner, Date date) const;

    /// Throws already_claimed or challenge_not_completed.
    CoinAward claim_daily_challenge(LearnerId learner, Date date, Timestamp at);

    /// Newly awarded badges only; previously held badges are never revoked or
    /// re-awarded.
    std::vector<Badge> evaluate_badges(LearnerId learner, const std::vector<CountryProgress>& progress, Timestamp at);

    /// Sorted by XP descending, then by when that total was reached (earlier
    /// first), then learner id. Ranks are 1..n. Throws unknown_scope_subject.
    std::vector<LeaderboardEntry> leaderboard(const Scope& scope, std::size_t limit) const;

    LearnerRecord record(LearnerId learner) const;
    std::vector<LearnerId> learners() const;

    std::int64_t xp_total(LearnerId learner) const;
    std::int64_t coin_total(LearnerId learner) const;

private:
    struct State {
        mutable std::mutex mutex;
        LearnerRecord rec;
        std::int64_t xp_total{0};
        std::int64_t coin_total{0};
        Timestamp xp_reached_at;
        std::map<UnitId, std::int64_t> unit_xp;
    };

    std::shared_ptr<State> state(LearnerId learner) const;

    Rules rules_;
    mutable std::shared_mutex registry_mutex_;
    std::map<LearnerId, std::shared_ptr<State>> learners_;
};

} // namespace icls::gamification
