#include "icls/gamification.hpp"

#include "icls/error.hpp"

#include <algorithm>

namespace icls::gamification {

using domain::ProgressState;

std::int64_t cumulative_xp(ProgressState state) noexcept {
    switch (state) {
    case ProgressState::not_started: return 0;
    case ProgressState::watched: return 5;
    case ProgressState::summary_tested: return 7;
    case ProgressState::practice_tested: return 12;
    }
    return 0;
}

std::string_view to_string(CoinReason r) noexcept {
    return r == CoinReason::daily_challenge ? "daily_challenge" : "quiz_correct";
}

std::optional<CoinReason> parse_coin_reason(std::string_view text) noexcept {
    if (text == "daily_challenge") return CoinReason::daily_challenge;
    if (text == "quiz_correct") return CoinReason::quiz_correct;
    return std::nullopt;
}

std::string_view to_string(BadgeKind k) noexcept { return k == BadgeKind::country ? "country" : "category"; }

std::optional<BadgeKind> parse_badge_kind(std::string_view text) noexcept {
    if (text == "country") return BadgeKind::country;
    if (text == "category") return BadgeKind::category;
    return std::nullopt;
}

std::int64_t LearnerRecord::xp_total() const noexcept {
    std::int64_t sum = 0;
    for (const auto& e : xp_ledger) sum += e.amount;
    return sum;
}

std::int64_t LearnerRecord::coin_total() const noexcept {
    std::int64_t sum = 0;
    for (const auto& e : coin_ledger) sum += e.amount;
    return sum;
}

std::map<UnitId, std::int64_t> LearnerRecord::unit_xp() const {
    std::map<UnitId, std::int64_t> out;
    for (const auto& e : xp_ledger) out[e.unit_id] += e.amount;
    return out;
}

Engine::Engine(Rules rules) : rules_(rules) {}

std::shared_ptr<Engine::State> Engine::state(LearnerId learner) const {
    std::shared_lock lock(registry_mutex_);
    auto it = learners_.find(learner);
    if (it == learners_.end())
        throw Error(Errc::unknown_learner, "no gamification state for learner " + std::to_string(learner.value));
    return it->second;
}

void Engine::register_learner(LearnerId learner, Timestamp registered_at, std::optional<std::string> org_id) {
    auto s = std::make_shared<State>();
    s->rec.learner_id = learner;
    s->rec.registered_at = registered_at;
    s->rec.org_id = std::move(org_id);
    s->rec.streak.learner_id = learner;
    s->xp_reached_at = registered_at;
    std::unique_lock lock(registry_mutex_);
    if (!learners_.emplace(learner, std::move(s)).second)
        throw Error(Errc::conflict, "learner " + std::to_string(learner.value) + " already has gamification state");
}

bool Engine::has_learner(LearnerId learner) const {
    std::shared_lock lock(registry_mutex_);
    return learners_.count(learner) != 0;
}

void Engine::restore(LearnerRecord record) {
    auto s = std::make_shared<State>();
    s->xp_total = record.xp_total();
    s->coin_total = record.coin_total();
    s->unit_xp = record.unit_xp();
    s->xp_reached_at = record.registered_at;
    for (const auto& e : record.xp_ledger) s->xp_reached_at = std::max(s->xp_reached_at, e.at);
    s->rec = std::move(record);
    std::unique_lock lock(registry_mutex_);
    learners_[s->rec.learner_id] = std::move(s);
}

void Engine::add_country(LearnerId learner, CountryId country) {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    s->rec.countries.insert(country);
}

void Engine::add_friendship(LearnerId a, LearnerId b) {
    if (a == b) throw Error(Errc::invalid_params, "a learner cannot befriend themselves");
    auto sa = state(a);
    auto sb = state(b);
    // lock in id order
    auto& first = a < b ? sa : sb;
    auto& second = a < b ? sb : sa;
    std::scoped_lock lock(first->mutex, second->mutex);
    sa->rec.friends.insert(b);
    sb->rec.friends.insert(a);
}

XpAward Engine::award_lesson_xp(LearnerId learner, UnitId unit, ProgressState reached, Timestamp at) {
    if (reached == ProgressState::not_started)
        throw Error(Errc::invalid_params, "XP is only awarded for watched, summary_tested or practice_tested");
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    auto& have = s->unit_xp[unit];
    const auto target = cumulative_xp(reached);
    if (have >= target)
        throw Error(Errc::duplicate_award, "unit " + std::to_string(unit.value) + " already paid " +
                                               std::to_string(have) + " XP");
    XpAward award;
    // one entry per rung crossed so the ledger always shows 5 / +2 / +5
    for (auto rung : {ProgressState::watched, ProgressState::summary_tested, ProgressState::practice_tested}) {
        const auto tier = cumulative_xp(rung);
        if (tier <= have || tier > target) continue;
        XpEntry e{learner, unit, static_cast<int>(tier), tier - have, at};
        have = tier;
        award.delta += e.amount;
        s->rec.xp_ledger.push_back(e);
        award.entries.push_back(e);
    }
    s->xp_total += award.delta;
    s->xp_reached_at = std::max(s->xp_reached_at, at);
    return award;
}

CoinAward Engine::award_quiz_coins(LearnerId learner, const worldwise::GradeReport& grade, Timestamp at) {
    auto s = state(learner);
    const auto amount = rules_.coins_per_correct * static_cast<std::int64_t>(grade.correct_count);
    if (amount <= 0) return {};
    CoinEntry e{learner, amount, CoinReason::quiz_correct, static_cast<std::int64_t>(grade.correct_count), at};
    std::lock_guard lock(s->mutex);
    s->rec.coin_ledger.push_back(e);
    s->coin_total += amount;
    return {amount, e};
}

Streak Engine::record_login(LearnerId learner, Timestamp at) {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    auto& streak = s->rec.streak;
    const auto today = utc_date(at);
    if (!streak.last_active_utc_date) {
        streak.current_length = 1;
        streak.last_active_utc_date = today;
    } else if (today == *streak.last_active_utc_date + std::chrono::days{1}) {
        ++streak.current_length;
        streak.last_active_utc_date = today;
    } else if (today > *streak.last_active_utc_date) {
        streak.current_length = 1;
        streak.last_active_utc_date = today;
    }
    return streak;
}

void Engine::mark_challenge_completed(LearnerId learner, Date date) {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    s->rec.challenges[date].completed = true;
}

ChallengeDay Engine::challenge(LearnerId learner, Date date) const {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    auto it = s->rec.challenges.find(date);
    return it == s->rec.challenges.end() ? ChallengeDay{} : it->second;
}

CoinAward Engine::claim_daily_challenge(LearnerId learner, Date date, Timestamp at) {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    auto it = s->rec.challenges.find(date);
    if (it != s->rec.challenges.end() && it->second.claimed)
        throw Error(Errc::already_claimed, "daily challenge for " + format_date(date) + " already claimed");
    if (it == s->rec.challenges.end() || !it->second.completed)
        throw Error(Errc::challenge_not_completed, "daily challenge for " + format_date(date) + " not completed");
    it->second.claimed = true;
    CoinEntry e{learner, rules_.daily_challenge_coins, CoinReason::daily_challenge, 0, at};
    s->rec.coin_ledger.push_back(e);
    s->coin_total += e.amount;
    return {e.amount, e};
}

std::vector<Badge> Engine::evaluate_badges(LearnerId learner, const std::vector<CountryProgress>& progress,
                                           Timestamp at) {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    auto held = [&](BadgeKind kind, std::int64_t subject) {
        return std::any_of(s->rec.badges.begin(), s->rec.badges.end(),
                           [&](const Badge& b) { return b.kind == kind && b.subject_id == subject; });
    };
    std::vector<Badge> awarded;
    auto award = [&](BadgeKind kind, std::int64_t subject) {
        Badge b{learner, kind, subject, at};
        s->rec.badges.push_back(b);
        awarded.push_back(b);
    };

    for (const auto& country : progress) {
        for (const auto& cat : country.categories) {
            if (held(BadgeKind::category, cat.category.value)) continue;
            bool complete = !cat.lessons.empty() && std::all_of(cat.lessons.begin(), cat.lessons.end(), [](const auto& units) {
                return !units.empty() && std::all_of(units.begin(), units.end(), [](ProgressState st) {
                    return st >= ProgressState::summary_tested;
                });
            });
            if (complete && cat.mean_quiz_score && *cat.mean_quiz_score >= rules_.mastery_threshold)
                award(BadgeKind::category, cat.category.value);
        }
        if (held(BadgeKind::country, country.country.value) || country.categories.empty()) continue;
        bool all = std::all_of(country.categories.begin(), country.categories.end(),
                               [&](const CategoryProgress& c) { return held(BadgeKind::category, c.category.value); });
        if (all) award(BadgeKind::country, country.country.value);
    }
    return awarded;
}

std::vector<LeaderboardEntry> Engine::leaderboard(const Scope& scope, std::size_t limit) const {
    struct Row {
        LearnerId learner;
        std::int64_t xp;
        Timestamp reached;
    };

    std::set<LearnerId> friends_of;
    if (const auto* f = std::get_if<FriendsScope>(&scope)) {
        if (!has_learner(f->learner))
            throw Error(Errc::unknown_scope_subject, "unknown learner " + std::to_string(f->learner.value));
        auto s = state(f->learner);
        std::lock_guard lock(s->mutex);
        friends_of = s->rec.friends;
        friends_of.insert(f->learner);
    }

    std::vector<Row> rows;
    {
        std::shared_lock lock(registry_mutex_);
        if (const auto* o = std::get_if<OrganizationScope>(&scope)) {
            bool any = std::any_of(learners_.begin(), learners_.end(), [&](const auto& kv) {
                std::lock_guard l(kv.second->mutex);
                return kv.second->rec.org_id == o->org_id;
            });
            if (!any) throw Error(Errc::unknown_scope_subject, "unknown organization '" + o->org_id + "'");
        }
        for (const auto& [id, s] : learners_) {
            std::lock_guard l(s->mutex);
            bool member = std::visit(
                [&](const auto& sc) -> bool {
                    using T = std::decay_t<decltype(sc)>;
                    if constexpr (std::is_same_v<T, GlobalScope>)
                        return true;
                    else if constexpr (std::is_same_v<T, CountryScope>)
                        return s->rec.countries.count(sc.country) != 0;
                    else if constexpr (std::is_same_v<T, FriendsScope>)
                        return friends_of.count(id) != 0;
                    else
                        return s->rec.org_id == sc.org_id;
                },
                scope);
            if (member) rows.push_back({id, s->xp_total, s->xp_reached_at});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.xp != b.xp) return a.xp > b.xp;
        if (a.reached != b.reached) return a.reached < b.reached;
        return a.learner < b.learner;
    });
    if (rows.size() > limit) rows.resize(limit);
    std::vector<LeaderboardEntry> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.push_back({rows[i].learner, rows[i].xp, static_cast<int>(i + 1)});
    return out;
}

LearnerRecord Engine::record(LearnerId learner) const {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    return s->rec;
}

std::vector<LearnerId> Engine::learners() const {
    std::shared_lock lock(registry_mutex_);
    std::vector<LearnerId> out;
    for (const auto& [id, _] : learners_) out.push_back(id);
    return out;
}

std::int64_t Engine::xp_total(LearnerId learner) const {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    return s->xp_total;
}

std::int64_t Engine::coin_total(LearnerId learner) const {
    auto s = state(learner);
    std::lock_guard lock(s->mutex);
    return s->coin_total;
}

} // namespace icls::gamification
