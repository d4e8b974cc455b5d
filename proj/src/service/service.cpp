#include "icls/service.hpp"

#include "icls/error.hpp"
#include "icls/ingestion.hpp"
#include "schema.hpp"
#include "state.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <mutex>

namespace icls::service {

using domain::ProgressState;

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

std::string_view event_kind(const proficiency::EventKind& k) {
    if (std::holds_alternative<proficiency::TimeSpent>(k)) return "time_spent";
    if (std::holds_alternative<proficiency::QuizAttempt>(k)) return "quiz_attempt";
    return "quiz_result";
}

} // namespace

std::string database_path_from_url(std::string_view url) {
    for (std::string_view prefix : {"sqlite:///", "sqlite://", "sqlite:"})
        if (url.substr(0, prefix.size()) == prefix) {
            auto rest = url.substr(prefix.size());
            // sqlite:///abs/path keeps its leading slash
            if (prefix == "sqlite:///" && !rest.empty() && rest.front() != '/') return "/" + std::string(rest);
            return std::string(rest);
        }
    return std::string(url);
}

Config config_from_env() {
    Config c;
    if (auto v = env("DATABASE_URL")) c.database_path = database_path_from_url(v);
    if (auto v = env("ADMIN_BOOTSTRAP_TOKEN")) c.admin_token = v;
    if (auto v = env("UPLOAD_TIMEOUT_SECONDS")) c.upload_timeout = std::chrono::seconds(std::stoll(v));
    if (auto v = env("PASSWORD_HASH_STRENGTH"); v && std::string_view(v) == "minimal")
        c.password_strength = auth::HashStrength::minimal;
    c.gateway = llm::gateway_config_from_env();
    return c;
}

std::string_view to_string(FriendState s) noexcept {
    switch (s) {
    case FriendState::pending: return "pending";
    case FriendState::accepted: return "accepted";
    case FriendState::declined: return "declined";
    }
    return "pending";
}

std::optional<FriendState> parse_friend_state(std::string_view s) noexcept {
    for (auto v : {FriendState::pending, FriendState::accepted, FriendState::declined})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

// --- plumbing ---------------------------------------------------------------

namespace {

/// Per-mutation scratch: the open transaction plus a flag telling the
/// wrapper whether in-memory state was touched before a failure.
struct Tx {
    sql::Database& db;
    bool dirty{false};
    void touch() { dirty = true; }
};

/// Read-side helpers over State that enforce visibility rules.
const UnitRecord& published_unit(const Service::State& s, UnitId unit) {
    auto it = s.units.find(unit);
    if (it == s.units.end() || it->second.unit.status != domain::UnitStatus::published)
        throw Error(Errc::unknown_unit, "unit " + std::to_string(unit.value) + " not found");
    return it->second;
}

const domain::Enrollment& enrollment_for(const Service::State& s, LearnerId learner, CountryId country) {
    auto it = s.enrollments.find({learner, country});
    if (it == s.enrollments.end())
        throw Error(Errc::forbidden, "learner is not enrolled in country " + std::to_string(country.value));
    return it->second;
}

const domain::LearnerProfile& learner_of(const Service::State& s, LearnerId learner) {
    auto it = s.learners.find(learner);
    if (it == s.learners.end()) throw Error(Errc::unknown_learner, "learner " + std::to_string(learner.value));
    return it->second;
}

std::vector<UnitId> visible_units(const Service::State& s, const domain::Lesson& lesson) {
    std::vector<UnitId> out;
    for (auto u : lesson.content_units)
        if (s.units.at(u).unit.status == domain::UnitStatus::published) out.push_back(u);
    return out;
}

ProgressState state_in(const Service::State& s, LearnerId learner, UnitId unit) {
    auto it = s.enrollments.find({learner, s.country_of_unit(unit)});
    return it == s.enrollments.end() ? ProgressState::not_started : it->second.state_of(unit);
}

bool lesson_finished(const Service::State& s, LearnerId learner, const domain::Lesson& lesson) {
    auto units = visible_units(s, lesson);
    return !units.empty() && std::all_of(units.begin(), units.end(), [&](UnitId u) {
        return state_in(s, learner, u) == ProgressState::practice_tested;
    });
}

LessonView lesson_view(const Service::State& s, const domain::Lesson& lesson, std::optional<LearnerId> learner) {
    LessonView v{lesson.lesson_id, lesson.category_id, lesson.title, {}, false};
    for (auto u : visible_units(s, lesson)) {
        const auto& rec = s.units.at(u);
        UnitView uv{u, rec.unit.kind, rec.unit.source_name, rec.unit.quiz_id, ProgressState::not_started};
        if (learner) uv.state = state_in(s, *learner, u);
        v.units.push_back(uv);
    }
    v.finished = learner && lesson_finished(s, *learner, lesson);
    return v;
}

std::optional<QuizId> challenge_quiz(const Service::State& s, Date date) {
    std::vector<QuizId> pool;
    for (const auto& [id, quiz] : s.quizzes)
        if (s.units.at(quiz.unit_id).unit.status == domain::UnitStatus::published) pool.push_back(id);
    if (pool.empty()) return std::nullopt;
    auto day = date.time_since_epoch().count();
    auto n = static_cast<long long>(pool.size());
    return pool[static_cast<std::size_t>(((day % n) + n) % n)];
}

void write_totals(Tx& tx, const Service::State& s, LearnerId learner) {
    tx.db.prepare("UPDATE learner_totals SET xp_total = ?2, coin_total = ?3 WHERE learner_id = ?1")
        .bind(1, learner.value)
        .bind(2, s.engine.xp_total(learner))
        .bind(3, s.engine.coin_total(learner))
        .run();
}

void write_coin(Tx& tx, const gamification::CoinEntry& e) {
    tx.db.prepare("INSERT INTO coin_ledger(learner_id, amount, reason, correct_count, at) VALUES (?1,?2,?3,?4,?5)")
        .bind(1, e.learner_id.value)
        .bind(2, e.amount)
        .bind(3, gamification::to_string(e.reason))
        .bind(4, e.correct_count)
        .bind(5, to_millis(e.at))
        .run();
}

void write_event(Tx& tx, Service::State& s, const proficiency::EngagementEvent& e) {
    proficiency::validate_event(e);
    auto st = tx.db.prepare("INSERT INTO engagement_events(learner_id, country_id, category_id, kind, seconds, score, "
                            "at) VALUES (?1,?2,?3,?4,?5,?6,?7)");
    st.bind(1, e.learner_id.value).bind(2, e.country_id.value);
    if (e.category_id) st.bind(3, e.category_id->value); else st.bind_null(3);
    st.bind(4, event_kind(e.kind));
    if (auto* t = std::get_if<proficiency::TimeSpent>(&e.kind)) st.bind(5, t->seconds); else st.bind_null(5);
    if (auto* r = std::get_if<proficiency::QuizResult>(&e.kind)) st.bind(6, r->score); else st.bind_null(6);
    st.bind(7, to_millis(e.at)).run();
    tx.touch();
    s.tracker.record_event(e);
}

void write_challenge(Tx& tx, const Service::State& s, LearnerId learner, Date date) {
    auto day = s.engine.challenge(learner, date);
    tx.db.prepare("INSERT INTO daily_challenges(learner_id, day, completed, claimed) VALUES (?1,?2,?3,?4) "
                  "ON CONFLICT(learner_id, day) DO UPDATE SET completed = excluded.completed, claimed = excluded.claimed")
        .bind(1, learner.value)
        .bind(2, format_date(date))
        .bind(3, day.completed)
        .bind(4, day.claimed)
        .run();
}

/// Moves one unit one rung up the ladder, pays the XP tier and persists both.
std::int64_t advance(Tx& tx, Service::State& s, LearnerId learner, UnitId unit, ProgressState next, Timestamp now) {
    auto& e = s.enrollments.at({learner, s.country_of_unit(unit)});
    domain::check_advance(e.state_of(unit), next);
    tx.db.prepare("INSERT INTO unit_progress(learner_id, unit_id, state, updated_at) VALUES (?1,?2,?3,?4) "
                  "ON CONFLICT(learner_id, unit_id) DO UPDATE SET state = excluded.state, updated_at = excluded.updated_at")
        .bind(1, learner.value)
        .bind(2, unit.value)
        .bind(3, static_cast<int>(next))
        .bind(4, to_millis(now))
        .run();
    tx.touch();
    e.unit_progress[unit] = next;
    auto award = s.engine.award_lesson_xp(learner, unit, next, now);
    for (const auto& x : award.entries)
        tx.db.prepare("INSERT INTO xp_ledger(learner_id, unit_id, tier, amount, at) VALUES (?1,?2,?3,?4,?5)")
            .bind(1, x.learner_id.value)
            .bind(2, x.unit_id.value)
            .bind(3, x.tier)
            .bind(4, x.amount)
            .bind(5, to_millis(x.at))
            .run();
    return award.delta;
}

std::vector<gamification::CountryProgress> badge_input(const Service::State& s, LearnerId learner) {
    std::vector<gamification::CountryProgress> out;
    for (const auto& [key, enrollment] : s.enrollments) {
        if (key.first != learner) continue;
        gamification::CountryProgress cp{key.second, {}};
        for (auto cid : s.countries.at(key.second).categories) {
            gamification::CategoryProgress cat{cid, {}, std::nullopt};
            for (auto lid : s.categories.at(cid).lessons) {
                auto units = visible_units(s, s.lessons.at(lid));
                if (units.empty()) continue;
                std::vector<ProgressState> states;
                for (auto u : units) states.push_back(enrollment.state_of(u));
                cat.lessons.push_back(std::move(states));
            }
            if (auto score = s.tracker.category_score(learner, cid)) cat.mean_quiz_score = score->mean();
            cp.categories.push_back(std::move(cat));
        }
        out.push_back(std::move(cp));
    }
    return out;
}

std::vector<gamification::Badge> evaluate_badges(Tx& tx, Service::State& s, LearnerId learner, Timestamp now) {
    auto seq = static_cast<std::int64_t>(s.engine.record(learner).badges.size());
    tx.touch();
    auto fresh = s.engine.evaluate_badges(learner, badge_input(s, learner), now);
    for (const auto& b : fresh)
        tx.db.prepare("INSERT INTO badges(learner_id, kind, subject_id, awarded_at, seq) VALUES (?1,?2,?3,?4,?5)")
            .bind(1, learner.value)
            .bind(2, gamification::to_string(b.kind))
            .bind(3, b.subject_id)
            .bind(4, to_millis(b.awarded_at))
            .bind(5, seq++)
            .run();
    return fresh;
}

domain::Country insert_country(Tx& tx, Service::State& s, const std::string& name) {
    tx.db.prepare("INSERT INTO countries(name) VALUES (?1)").bind(1, name).run();
    domain::Country c{CountryId{tx.db.last_insert_id()}, name, {}};
    std::vector<domain::Category> cats;
    for (auto cat_name : domain::kCategoryCatalog) {
        tx.db.prepare("INSERT INTO categories(country_id, name) VALUES (?1, ?2)").bind(1, c.country_id.value).bind(2, cat_name).run();
        cats.push_back({CategoryId{tx.db.last_insert_id()}, c.country_id, std::string(cat_name), {}});
        c.categories.push_back(cats.back().category_id);
    }
    tx.touch();
    for (auto& cat : cats) s.categories[cat.category_id] = std::move(cat);
    s.countries[c.country_id] = c;
    return c;
}

const domain::Country* country_by_name(const Service::State& s, std::string_view name) {
    for (const auto& [id, c] : s.countries)
        if (c.name == name) return &c;
    return nullptr;
}

} // namespace

template <class F>
auto Service::mutate(F&& op) {
    std::unique_lock lock(mutex_);
    Tx tx{*db_};
    try {
        sql::Transaction transaction(*db_);
        if constexpr (std::is_void_v<std::invoke_result_t<F, Tx&, State&>>) {
            op(tx, *state_);
            transaction.commit();
        } else {
            auto result = op(tx, *state_);
            transaction.commit();
            return result;
        }
    } catch (...) {
        if (tx.dirty) {
            spdlog::warn("mutation failed after touching memory; reloading state from the database");
            state_ = load_state(*db_);
        }
        throw;
    }
}

void Service::reload() {
    std::unique_lock lock(mutex_);
    state_ = load_state(*db_);
}

Service::Service(Config config, std::shared_ptr<llm::CompletionProvider> provider)
    : config_(std::move(config)),
      gateway_(std::make_unique<llm::Gateway>(std::move(provider), config_.gateway)),
      db_(std::make_unique<sql::Database>(config_.database_path)) {
    apply_schema(*db_);
    state_ = load_state(*db_);
    auto mismatches = verify_ledgers();
    if (!mismatches.empty()) {
        for (const auto& m : mismatches)
            spdlog::error("ledger mismatch for learner {}: xp cached {} vs ledger {}, coins cached {} vs ledger {}",
                          m.learner_id.value, m.cached_xp, m.ledger_xp, m.cached_coins, m.ledger_coins);
        throw Error(Errc::integrity_violation, "cached totals disagree with ledger sums");
    }
    spdlog::info("loaded {} learners, {} units, {} quizzes from {}", state_->learners.size(), state_->units.size(),
                 state_->quizzes.size(), config_.database_path);
}

Service::~Service() = default;

// --- auth -------------------------------------------------------------------

domain::LearnerProfile Service::register_learner(const domain::ProfileFields& fields, Timestamp now) {
    domain::validate_profile_fields(fields);
    auto email = domain::normalize_email(fields.email);
    {
        std::shared_lock lock(mutex_);
        if (state_->by_email.count(email)) throw Error(Errc::duplicate_email, "email already registered");
        if (!state_->countries.count(fields.immersion_country))
            throw Error(Errc::unknown_country, "country " + std::to_string(fields.immersion_country.value));
    }
    auto digest = auth::hash_password(fields.password, config_.password_strength);

    return mutate([&](Tx& tx, State& s) {
        if (s.by_email.count(email)) throw Error(Errc::duplicate_email, "email already registered");
        if (!s.countries.count(fields.immersion_country))
            throw Error(Errc::unknown_country, "country " + std::to_string(fields.immersion_country.value));
        domain::LearnerProfile p;
        p.name = trim(fields.name);
        p.email = email;
        p.password_digest = digest;
        p.immersion_country = fields.immersion_country;
        p.learning_motivation = fields.learning_motivation;
        p.self_rated_knowledge = fields.self_rated_knowledge;
        p.daily_goal_minutes = fields.daily_goal_minutes;
        p.notifications_opt_in = fields.notifications_opt_in;
        p.org_id = fields.org_id;
        p.created_at = now;
        tx.db.prepare("INSERT INTO learners(name, email, password_digest, immersion_country, learning_motivation, "
                      "self_rated_knowledge, daily_goal_minutes, notifications_opt_in, org_id, created_at) "
                      "VALUES (?1,?2,?3,?4,?5,?6,?7,?8,?9,?10)")
            .bind(1, p.name)
            .bind(2, p.email)
            .bind(3, p.password_digest)
            .bind(4, p.immersion_country.value)
            .bind(5, p.learning_motivation)
            .bind(6, p.self_rated_knowledge)
            .bind(7, p.daily_goal_minutes)
            .bind(8, p.notifications_opt_in)
            .bind(9, p.org_id)
            .bind(10, to_millis(now))
            .run();
        p.learner_id = LearnerId{tx.db.last_insert_id()};
        tx.db.prepare("INSERT INTO learner_totals(learner_id, xp_total, coin_total) VALUES (?1, 0, 0)")
            .bind(1, p.learner_id.value)
            .run();
        tx.db.prepare("INSERT INTO streaks(learner_id, current_length, last_active_date) VALUES (?1, 0, NULL)")
            .bind(1, p.learner_id.value)
            .run();
        tx.db.prepare("INSERT INTO enrollments(learner_id, country_id, enrolled_at) VALUES (?1, ?2, ?3)")
            .bind(1, p.learner_id.value)
            .bind(2, p.immersion_country.value)
            .bind(3, to_millis(now))
            .run();
        tx.touch();
        s.engine.register_learner(p.learner_id, now, p.org_id);
        s.engine.add_country(p.learner_id, p.immersion_country);
        s.enrollments[{p.learner_id, p.immersion_country}] =
            domain::Enrollment{p.learner_id, p.immersion_country, now, {}};
        s.by_email[p.email] = p.learner_id;
        s.learners[p.learner_id] = p;
        return p;
    });
}

Session Service::login(std::string_view email, std::string_view password, Timestamp now) {
    LearnerId id;
    std::string digest;
    {
        std::shared_lock lock(mutex_);
        auto it = state_->by_email.find(domain::normalize_email(email));
        if (it == state_->by_email.end()) throw Error(Errc::unauthenticated, "invalid email or password");
        id = it->second;
        digest = state_->learners.at(id).password_digest;
    }
    if (!auth::verify_password(digest, password)) throw Error(Errc::unauthenticated, "invalid email or password");

    auto token = auth::new_token();
    auto token_hash = auth::token_digest(token);
    auto expires = now + std::chrono::duration_cast<std::chrono::milliseconds>(config_.session_ttl);
    mutate([&](Tx& tx, State& s) {
        tx.db.prepare("DELETE FROM sessions WHERE learner_id = ?1 AND expires_at <= ?2")
            .bind(1, id.value)
            .bind(2, to_millis(now))
            .run();
        tx.db.prepare("INSERT INTO sessions(token_digest, learner_id, expires_at) VALUES (?1, ?2, ?3)")
            .bind(1, token_hash)
            .bind(2, id.value)
            .bind(3, to_millis(expires))
            .run();
        tx.touch();
        std::erase_if(s.sessions, [&](const auto& kv) { return kv.second.learner == id && kv.second.expires_at <= now; });
        s.sessions[token_hash] = {id, expires};
        auto streak = s.engine.record_login(id, now);
        tx.db.prepare("UPDATE streaks SET current_length = ?2, last_active_date = ?3 WHERE learner_id = ?1")
            .bind(1, id.value)
            .bind(2, streak.current_length)
            .bind(3, streak.last_active_utc_date ? std::optional(format_date(*streak.last_active_utc_date))
                                                 : std::nullopt)
            .run();
    });
    return {token, id, expires};
}

void Service::logout(std::string_view token) {
    auto token_hash = auth::token_digest(token);
    mutate([&](Tx& tx, State& s) {
        tx.db.prepare("DELETE FROM sessions WHERE token_digest = ?1").bind(1, token_hash).run();
        tx.touch();
        s.sessions.erase(token_hash);
    });
}

Principal Service::authenticate(std::string_view bearer, Timestamp now) const {
    if (bearer.empty()) throw Error(Errc::unauthenticated, "missing bearer token");
    if (config_.admin_token && auth::equal_secret(bearer, *config_.admin_token)) return {true, std::nullopt};
    std::shared_lock lock(mutex_);
    auto it = state_->sessions.find(auth::token_digest(bearer));
    if (it == state_->sessions.end() || it->second.expires_at <= now)
        throw Error(Errc::unauthenticated, "invalid or expired session");
    return {false, it->second.learner};
}

// --- catalog ----------------------------------------------------------------

domain::Country Service::create_country(std::string_view name) {
    auto n = trim(name);
    if (n.empty()) throw Error(Errc::invalid_field, "name must not be empty");
    return mutate([&](Tx& tx, State& s) {
        if (country_by_name(s, n)) throw Error(Errc::conflict, "country '" + n + "' already exists");
        return insert_country(tx, s, n);
    });
}

void Service::delete_country(CountryId country) {
    std::unique_lock lock(mutex_);
    if (!state_->countries.count(country))
        throw Error(Errc::unknown_country, "country " + std::to_string(country.value));
    {
        sql::Transaction tx(*db_);
        db_->prepare("DELETE FROM countries WHERE id = ?1").bind(1, country.value).run();
        tx.commit();
    }
    state_ = load_state(*db_);
}

std::vector<domain::Country> Service::countries() const {
    std::shared_lock lock(mutex_);
    std::vector<domain::Country> out;
    for (const auto& [id, c] : state_->countries) out.push_back(c);
    return out;
}

std::vector<CategoryView> Service::categories(CountryId country, std::optional<LearnerId> learner) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    auto it = s.countries.find(country);
    if (it == s.countries.end()) throw Error(Errc::unknown_country, "country " + std::to_string(country.value));
    std::vector<CategoryView> out;
    for (auto cid : it->second.categories) {
        const auto& cat = s.categories.at(cid);
        CategoryView v{cat, 0, 0};
        v.category.lessons.clear();
        for (auto lid : cat.lessons) {
            const auto& lesson = s.lessons.at(lid);
            if (visible_units(s, lesson).empty()) continue;
            v.category.lessons.push_back(lid);
            ++v.lesson_count;
            if (learner && lesson_finished(s, *learner, lesson)) ++v.finished_lessons;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<LessonView> Service::lessons(CategoryId category, std::optional<LearnerId> learner) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    auto it = s.categories.find(category);
    if (it == s.categories.end()) throw Error(Errc::unknown_category, "category " + std::to_string(category.value));
    std::vector<LessonView> out;
    for (auto lid : it->second.lessons) {
        auto v = lesson_view(s, s.lessons.at(lid), learner);
        if (!v.units.empty()) out.push_back(std::move(v));
    }
    return out;
}

LessonView Service::lesson(LessonId lesson, std::optional<LearnerId> learner) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    auto it = s.lessons.find(lesson);
    if (it == s.lessons.end() || visible_units(s, it->second).empty())
        throw Error(Errc::unknown_lesson, "lesson " + std::to_string(lesson.value));
    return lesson_view(s, it->second, learner);
}

std::vector<worldwise::Quiz> Service::lesson_quizzes(LessonId lesson) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    auto it = s.lessons.find(lesson);
    if (it == s.lessons.end()) throw Error(Errc::unknown_lesson, "lesson " + std::to_string(lesson.value));
    std::vector<worldwise::Quiz> out;
    for (auto u : visible_units(s, it->second))
        if (auto q = s.quiz_of_unit.find(u); q != s.quiz_of_unit.end()) out.push_back(s.quizzes.at(q->second));
    if (out.empty()) throw Error(Errc::unknown_lesson, "lesson " + std::to_string(lesson.value) + " has no quiz");
    return out;
}

// --- learning flow ----------------------------------------------------------

domain::Enrollment Service::enroll(LearnerId learner, CountryId country, Timestamp now) {
    {
        std::shared_lock lock(mutex_);
        learner_of(*state_, learner);
        if (!state_->countries.count(country))
            throw Error(Errc::unknown_country, "country " + std::to_string(country.value));
        if (auto it = state_->enrollments.find({learner, country}); it != state_->enrollments.end()) return it->second;
    }
    return mutate([&](Tx& tx, State& s) {
        if (auto it = s.enrollments.find({learner, country}); it != s.enrollments.end()) return it->second;
        if (!s.countries.count(country)) throw Error(Errc::unknown_country, "country " + std::to_string(country.value));
        tx.db.prepare("INSERT INTO enrollments(learner_id, country_id, enrolled_at) VALUES (?1, ?2, ?3)")
            .bind(1, learner.value)
            .bind(2, country.value)
            .bind(3, to_millis(now))
            .run();
        tx.touch();
        s.engine.add_country(learner, country);
        auto& e = s.enrollments[{learner, country}];
        e = domain::Enrollment{learner, country, now, {}};
        return e;
    });
}

WatchResult Service::watch(LearnerId learner, UnitId unit, Timestamp now) {
    return mutate([&](Tx& tx, State& s) {
        published_unit(s, unit);
        enrollment_for(s, learner, s.country_of_unit(unit));
        WatchResult r;
        r.xp_delta = advance(tx, s, learner, unit, ProgressState::watched, now);
        r.state = ProgressState::watched;
        r.new_badges = evaluate_badges(tx, s, learner, now);
        write_totals(tx, s, learner);
        return r;
    });
}

proficiency::EngagementStats Service::record_time(LearnerId learner, UnitId unit, std::int64_t seconds,
                                                  Timestamp now) {
    return mutate([&](Tx& tx, State& s) {
        published_unit(s, unit);
        auto country = s.country_of_unit(unit);
        enrollment_for(s, learner, country);
        proficiency::EngagementEvent e{learner, country, s.category_of_unit(unit), proficiency::TimeSpent{seconds}, now};
        write_event(tx, s, e);
        return s.tracker.stats(learner, country);
    });
}

treasury::Summary Service::summary(LearnerId learner, UnitId unit) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    published_unit(s, unit);
    enrollment_for(s, learner, s.country_of_unit(unit));
    return s.summaries.at(unit);
}

worldwise::Quiz Service::unit_quiz(LearnerId learner, UnitId unit) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    published_unit(s, unit);
    enrollment_for(s, learner, s.country_of_unit(unit));
    return s.quizzes.at(s.quiz_of_unit.at(unit));
}

SubmitResult Service::submit(LearnerId learner, QuizId quiz_id, const std::map<std::size_t, int>& answers,
                             Timestamp now) {
    return mutate([&](Tx& tx, State& s) {
        auto qit = s.quizzes.find(quiz_id);
        if (qit == s.quizzes.end()) throw Error(Errc::not_found, "quiz " + std::to_string(quiz_id.value));
        const auto& quiz = qit->second;
        published_unit(s, quiz.unit_id);
        const auto country = s.country_of_unit(quiz.unit_id);
        const auto category = s.category_of_unit(quiz.unit_id);
        const auto& enrollment = enrollment_for(s, learner, country);
        const auto current = enrollment.state_of(quiz.unit_id);
        if (current == ProgressState::not_started)
            throw Error(Errc::skipped_rung, "watch the unit before taking its quiz");

        worldwise::Submission sub{learner, quiz_id, answers, now};
        SubmitResult r;
        r.grade = worldwise::grade(quiz, sub);
        r.first_submission = s.submissions[{learner, quiz_id}].empty();

        SubmissionRecord rec{0, learner, quiz_id, answers, r.grade.correct_count, r.grade.total, r.grade.score, now};
        tx.db.prepare("INSERT INTO quiz_submissions(learner_id, quiz_id, answers, correct_count, total, score, "
                      "submitted_at) VALUES (?1,?2,?3,?4,?5,?6,?7)")
            .bind(1, learner.value)
            .bind(2, quiz_id.value)
            .bind(3, encode_answers(answers))
            .bind(4, static_cast<std::int64_t>(rec.correct_count))
            .bind(5, static_cast<std::int64_t>(rec.total))
            .bind(6, rec.score)
            .bind(7, to_millis(now))
            .run();
        rec.id = tx.db.last_insert_id();
        tx.touch();
        s.submissions[{learner, quiz_id}].push_back(rec);

        write_event(tx, s, {learner, country, category, proficiency::QuizAttempt{}, now});
        write_event(tx, s, {learner, country, category, proficiency::QuizResult{r.grade.score}, now});

        if (r.first_submission) {
            auto coins = s.engine.award_quiz_coins(learner, r.grade, now);
            if (coins.entry) write_coin(tx, *coins.entry);
            r.coin_delta = coins.delta;
        }
        if (current == ProgressState::watched)
            r.xp_delta = advance(tx, s, learner, quiz.unit_id, ProgressState::summary_tested, now);
        r.state = s.enrollments.at({learner, country}).state_of(quiz.unit_id);

        const auto today = utc_date(now);
        if (challenge_quiz(s, today) == quiz_id && !s.engine.challenge(learner, today).completed) {
            s.engine.mark_challenge_completed(learner, today);
            write_challenge(tx, s, learner, today);
            r.daily_challenge_completed = true;
        }
        r.new_badges = evaluate_badges(tx, s, learner, now);
        write_totals(tx, s, learner);
        return r;
    });
}

PracticeQuestion Service::practice_question(LearnerId learner, UnitId unit) const {
    std::shared_ptr<scribe::VectorStore> vectors;
    PracticeQuestion pq;
    {
        std::shared_lock lock(mutex_);
        const auto& s = *state_;
        published_unit(s, unit);
        const auto& enrollment = enrollment_for(s, learner, s.country_of_unit(unit));
        if (enrollment.state_of(unit) < ProgressState::summary_tested)
            throw Error(Errc::skipped_rung, "take the unit quiz before practising");
        const auto quiz_id = s.quiz_of_unit.at(unit);
        const auto& quiz = s.quizzes.at(quiz_id);
        std::vector<PracticeRecord> history;
        if (auto it = s.practice.find({learner, unit}); it != s.practice.end()) history = it->second;

        std::optional<std::size_t> pick;
        if (auto it = s.submissions.find({learner, quiz_id}); it != s.submissions.end() && !it->second.empty()) {
            const auto& last = it->second.back();
            for (std::size_t i = 0; i < quiz.questions.size() && !pick; ++i) {
                auto a = last.answers.find(i);
                bool wrong = a == last.answers.end() || a->second != quiz.questions[i].answer_index;
                bool fixed = std::any_of(history.begin(), history.end(), [&](const PracticeRecord& p) {
                    return p.ordinal == i && p.correct && p.answered_at >= last.submitted_at;
                });
                if (wrong && !fixed) pick = i;
            }
        }
        pq.from_previous_mistake = pick.has_value();
        pq.ordinal = pick.value_or(history.size() % quiz.questions.size());
        pq.unit_id = unit;
        pq.quiz_id = quiz_id;
        pq.question = quiz.questions[pq.ordinal];
        vectors = s.vectors;
    }
    if (vectors->is_indexed(unit)) {
        auto records = vectors->records(unit);
        auto top = scribe::retrieve_from(vectors->embedder(), *records, pq.question.stem, 1);
        if (!top.empty()) pq.context = (*records)[top.front().ordinal].text;
    }
    return pq;
}

PracticeResult Service::answer_practice(LearnerId learner, UnitId unit, std::size_t ordinal, int choice,
                                        Timestamp now) {
    return mutate([&](Tx& tx, State& s) {
        published_unit(s, unit);
        const auto& enrollment = enrollment_for(s, learner, s.country_of_unit(unit));
        const auto current = enrollment.state_of(unit);
        if (current < ProgressState::summary_tested)
            throw Error(Errc::skipped_rung, "take the unit quiz before practising");
        const auto& quiz = s.quizzes.at(s.quiz_of_unit.at(unit));
        if (ordinal >= quiz.questions.size()) throw Error(Errc::quiz_mismatch, "no question " + std::to_string(ordinal));
        if (choice < 1 || choice > 4) throw Error(Errc::quiz_mismatch, "option must be between 1 and 4");

        PracticeResult r;
        r.correct = quiz.questions[ordinal].answer_index == choice;
        tx.db.prepare("INSERT INTO practice_answers(learner_id, unit_id, ordinal, correct, answered_at) VALUES "
                      "(?1,?2,?3,?4,?5)")
            .bind(1, learner.value)
            .bind(2, unit.value)
            .bind(3, static_cast<std::int64_t>(ordinal))
            .bind(4, r.correct)
            .bind(5, to_millis(now))
            .run();
        auto id = tx.db.last_insert_id();
        tx.touch();
        s.practice[{learner, unit}].push_back({id, ordinal, r.correct, now});
        if (current == ProgressState::summary_tested)
            r.xp_delta = advance(tx, s, learner, unit, ProgressState::practice_tested, now);
        r.state = s.enrollments.at({learner, s.country_of_unit(unit)}).state_of(unit);
        r.new_badges = evaluate_badges(tx, s, learner, now);
        write_totals(tx, s, learner);
        return r;
    });
}

scribe::ChatAnswer Service::chat(LearnerId learner, UnitId unit, std::string_view question) {
    std::shared_ptr<scribe::VectorStore> vectors;
    {
        std::shared_lock lock(mutex_);
        published_unit(*state_, unit);
        enrollment_for(*state_, learner, state_->country_of_unit(unit));
        vectors = state_->vectors;
    }
    return scribe::chat(*vectors, *gateway_, unit, question);
}

// --- social and gamification ------------------------------------------------

std::vector<gamification::LeaderboardEntry> Service::leaderboard(LearnerId viewer, const gamification::Scope& scope,
                                                                 std::size_t limit) const {
    if (limit == 0 || limit > 1000) throw Error(Errc::invalid_params, "limit must be between 1 and 1000");
    std::shared_lock lock(mutex_);
    learner_of(*state_, viewer);
    if (auto* c = std::get_if<gamification::CountryScope>(&scope); c && !state_->countries.count(c->country))
        throw Error(Errc::unknown_scope_subject, "country " + std::to_string(c->country.value));
    return state_->engine.leaderboard(scope, limit);
}

ProfileView Service::profile(LearnerId learner) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    ProfileView v;
    v.profile = learner_of(s, learner);
    auto rec = s.engine.record(learner);
    v.xp = s.engine.xp_total(learner);
    v.coins = s.engine.coin_total(learner);
    v.streak = rec.streak;
    v.badges = rec.badges;
    v.friends.assign(rec.friends.begin(), rec.friends.end());
    for (const auto& [key, e] : s.enrollments) {
        if (key.first != learner) continue;
        v.enrollments.push_back(e);
        auto stats = s.tracker.stats(learner, key.second);
        v.proficiency.push_back({key.second, proficiency::compute_proficiency(stats), stats});
    }
    return v;
}

std::vector<LessonId> Service::recommendations(LearnerId learner) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    learner_of(s, learner);
    auto rec = s.engine.record(learner);
    proficiency::RecommendationInput in;
    for (const auto& [key, e] : s.enrollments) {
        if (key.first != learner) continue;
        for (auto cid : s.countries.at(key.second).categories)
            for (auto lid : s.categories.at(cid).lessons) {
                const auto& lesson = s.lessons.at(lid);
                if (visible_units(s, lesson).empty()) continue;
                in.lessons.push_back({lid, cid});
                if (lesson_finished(s, learner, lesson)) in.finished.insert(lid);
                for (auto f : rec.friends)
                    if (lesson_finished(s, f, lesson)) in.finished_by_friends.insert(lid);
            }
    }
    for (const auto& [cid, score] : s.tracker.category_scores(learner)) in.category_means[cid] = score.mean();
    return proficiency::recommend(in);
}

FriendRequest Service::send_friend_request(LearnerId from, LearnerId to, Timestamp now) {
    if (from == to) throw Error(Errc::invalid_params, "cannot send a friend request to yourself");
    return mutate([&](Tx& tx, State& s) {
        learner_of(s, from);
        learner_of(s, to);
        for (const auto& [id, r] : s.friend_requests) {
            bool same_pair = (r.from == from && r.to == to) || (r.from == to && r.to == from);
            if (same_pair && r.state != FriendState::declined)
                throw Error(Errc::conflict, r.state == FriendState::accepted ? "already friends"
                                                                             : "a request between these learners is pending");
        }
        tx.db.prepare("INSERT INTO friend_requests(from_learner, to_learner, state, created_at) VALUES (?1,?2,?3,?4)")
            .bind(1, from.value)
            .bind(2, to.value)
            .bind(3, to_string(FriendState::pending))
            .bind(4, to_millis(now))
            .run();
        FriendRequest r{FriendRequestId{tx.db.last_insert_id()}, from, to, FriendState::pending, now};
        tx.touch();
        s.friend_requests[r.request_id] = r;
        return r;
    });
}

FriendRequest Service::respond_friend_request(LearnerId learner, FriendRequestId request, bool accept) {
    return mutate([&](Tx& tx, State& s) {
        auto it = s.friend_requests.find(request);
        if (it == s.friend_requests.end())
            throw Error(Errc::not_found, "friend request " + std::to_string(request.value));
        auto& r = it->second;
        if (r.to != learner) throw Error(Errc::forbidden, "only the recipient can respond to a friend request");
        if (r.state != FriendState::pending) throw Error(Errc::conflict, "friend request already answered");
        auto next = accept ? FriendState::accepted : FriendState::declined;
        tx.db.prepare("UPDATE friend_requests SET state = ?2 WHERE id = ?1")
            .bind(1, request.value)
            .bind(2, to_string(next))
            .run();
        tx.touch();
        r.state = next;
        if (accept) s.engine.add_friendship(r.from, r.to);
        return r;
    });
}

std::vector<FriendRequest> Service::friend_requests(LearnerId learner) const {
    std::shared_lock lock(mutex_);
    std::vector<FriendRequest> out;
    for (const auto& [id, r] : state_->friend_requests)
        if (r.from == learner || r.to == learner) out.push_back(r);
    return out;
}

std::optional<LearnerId> Service::learner_by_email(std::string_view email) const {
    std::shared_lock lock(mutex_);
    auto it = state_->by_email.find(domain::normalize_email(email));
    if (it == state_->by_email.end()) return std::nullopt;
    return it->second;
}

DailyChallengeView Service::daily_challenge(LearnerId learner, Timestamp now) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    learner_of(s, learner);
    auto date = utc_date(now);
    auto quiz = challenge_quiz(s, date);
    if (!quiz) throw Error(Errc::not_found, "no quiz is available for a daily challenge");
    auto day = s.engine.challenge(learner, date);
    const auto& q = s.quizzes.at(*quiz);
    return {date, *quiz, q.unit_id, q, day.completed, day.claimed};
}

gamification::CoinAward Service::claim_daily_challenge(LearnerId learner, Timestamp now) {
    return mutate([&](Tx& tx, State& s) {
        learner_of(s, learner);
        auto date = utc_date(now);
        auto day = s.engine.challenge(learner, date);
        if (day.claimed) throw Error(Errc::already_claimed, "daily challenge already claimed");
        if (!day.completed) throw Error(Errc::challenge_not_completed, "complete today's challenge quiz first");
        tx.touch();
        auto award = s.engine.claim_daily_challenge(learner, date, now);
        write_coin(tx, *award.entry);
        write_challenge(tx, s, learner, date);
        write_totals(tx, s, learner);
        return award;
    });
}

// --- stories ----------------------------------------------------------------

Story Service::add_story(CountryId country, std::string_view title, std::string_view url) {
    auto t = trim(title);
    auto u = trim(url);
    if (t.empty()) throw Error(Errc::invalid_field, "title must not be empty");
    if (u.rfind("http://", 0) != 0 && u.rfind("https://", 0) != 0)
        throw Error(Errc::invalid_field, "url must be http(s)");
    return mutate([&](Tx& tx, State& s) {
        if (!s.countries.count(country)) throw Error(Errc::unknown_country, "country " + std::to_string(country.value));
        tx.db.prepare("INSERT INTO stories(country_id, title, url) VALUES (?1, ?2, ?3)")
            .bind(1, country.value)
            .bind(2, t)
            .bind(3, u)
            .run();
        Story st{StoryId{tx.db.last_insert_id()}, country, t, u};
        tx.touch();
        s.stories[st.story_id] = st;
        return st;
    });
}

std::vector<Story> Service::stories(std::optional<CountryId> country) const {
    std::shared_lock lock(mutex_);
    std::vector<Story> out;
    for (const auto& [id, st] : state_->stories)
        if (!country || st.country_id == *country) out.push_back(st);
    return out;
}

// --- admin ------------------------------------------------------------------

namespace {

ingestion::Source source_for(const UploadRequest& req) {
    if (req.content_type == "application/x-pdf-text") return ingestion::PdfTextAdapterOutput{req.content};
    if (req.content_type == "text/transcript" || req.kind == domain::UnitKind::video_transcript) {
        ingestion::TranscriptLines t;
        std::size_t pos = 0;
        while (pos <= req.content.size()) {
            auto nl = req.content.find('\n', pos);
            if (nl == std::string::npos) nl = req.content.size();
            t.lines.push_back(req.content.substr(pos, nl - pos));
            pos = nl + 1;
        }
        return t;
    }
    if (req.content_type.empty() || req.content_type.rfind("text/", 0) == 0 ||
        req.content_type == "application/octet-stream")
        return ingestion::PlainText{req.content};
    throw Error(Errc::invalid_field, "unsupported content type '" + req.content_type + "'");
}

StageError stage_error(std::string stage, const std::exception& e) {
    if (auto* err = dynamic_cast<const Error*>(&e)) return {std::move(stage), std::string(to_string(err->code())), e.what()};
    return {std::move(stage), "internal", e.what()};
}

} // namespace

UnitReport Service::admin_upload(const UploadRequest& req, Timestamp now) {
    const auto deadline = std::chrono::steady_clock::now() + config_.upload_timeout;
    auto country_name = trim(req.country);
    auto lesson_title = trim(req.lesson_title);
    if (country_name.empty()) throw Error(Errc::invalid_field, "country must not be empty");
    if (!domain::is_catalog_category(req.category))
        throw Error(Errc::invalid_field, "category must be one of the 11 catalog categories");
    if (lesson_title.empty()) throw Error(Errc::invalid_field, "lesson_title must not be empty");

    ingestion::DocumentText doc;
    try {
        doc = ingestion::extract_text(source_for(req), UnitId{});
    } catch (const Error& e) {
        throw Error(e.code(), std::string("ingestion stage: ") + e.what());
    }

    // 1. hierarchy and a draft unit
    auto unit_id = mutate([&](Tx& tx, State& s) {
        const domain::Country* country = country_by_name(s, country_name);
        domain::Country created;
        if (!country) {
            created = insert_country(tx, s, country_name);
            country = &created;
        }
        CategoryId category;
        for (auto cid : country->categories)
            if (s.categories.at(cid).name == req.category) category = cid;
        LessonId lesson;
        for (auto lid : s.categories.at(category).lessons)
            if (s.lessons.at(lid).title == lesson_title) lesson = lid;
        if (!lesson.valid()) {
            tx.db.prepare("INSERT INTO lessons(category_id, title) VALUES (?1, ?2)")
                .bind(1, category.value)
                .bind(2, lesson_title)
                .run();
            lesson = LessonId{tx.db.last_insert_id()};
            tx.touch();
            s.lessons[lesson] = {lesson, category, lesson_title, {}};
            s.categories.at(category).lessons.push_back(lesson);
        }
        tx.db.prepare("INSERT INTO units(lesson_id, kind, source_name, raw_text, instruction, status, indexed, errors, "
                      "created_at) VALUES (?1,?2,?3,?4,?5,'draft',0,'[]',?6)")
            .bind(1, lesson.value)
            .bind(2, domain::to_string(req.kind))
            .bind(3, req.source_name)
            .bind(4, doc.text)
            .bind(5, req.instruction)
            .bind(6, to_millis(now))
            .run();
        UnitRecord rec;
        rec.unit.unit_id = UnitId{tx.db.last_insert_id()};
        rec.unit.lesson_id = lesson;
        rec.unit.kind = req.kind;
        rec.unit.source_name = req.source_name;
        rec.unit.raw_text = doc.text;
        rec.instruction = req.instruction;
        rec.created_at = now;
        tx.touch();
        s.lessons.at(lesson).content_units.push_back(rec.unit.unit_id);
        auto id = rec.unit.unit_id;
        s.units[id] = std::move(rec);
        return id;
    });
    doc.unit_id = unit_id;

    // 2. generation stages, off-lock
    std::vector<StageError> errors;
    auto timed_out = [&](const char* stage) {
        if (std::chrono::steady_clock::now() < deadline) return false;
        errors.push_back({stage, "timeout", "upload exceeded its time budget"});
        return true;
    };

    std::optional<treasury::Summary> summary;
    if (!timed_out("treasury")) {
        try {
            summary = treasury::generate_summary(*gateway_, unit_id, doc.text, req.instruction);
            summary->generated_at = now;
        } catch (const std::exception& e) {
            errors.push_back(stage_error("treasury", e));
        }
    }

    std::optional<worldwise::GenerationOutcome> quiz;
    if (!timed_out("worldwise")) {
        try {
            std::string_view quiz_text = doc.text;
            if (!gateway_->prompt_fits(llm::render_quiz_prompt(doc.text))) {
                if (!summary)
                    throw Error(Errc::context_overflow, "document exceeds the context window and no summary is available");
                quiz_text = summary->text;
            }
            quiz = worldwise::generate_quiz(*gateway_, quiz_text);
        } catch (const std::exception& e) {
            errors.push_back(stage_error("worldwise", e));
        }
    }

    std::optional<scribe::RecordSet> records;
    if (!timed_out("scribe")) {
        try {
            std::shared_ptr<scribe::VectorStore> vectors;
            {
                std::shared_lock lock(mutex_);
                vectors = state_->vectors;
            }
            records = scribe::build_records(vectors->embedder(), unit_id, ingestion::chunk(doc, {}));
        } catch (const std::exception& e) {
            errors.push_back(stage_error("scribe", e));
        }
    }

    // 3. persist results and publish when every stage succeeded
    mutate([&](Tx& tx, State& s) {
        auto& rec = s.units.at(unit_id);
        if (summary) {
            tx.db.prepare("INSERT INTO summaries(unit_id, text, word_count, strategy, generated_at) VALUES "
                          "(?1,?2,?3,?4,?5)")
                .bind(1, unit_id.value)
                .bind(2, summary->text)
                .bind(3, static_cast<std::int64_t>(summary->word_count))
                .bind(4, treasury::to_string(summary->strategy))
                .bind(5, to_millis(summary->generated_at))
                .run();
            summary->summary_id = SummaryId{tx.db.last_insert_id()};
        }
        worldwise::Quiz stored_quiz;
        if (quiz) {
            tx.db.prepare("INSERT INTO quizzes(unit_id, created_at) VALUES (?1, ?2)")
                .bind(1, unit_id.value)
                .bind(2, to_millis(now))
                .run();
            stored_quiz = {QuizId{tx.db.last_insert_id()}, unit_id, quiz->questions};
            for (std::size_t i = 0; i < quiz->questions.size(); ++i) {
                const auto& q = quiz->questions[i];
                tx.db.prepare("INSERT INTO questions(quiz_id, ordinal, stem, option1, option2, option3, option4, "
                              "answer_index) VALUES (?1,?2,?3,?4,?5,?6,?7,?8)")
                    .bind(1, stored_quiz.quiz_id.value)
                    .bind(2, static_cast<std::int64_t>(i))
                    .bind(3, q.stem)
                    .bind(4, q.options[0])
                    .bind(5, q.options[1])
                    .bind(6, q.options[2])
                    .bind(7, q.options[3])
                    .bind(8, q.answer_index)
                    .run();
            }
            for (std::size_t i = 0; i < quiz->rejects.size(); ++i)
                tx.db.prepare("INSERT INTO quiz_rejects(quiz_id, ordinal, block_text, reason) VALUES (?1,?2,?3,?4)")
                    .bind(1, stored_quiz.quiz_id.value)
                    .bind(2, static_cast<std::int64_t>(i))
                    .bind(3, quiz->rejects[i].block_text)
                    .bind(4, quiz->rejects[i].reason)
                    .run();
        }
        if (records) {
            for (auto& r : *records) {
                tx.db.prepare("INSERT INTO vector_records(unit_id, ordinal, text, embedding, terms) VALUES "
                              "(?1,?2,?3,?4,?5)")
                    .bind(1, unit_id.value)
                    .bind(2, static_cast<std::int64_t>(r.ordinal))
                    .bind(3, r.text)
                    .bind_blob(4, scribe::encode_embedding(r.embedding))
                    .bind(5, scribe::encode_terms(r.term_set))
                    .run();
                r.chunk_id = ChunkId{tx.db.last_insert_id()};
            }
        }
        const bool publish = errors.empty() && summary && quiz && records;
        tx.db.prepare("UPDATE units SET status = ?2, indexed = ?3, errors = ?4 WHERE id = ?1")
            .bind(1, unit_id.value)
            .bind(2, publish ? "published" : "draft")
            .bind(3, records.has_value())
            .bind(4, encode_errors(errors))
            .run();

        tx.touch();
        rec.errors = errors;
        rec.unit.indexed = records.has_value();
        rec.unit.status = publish ? domain::UnitStatus::published : domain::UnitStatus::draft;
        if (summary) {
            rec.unit.summary_id = summary->summary_id;
            s.summaries[unit_id] = *summary;
        }
        if (quiz) {
            rec.unit.quiz_id = stored_quiz.quiz_id;
            s.quiz_of_unit[unit_id] = stored_quiz.quiz_id;
            s.rejects[stored_quiz.quiz_id] = quiz->rejects;
            s.quizzes[stored_quiz.quiz_id] = std::move(stored_quiz);
        }
        if (records) s.vectors->restore(unit_id, std::move(*records));
    });

    if (!errors.empty())
        for (const auto& e : errors)
            spdlog::warn("unit {} stays draft: {} stage failed with {}: {}", unit_id.value, e.stage, e.code, e.message);
    return admin_unit(unit_id);
}

UnitReport Service::admin_unit(UnitId unit) const {
    std::shared_lock lock(mutex_);
    const auto& s = *state_;
    auto it = s.units.find(unit);
    if (it == s.units.end()) throw Error(Errc::unknown_unit, "unit " + std::to_string(unit.value));
    UnitReport r;
    r.unit = it->second.unit;
    r.category_id = s.category_of_unit(unit);
    r.country_id = s.country_of_unit(unit);
    r.errors = it->second.errors;
    if (auto sm = s.summaries.find(unit); sm != s.summaries.end()) r.summary = sm->second;
    if (auto q = s.quiz_of_unit.find(unit); q != s.quiz_of_unit.end()) {
        r.quiz = s.quizzes.at(q->second);
        if (auto rj = s.rejects.find(q->second); rj != s.rejects.end()) r.quiz_rejects = rj->second.size();
    }
    if (auto recs = s.vectors->records(unit)) r.chunk_count = recs->size();
    return r;
}

std::vector<LedgerMismatch> Service::verify_ledgers() const {
    std::shared_lock lock(mutex_);
    std::vector<LedgerMismatch> out;
    auto st = db_->prepare(
        "SELECT t.learner_id, t.xp_total, "
        "COALESCE((SELECT SUM(amount) FROM xp_ledger x WHERE x.learner_id = t.learner_id), 0), t.coin_total, "
        "COALESCE((SELECT SUM(amount) FROM coin_ledger c WHERE c.learner_id = t.learner_id), 0) "
        "FROM learner_totals t ORDER BY t.learner_id");
    while (st.step()) {
        LedgerMismatch m{LearnerId{st.int64(0)}, st.int64(1), st.int64(2), st.int64(3), st.int64(4)};
        bool engine_ok = state_->engine.has_learner(m.learner_id) &&
                         state_->engine.xp_total(m.learner_id) == m.ledger_xp &&
                         state_->engine.coin_total(m.learner_id) == m.ledger_coins;
        if (m.cached_xp != m.ledger_xp || m.cached_coins != m.ledger_coins || !engine_ok) out.push_back(m);
    }
    return out;
}

nlohmann::json Service::snapshot() const {
    std::shared_lock lock(mutex_);
    return snapshot_state(*state_, *db_);
}

} // namespace icls::service
