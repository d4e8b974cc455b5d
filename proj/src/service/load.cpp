#include "state.hpp"

#include <cstring>
#include <iomanip>
#include <sstream>

namespace icls::service {

using nlohmann::json;

std::string encode_answers(const std::map<std::size_t, int>& answers) {
    json j = json::object();
    for (auto [ordinal, choice] : answers) j[std::to_string(ordinal)] = choice;
    return j.dump();
}

std::map<std::size_t, int> decode_answers(std::string_view text) {
    std::map<std::size_t, int> out;
    const auto j = json::parse(text);
    for (auto it = j.begin(); it != j.end(); ++it) out[std::stoull(it.key())] = it.value().get<int>();
    return out;
}

std::string encode_errors(const std::vector<StageError>& errors) {
    json j = json::array();
    for (const auto& e : errors) j.push_back({{"stage", e.stage}, {"code", e.code}, {"message", e.message}});
    return j.dump();
}

std::vector<StageError> decode_errors(std::string_view text) {
    std::vector<StageError> out;
    for (const auto& e : json::parse(text))
        out.push_back({e.at("stage").get<std::string>(), e.at("code").get<std::string>(),
                       e.at("message").get<std::string>()});
    return out;
}

namespace {

void load_catalog(sql::Database& db, Service::State& s) {
    for (auto st = db.prepare("SELECT id, name FROM countries ORDER BY id"); st.step();)
        s.countries[CountryId{st.int64(0)}] = {CountryId{st.int64(0)}, st.text(1), {}};
    for (auto st = db.prepare("SELECT id, country_id, name FROM categories ORDER BY id"); st.step();) {
        domain::Category c{CategoryId{st.int64(0)}, CountryId{st.int64(1)}, st.text(2), {}};
        s.countries.at(c.country_id).categories.push_back(c.category_id);
        s.categories[c.category_id] = c;
    }
    for (auto st = db.prepare("SELECT id, category_id, title FROM lessons ORDER BY id"); st.step();) {
        domain::Lesson l{LessonId{st.int64(0)}, CategoryId{st.int64(1)}, st.text(2), {}};
        s.categories.at(l.category_id).lessons.push_back(l.lesson_id);
        s.lessons[l.lesson_id] = l;
    }
    for (auto st = db.prepare("SELECT id, lesson_id, kind, source_name, raw_text, instruction, status, indexed, "
                              "errors, created_at FROM units ORDER BY id");
         st.step();) {
        UnitRecord r;
        r.unit.unit_id = UnitId{st.int64(0)};
        r.unit.lesson_id = LessonId{st.int64(1)};
        r.unit.kind = *domain::parse_unit_kind(st.text(2));
        r.unit.source_name = st.text(3);
        r.unit.raw_text = st.text(4);
        r.instruction = st.text(5);
        r.unit.status = *domain::parse_unit_status(st.text(6));
        r.unit.indexed = st.int64(7) != 0;
        r.errors = decode_errors(st.text(8));
        r.created_at = from_millis(st.int64(9));
        s.lessons.at(r.unit.lesson_id).content_units.push_back(r.unit.unit_id);
        s.units[r.unit.unit_id] = std::move(r);
    }
    for (auto st = db.prepare("SELECT id, unit_id, text, word_count, strategy, generated_at FROM summaries");
         st.step();) {
        treasury::Summary sm;
        sm.summary_id = SummaryId{st.int64(0)};
        sm.unit_id = UnitId{st.int64(1)};
        sm.text = st.text(2);
        sm.word_count = static_cast<std::size_t>(st.int64(3));
        sm.strategy = *treasury::parse_strategy(st.text(4));
        sm.generated_at = from_millis(st.int64(5));
        s.units.at(sm.unit_id).unit.summary_id = sm.summary_id;
        s.summaries[sm.unit_id] = std::move(sm);
    }
    for (auto st = db.prepare("SELECT id, unit_id FROM quizzes ORDER BY id"); st.step();) {
        worldwise::Quiz q;
        q.quiz_id = QuizId{st.int64(0)};
        q.unit_id = UnitId{st.int64(1)};
        s.units.at(q.unit_id).unit.quiz_id = q.quiz_id;
        s.quiz_of_unit[q.unit_id] = q.quiz_id;
        s.quizzes[q.quiz_id] = std::move(q);
    }
    for (auto st = db.prepare("SELECT quiz_id, stem, option1, option2, option3, option4, answer_index FROM "
                              "questions ORDER BY quiz_id, ordinal");
         st.step();) {
        worldwise::Question q{st.text(1), {st.text(2), st.text(3), st.text(4), st.text(5)}, st.int32(6)};
        s.quizzes.at(QuizId{st.int64(0)}).questions.push_back(std::move(q));
    }
    for (auto st = db.prepare("SELECT quiz_id, block_text, reason FROM quiz_rejects ORDER BY quiz_id, ordinal");
         st.step();)
        s.rejects[QuizId{st.int64(0)}].push_back({st.text(1), st.text(2)});

    std::map<UnitId, scribe::RecordSet> records;
    for (auto st = db.prepare("SELECT chunk_id, unit_id, ordinal, text, embedding, terms FROM vector_records "
                              "ORDER BY unit_id, ordinal");
         st.step();) {
        scribe::VectorRecord r;
        r.chunk_id = ChunkId{st.int64(0)};
        r.unit_id = UnitId{st.int64(1)};
        r.ordinal = static_cast<std::size_t>(st.int64(2));
        r.text = st.text(3);
        r.embedding = scribe::decode_embedding(st.blob(4));
        r.term_set = scribe::decode_terms(st.text(5));
        records[r.unit_id].push_back(std::move(r));
    }
    for (auto& [unit, set] : records) s.vectors->restore(unit, std::move(set));

    for (auto st = db.prepare("SELECT id, country_id, title, url FROM stories ORDER BY id"); st.step();)
        s.stories[StoryId{st.int64(0)}] = {StoryId{st.int64(0)}, CountryId{st.int64(1)}, st.text(2), st.text(3)};
}

void load_learners(sql::Database& db, Service::State& s) {
    std::map<LearnerId, gamification::LearnerRecord> records;
    for (auto st = db.prepare("SELECT id, name, email, password_digest, immersion_country, learning_motivation, "
                              "self_rated_knowledge, daily_goal_minutes, notifications_opt_in, org_id, created_at "
                              "FROM learners ORDER BY id");
         st.step();) {
        domain::LearnerProfile p;
        p.learner_id = LearnerId{st.int64(0)};
        p.name = st.text(1);
        p.email = st.text(2);
        p.password_digest = st.text(3);
        p.immersion_country = CountryId{st.int64(4)};
        p.learning_motivation = st.text(5);
        p.self_rated_knowledge = st.int32(6);
        p.daily_goal_minutes = st.int32(7);
        p.notifications_opt_in = st.int64(8) != 0;
        p.org_id = st.opt_text(9);
        p.created_at = from_millis(st.int64(10));
        auto& rec = records[p.learner_id];
        rec.learner_id = p.learner_id;
        rec.registered_at = p.created_at;
        rec.org_id = p.org_id;
        rec.streak.learner_id = p.learner_id;
        s.by_email[p.email] = p.learner_id;
        s.learners[p.learner_id] = std::move(p);
    }

    for (auto st = db.prepare("SELECT learner_id, country_id, enrolled_at FROM enrollments"); st.step();) {
        LearnerId l{st.int64(0)};
        CountryId c{st.int64(1)};
        s.enrollments[{l, c}] = domain::Enrollment{l, c, from_millis(st.int64(2)), {}};
        records.at(l).countries.insert(c);
    }
    for (auto st = db.prepare("SELECT learner_id, unit_id, state FROM unit_progress"); st.step();) {
        LearnerId l{st.int64(0)};
        UnitId u{st.int64(1)};
        auto it = s.enrollments.find({l, s.country_of_unit(u)});
        if (it != s.enrollments.end())
            it->second.unit_progress[u] = static_cast<domain::ProgressState>(st.int64(2));
    }

    for (auto st = db.prepare("SELECT learner_id, unit_id, tier, amount, at FROM xp_ledger ORDER BY id"); st.step();)
        records.at(LearnerId{st.int64(0)})
            .xp_ledger.push_back({LearnerId{st.int64(0)}, UnitId{st.int64(1)}, st.int32(2), st.int64(3),
                                  from_millis(st.int64(4))});
    for (auto st = db.prepare("SELECT learner_id, amount, reason, correct_count, at FROM coin_ledger ORDER BY id");
         st.step();)
        records.at(LearnerId{st.int64(0)})
            .coin_ledger.push_back({LearnerId{st.int64(0)}, st.int64(1), *gamification::parse_coin_reason(st.text(2)),
                                    st.int64(3), from_millis(st.int64(4))});
    for (auto st = db.prepare("SELECT learner_id, kind, subject_id, awarded_at FROM badges ORDER BY learner_id, seq");
         st.step();)
        records.at(LearnerId{st.int64(0)})
            .badges.push_back({LearnerId{st.int64(0)}, *gamification::parse_badge_kind(st.text(1)), st.int64(2),
                               from_millis(st.int64(3))});
    for (auto st = db.prepare("SELECT learner_id, current_length, last_active_date FROM streaks"); st.step();) {
        auto& streak = records.at(LearnerId{st.int64(0)}).streak;
        streak.current_length = st.int32(1);
        if (auto d = st.opt_text(2)) streak.last_active_utc_date = parse_date(*d);
    }
    for (auto st = db.prepare("SELECT learner_id, day, completed, claimed FROM daily_challenges"); st.step();)
        records.at(LearnerId{st.int64(0)}).challenges[*parse_date(st.text(1))] = {st.int64(2) != 0,
                                                                                   st.int64(3) != 0};

    for (auto st = db.prepare("SELECT id, from_learner, to_learner, state, created_at FROM friend_requests ORDER BY id");
         st.step();) {
        FriendRequest r{FriendRequestId{st.int64(0)}, LearnerId{st.int64(1)}, LearnerId{st.int64(2)},
                        *parse_friend_state(st.text(3)), from_millis(st.int64(4))};
        if (r.state == FriendState::accepted) {
            records.at(r.from).friends.insert(r.to);
            records.at(r.to).friends.insert(r.from);
        }
        s.friend_requests[r.request_id] = r;
    }

    for (auto& [id, rec] : records) s.engine.restore(std::move(rec));

    for (auto st = db.prepare("SELECT learner_id, country_id, category_id, kind, seconds, score, at FROM "
                              "engagement_events ORDER BY id");
         st.step();) {
        proficiency::EngagementEvent e;
        e.learner_id = LearnerId{st.int64(0)};
        e.country_id = CountryId{st.int64(1)};
        if (auto c = st.opt_int64(2)) e.category_id = CategoryId{*c};
        auto kind = st.text(3);
        if (kind == "time_spent")
            e.kind = proficiency::TimeSpent{st.int64(4)};
        else if (kind == "quiz_attempt")
            e.kind = proficiency::QuizAttempt{};
        else
            e.kind = proficiency::QuizResult{st.real(5)};
        e.at = from_millis(st.int64(6));
        s.tracker.record_event(e);
    }

    for (auto st = db.prepare("SELECT id, learner_id, quiz_id, answers, correct_count, total, score, submitted_at "
                              "FROM quiz_submissions ORDER BY id");
         st.step();) {
        SubmissionRecord r{st.int64(0),
                           LearnerId{st.int64(1)},
                           QuizId{st.int64(2)},
                           decode_answers(st.text(3)),
                           static_cast<std::size_t>(st.int64(4)),
                           static_cast<std::size_t>(st.int64(5)),
                           st.real(6),
                           from_millis(st.int64(7))};
        s.submissions[{r.learner, r.quiz}].push_back(std::move(r));
    }
    for (auto st = db.prepare("SELECT id, learner_id, unit_id, ordinal, correct, answered_at FROM practice_answers "
                              "ORDER BY id");
         st.step();)
        s.practice[{LearnerId{st.int64(1)}, UnitId{st.int64(2)}}].push_back(
            {st.int64(0), static_cast<std::size_t>(st.int64(3)), st.int64(4) != 0, from_millis(st.int64(5))});

    for (auto st = db.prepare("SELECT token_digest, learner_id, expires_at FROM sessions"); st.step();)
        s.sessions[st.text(0)] = {LearnerId{st.int64(1)}, from_millis(st.int64(2))};
}

std::string hex(std::string_view bytes) {
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned char c : bytes) os << std::setw(2) << static_cast<int>(c);
    return os.str();
}

/// Doubles printed with enough digits to round-trip, plus their bit pattern.
json exact(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    std::ostringstream os;
    os << std::hex << bits;
    return os.str();
}

} // namespace

std::unique_ptr<Service::State> load_state(sql::Database& db) {
    auto s = std::make_unique<Service::State>();
    load_catalog(db, *s);
    load_learners(db, *s);
    return s;
}

json snapshot_state(const Service::State& s, sql::Database& db) {
    json out;
    auto& catalog = out["catalog"];
    for (const auto& [id, c] : s.countries) {
        json cats = json::array();
        for (auto cid : c.categories) {
            const auto& cat = s.categories.at(cid);
            json lessons = json::array();
            for (auto lid : cat.lessons) {
                const auto& l = s.lessons.at(lid);
                json units = json::array();
                for (auto uid : l.content_units) {
                    const auto& u = s.units.at(uid);
                    json unit{{"id", uid.value},
                              {"kind", domain::to_string(u.unit.kind)},
                              {"source_name", u.unit.source_name},
                              {"raw_text", u.unit.raw_text},
                              {"instruction", u.instruction},
                              {"status", domain::to_string(u.unit.status)},
                              {"indexed", u.unit.indexed},
                              {"errors", json::parse(encode_errors(u.errors))},
                              {"created_at", to_millis(u.created_at)}};
                    if (auto it = s.summaries.find(uid); it != s.summaries.end())
                        unit["summary"] = {{"id", it->second.summary_id.value},
                                           {"text", it->second.text},
                                           {"word_count", it->second.word_count},
                                           {"strategy", treasury::to_string(it->second.strategy)},
                                           {"generated_at", to_millis(it->second.generated_at)}};
                    if (auto it = s.quiz_of_unit.find(uid); it != s.quiz_of_unit.end()) {
                        json qs = json::array();
                        for (const auto& q : s.quizzes.at(it->second).questions)
                            qs.push_back({{"stem", q.stem}, {"options", q.options}, {"answer_index", q.answer_index}});
                        json rj = json::array();
                        if (auto r = s.rejects.find(it->second); r != s.rejects.end())
                            for (const auto& rej : r->second) rj.push_back({rej.block_text, rej.reason});
                        unit["quiz"] = {{"id", it->second.value}, {"questions", qs}, {"rejects", rj}};
                    }
                    if (auto recs = s.vectors->records(uid)) {
                        json vr = json::array();
                        for (const auto& r : *recs)
                            vr.push_back({{"chunk_id", r.chunk_id.value},
                                          {"ordinal", r.ordinal},
                                          {"text", r.text},
                                          {"embedding", hex(scribe::encode_embedding(r.embedding))},
                                          {"norm", exact(r.embedding.norm)},
                                          {"terms", r.term_set}});
                        unit["vectors"] = vr;
                    }
                    units.push_back(unit);
                }
                lessons.push_back({{"id", lid.value}, {"title", l.title}, {"units", units}});
            }
            cats.push_back({{"id", cid.value}, {"name", cat.name}, {"lessons", lessons}});
        }
        catalog.push_back({{"id", id.value}, {"name", c.name}, {"categories", cats}});
    }

    auto& learners = out["learners"];
    for (const auto& [id, p] : s.learners) {
        auto rec = s.engine.record(id);
        json xp = json::array(), coins = json::array(), badges = json::array(), challenges = json::object();
        for (const auto& e : rec.xp_ledger) xp.push_back({e.unit_id.value, e.tier, e.amount, to_millis(e.at)});
        for (const auto& e : rec.coin_ledger)
            coins.push_back({e.amount, gamification::to_string(e.reason), e.correct_count, to_millis(e.at)});
        for (const auto& b : rec.badges)
            badges.push_back({gamification::to_string(b.kind), b.subject_id, to_millis(b.awarded_at)});
        for (const auto& [d, c] : rec.challenges) challenges[format_date(d)] = {c.completed, c.claimed};
        json enrollments = json::array();
        for (const auto& [key, e] : s.enrollments) {
            if (key.first != id) continue;
            json progress = json::object();
            for (const auto& [u, st] : e.unit_progress) progress[std::to_string(u.value)] = domain::to_string(st);
            enrollments.push_back({{"country", key.second.value}, {"enrolled_at", to_millis(e.enrolled_at)},
                                   {"progress", progress}});
        }
        std::vector<std::int64_t> friends;
        for (auto f : rec.friends) friends.push_back(f.value);
        std::vector<std::int64_t> countries;
        for (auto c : rec.countries) countries.push_back(c.value);
        learners.push_back({{"id", id.value},
                            {"name", p.name},
                            {"email", p.email},
                            {"password_digest", p.password_digest},
                            {"immersion_country", p.immersion_country.value},
                            {"learning_motivation", p.learning_motivation},
                            {"self_rated_knowledge", p.self_rated_knowledge},
                            {"daily_goal_minutes", p.daily_goal_minutes},
                            {"notifications_opt_in", p.notifications_opt_in},
                            {"org_id", p.org_id ? json(*p.org_id) : json()},
                            {"created_at", to_millis(p.created_at)},
                            {"xp_total", s.engine.xp_total(id)},
                            {"coin_total", s.engine.coin_total(id)},
                            {"xp_ledger", xp},
                            {"coin_ledger", coins},
                            {"badges", badges},
                            {"streak",
                             {rec.streak.current_length, rec.streak.last_active_utc_date
                                                             ? json(format_date(*rec.streak.last_active_utc_date))
                                                             : json()}},
                            {"challenges", challenges},
                            {"enrollments", enrollments},
                            {"friends", friends},
                            {"countries", countries}});
    }

    auto& events = out["events"];
    events = json::array();
    for (const auto& e : s.tracker.events()) {
        json j{{"learner", e.learner_id.value},
               {"country", e.country_id.value},
               {"category", e.category_id ? json(e.category_id->value) : json()},
               {"at", to_millis(e.at)}};
        if (auto* t = std::get_if<proficiency::TimeSpent>(&e.kind)) j["seconds"] = t->seconds;
        else if (auto* r = std::get_if<proficiency::QuizResult>(&e.kind)) j["score"] = exact(r->score);
        else j["attempt"] = true;
        events.push_back(j);
    }
    for (const auto& [key, subs] : s.submissions)
        for (const auto& r : subs)
            out["submissions"].push_back({r.id, r.learner.value, r.quiz.value, encode_answers(r.answers),
                                          r.correct_count, r.total, exact(r.score), to_millis(r.submitted_at)});
    for (const auto& [key, recs] : s.practice)
        for (const auto& r : recs)
            out["practice"].push_back({r.id, key.first.value, key.second.value, r.ordinal, r.correct,
                                       to_millis(r.answered_at)});
    for (const auto& [digest, sess] : s.sessions)
        out["sessions"].push_back({digest, sess.learner.value, to_millis(sess.expires_at)});
    for (const auto& [id, r] : s.friend_requests)
        out["friend_requests"].push_back(
            {id.value, r.from.value, r.to.value, to_string(r.state), to_millis(r.created_at)});
    for (const auto& [id, st] : s.stories)
        out["stories"].push_back({id.value, st.country_id.value, st.title, st.url});

    for (auto st = db.prepare("SELECT learner_id, xp_total, coin_total FROM learner_totals ORDER BY learner_id");
         st.step();)
        out["learner_totals"].push_back({st.int64(0), st.int64(1), st.int64(2)});
    return out;
}

} // namespace icls::service
