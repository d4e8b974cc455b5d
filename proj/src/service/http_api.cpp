#include "icls/http_api.hpp"

#include "icls/error.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>

namespace icls::service {

using nlohmann::json;

namespace {

// --- JSON views -------------------------------------------------------------

template <class Tag>
json id_or_null(const std::optional<Id<Tag>>& id) {
    return id ? json(id->value) : json(nullptr);
}

json question_json(const worldwise::Question& q, bool with_answer) {
    json j{{"stem", q.stem}, {"options", q.options}};
    if (with_answer) j["answer_index"] = q.answer_index;
    return j;
}

json quiz_json(const worldwise::Quiz& quiz, bool with_answers) {
    json qs = json::array();
    for (std::size_t i = 0; i < quiz.questions.size(); ++i) {
        auto q = question_json(quiz.questions[i], with_answers);
        q["ordinal"] = i;
        qs.push_back(std::move(q));
    }
    return {{"quiz_id", quiz.quiz_id.value}, {"unit_id", quiz.unit_id.value}, {"questions", std::move(qs)}};
}

json badge_json(const gamification::Badge& b) {
    return {{"kind", gamification::to_string(b.kind)},
            {"subject_id", b.subject_id},
            {"awarded_at", format_rfc3339(b.awarded_at)}};
}

json badges_json(const std::vector<gamification::Badge>& badges) {
    json out = json::array();
    for (const auto& b : badges) out.push_back(badge_json(b));
    return out;
}

json profile_json(const domain::LearnerProfile& p) {
    return {{"learner_id", p.learner_id.value},
            {"name", p.name},
            {"email", p.email},
            {"immersion_country_id", p.immersion_country.value},
            {"learning_motivation", p.learning_motivation},
            {"self_rated_knowledge", p.self_rated_knowledge},
            {"daily_goal_minutes", p.daily_goal_minutes},
            {"notifications_opt_in", p.notifications_opt_in},
            {"org_id", p.org_id ? json(*p.org_id) : json(nullptr)},
            {"created_at", format_rfc3339(p.created_at)}};
}

json country_json(const domain::Country& c) {
    json cats = json::array();
    for (auto id : c.categories) cats.push_back(id.value);
    return {{"country_id", c.country_id.value}, {"name", c.name}, {"category_ids", std::move(cats)}};
}

json lesson_json(const LessonView& l) {
    json units = json::array();
    for (const auto& u : l.units)
        units.push_back({{"unit_id", u.unit_id.value},
                         {"kind", domain::to_string(u.kind)},
                         {"source_name", u.source_name},
                         {"quiz_id", id_or_null(u.quiz_id)},
                         {"state", domain::to_string(u.state)}});
    return {{"lesson_id", l.lesson_id.value},
            {"category_id", l.category_id.value},
            {"title", l.title},
            {"finished", l.finished},
            {"units", std::move(units)}};
}

json grade_json(const worldwise::GradeReport& g) {
    json per = json::array();
    for (const auto& f : g.per_question)
        per.push_back({{"answered", f.answered},
                       {"correct", f.correct},
                       {"chosen", f.chosen ? json(*f.chosen) : json(nullptr)}});
    return {{"correct_count", g.correct_count}, {"total", g.total}, {"score", g.score}, {"per_question", per}};
}

json stats_json(const proficiency::EngagementStats& s) {
    return {{"country_id", s.country_id.value},
            {"total_seconds", s.total_seconds},
            {"attempt_count", s.attempt_count},
            {"result_count", s.result_count},
            {"mean_quiz_score", s.mean_quiz_score()}};
}

json friend_request_json(const FriendRequest& r) {
    return {{"request_id", r.request_id.value},
            {"from_learner_id", r.from.value},
            {"to_learner_id", r.to.value},
            {"state", to_string(r.state)},
            {"created_at", format_rfc3339(r.created_at)}};
}

json story_json(const Story& s) {
    return {{"story_id", s.story_id.value}, {"country_id", s.country_id.value}, {"title", s.title}, {"url", s.url}};
}

json report_json(const UnitReport& r) {
    json errors = json::array();
    for (const auto& e : r.errors) errors.push_back({{"stage", e.stage}, {"code", e.code}, {"message", e.message}});
    json j{{"unit_id", r.unit.unit_id.value},
           {"lesson_id", r.unit.lesson_id.value},
           {"category_id", r.category_id.value},
           {"country_id", r.country_id.value},
           {"kind", domain::to_string(r.unit.kind)},
           {"source_name", r.unit.source_name},
           {"status", domain::to_string(r.unit.status)},
           {"indexed", r.unit.indexed},
           {"chunk_count", r.chunk_count},
           {"quiz_rejects", r.quiz_rejects},
           {"errors", std::move(errors)},
           {"summary", nullptr},
           {"quiz", nullptr}};
    if (r.summary)
        j["summary"] = {{"summary_id", r.summary->summary_id.value},
                        {"text", r.summary->text},
                        {"word_count", r.summary->word_count},
                        {"strategy", treasury::to_string(r.summary->strategy)}};
    if (r.quiz) j["quiz"] = quiz_json(*r.quiz, true);
    return j;
}

// --- request helpers --------------------------------------------------------

json body_json(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(Errc::validation, "request body must be a JSON object");
    return j;
}

std::string str_field(const json& j, const char* key, bool required = true) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required) throw Error(Errc::validation, std::string("missing field '") + key + "'");
        return {};
    }
    if (!it->is_string()) throw Error(Errc::validation, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::int64_t int_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        throw Error(Errc::validation, std::string("field '") + key + "' must be an integer");
    return it->get<std::int64_t>();
}

std::int64_t path_id(const httplib::Request& req, std::size_t index = 1) {
    const auto s = req.matches[index].str();
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error(Errc::not_found, "bad identifier");
    return v;
}

std::string bearer(const httplib::Request& req) {
    auto h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return {};
    return h.substr(prefix.size());
}

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message,
                std::optional<std::string> stage = {}) {
    json e{{"code", code}, {"message", message}};
    if (stage) e["stage"] = *stage;
    send(res, status, {{"error", std::move(e)}});
}

std::map<std::size_t, int> parse_answers(const json& body) {
    auto it = body.find("answers");
    if (it == body.end()) throw Error(Errc::validation, "missing field 'answers'");
    std::map<std::size_t, int> out;
    auto put = [&](std::size_t ordinal, const json& v) {
        if (v.is_null()) return;
        if (!v.is_number_integer()) throw Error(Errc::validation, "answers must be integers");
        out[ordinal] = v.get<int>();
    };
    if (it->is_array()) {
        for (std::size_t i = 0; i < it->size(); ++i) put(i, (*it)[i]);
    } else if (it->is_object()) {
        for (auto e = it->begin(); e != it->end(); ++e) {
            const auto& k = e.key();
            const auto& v = e.value();
            std::size_t ordinal = 0;
            auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), ordinal);
            if (ec != std::errc{} || p != k.data() + k.size())
                throw Error(Errc::validation, "answer keys must be question ordinals");
            put(ordinal, v);
        }
    } else {
        throw Error(Errc::validation, "answers must be an array or an object");
    }
    return out;
}

UploadRequest upload_from_json(const json& j) {
    UploadRequest u;
    u.country = str_field(j, "country");
    u.category = str_field(j, "category");
    u.lesson_title = str_field(j, "lesson_title");
    if (auto k = str_field(j, "kind", false); !k.empty()) {
        auto kind = domain::parse_unit_kind(k);
        if (!kind) throw Error(Errc::validation, "kind must be document or video_transcript");
        u.kind = *kind;
    }
    u.source_name = str_field(j, "source_name", false);
    u.content = str_field(j, "content", false);
    if (auto ct = str_field(j, "content_type", false); !ct.empty()) u.content_type = ct;
    u.instruction = str_field(j, "instruction", false);
    return u;
}

UploadRequest upload_from_request(const httplib::Request& req) {
    if (!req.is_multipart_form_data()) return upload_from_json(body_json(req));
    if (!req.has_file("metadata")) throw Error(Errc::validation, "multipart upload needs a 'metadata' part");
    auto meta = json::parse(req.get_file_value("metadata").content, nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) throw Error(Errc::validation, "metadata must be a JSON object");
    auto u = upload_from_json(meta);
    if (req.has_file("file")) {
        const auto file = req.get_file_value("file");
        u.content = file.content;
        if (u.source_name.empty()) u.source_name = file.filename;
        if (!meta.contains("content_type") && !file.content_type.empty()) u.content_type = file.content_type;
    }
    return u;
}

gamification::Scope parse_scope(const httplib::Request& req, const ProfileView& viewer) {
    auto scope = req.has_param("scope") ? req.get_param_value("scope") : std::string("global");
    auto subject = req.has_param("subject") ? req.get_param_value("subject") : std::string();
    if (scope == "global") return gamification::GlobalScope{};
    if (scope == "friends") return gamification::FriendsScope{viewer.profile.learner_id};
    if (scope == "country") {
        if (subject.empty()) return gamification::CountryScope{viewer.profile.immersion_country};
        std::int64_t id = 0;
        auto [p, ec] = std::from_chars(subject.data(), subject.data() + subject.size(), id);
        if (ec != std::errc{} || p != subject.data() + subject.size())
            throw Error(Errc::validation, "country subject must be an id");
        return gamification::CountryScope{CountryId{id}};
    }
    if (scope == "organization") {
        if (subject.empty()) subject = viewer.profile.org_id.value_or("");
        if (subject.empty()) throw Error(Errc::validation, "organization scope needs a subject");
        return gamification::OrganizationScope{subject};
    }
    throw Error(Errc::validation, "scope must be global, country, friends or organization");
}

std::size_t parse_limit(const httplib::Request& req) {
    if (!req.has_param("limit")) return 50;
    auto s = req.get_param_value("limit");
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error(Errc::validation, "limit must be a positive integer");
    return v;
}

} // namespace

struct HttpApi::Impl {
    Service& service;
    Clock clock;
    httplib::Server server;

    enum class Access { open, learner, admin };
    using Handler = std::function<void(const httplib::Request&, httplib::Response&, const Principal&)>;

    Impl(Service& s, Clock c) : service(s), clock(std::move(c)) { routes(); }

    httplib::Server::Handler wrap(Access access, Handler h) {
        return [this, access, h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                Principal who;
                if (access != Access::open) {
                    who = service.authenticate(bearer(req), clock());
                    if (access == Access::admin && !who.admin) throw Error(Errc::forbidden, "admin role required");
                    if (access == Access::learner && !who.learner)
                        throw Error(Errc::forbidden, "a learner session is required");
                }
                h(req, res, who);
            } catch (const Error& e) {
                std::optional<std::string> stage;
                std::string_view msg = e.what();
                if (msg.rfind("ingestion stage: ", 0) == 0) {
                    stage = "ingestion";
                    msg.remove_prefix(17);
                }
                send_error(res, http_status(e.code()), to_string(e.code()), msg, stage);
            } catch (const json::exception& e) {
                send_error(res, 422, "validation", e.what());
            } catch (const std::exception& e) {
                spdlog::error("{} {}: {}", req.method, req.path, e.what());
                send_error(res, 500, "internal", "internal error");
            }
        };
    }

    void get(const std::string& pattern, Access a, Handler h) { server.Get(pattern, wrap(a, std::move(h))); }
    void post(const std::string& pattern, Access a, Handler h) { server.Post(pattern, wrap(a, std::move(h))); }
    void del(const std::string& pattern, Access a, Handler h) { server.Delete(pattern, wrap(a, std::move(h))); }

    static LearnerId me(const Principal& p) { return *p.learner; }

    void routes() {
        const std::string v1 = "/api/v1";
        using R = const httplib::Request&;
        using W = httplib::Response&;
        using P = const Principal&;

        server.set_logger([](R req, const httplib::Response& res) {
            spdlog::info("{} {} -> {}", req.method, req.path, res.status);
        });
        server.set_error_handler([](R, W res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            send_error(res, res.status, res.status == 404 ? "not-found" : "http-error",
                       res.status == 404 ? "no such route" : "request failed");
            return httplib::Server::HandlerResponse::Handled;
        });

        // auth
        post(v1 + "/auth/register", Access::open, [this](R req, W res, P) {
            auto b = body_json(req);
            domain::ProfileFields f;
            f.name = str_field(b, "name");
            f.email = str_field(b, "email");
            f.password = str_field(b, "password");
            f.immersion_country = CountryId{int_field(b, "immersion_country_id")};
            f.learning_motivation = str_field(b, "learning_motivation", false);
            f.self_rated_knowledge = static_cast<int>(int_field(b, "self_rated_knowledge"));
            f.daily_goal_minutes = static_cast<int>(int_field(b, "daily_goal_minutes"));
            f.notifications_opt_in = b.value("notifications_opt_in", false);
            if (auto org = str_field(b, "org_id", false); !org.empty()) f.org_id = org;
            send(res, 201, profile_json(service.register_learner(f, clock())));
        });
        post(v1 + "/auth/login", Access::open, [this](R req, W res, P) {
            auto b = body_json(req);
            auto s = service.login(str_field(b, "email"), str_field(b, "password"), clock());
            send(res, 200,
                 {{"token", s.token}, {"learner_id", s.learner_id.value}, {"expires_at", format_rfc3339(s.expires_at)}});
        });
        post(v1 + "/auth/logout", Access::learner, [this](R req, W res, P) {
            service.logout(bearer(req));
            send(res, 200, {{"logged_out", true}});
        });

        // catalog
        get(v1 + "/countries", Access::learner, [this](R, W res, P) {
            json out = json::array();
            for (const auto& c : service.countries()) out.push_back(country_json(c));
            send(res, 200, out);
        });
        get(v1 + R"(/countries/(\d+)/categories)", Access::learner, [this](R req, W res, P who) {
            json out = json::array();
            for (const auto& v : service.categories(CountryId{path_id(req)}, me(who))) {
                json lessons = json::array();
                for (auto l : v.category.lessons) lessons.push_back(l.value);
                out.push_back({{"category_id", v.category.category_id.value},
                               {"country_id", v.category.country_id.value},
                               {"name", v.category.name},
                               {"lesson_ids", std::move(lessons)},
                               {"lesson_count", v.lesson_count},
                               {"finished_lessons", v.finished_lessons}});
            }
            send(res, 200, out);
        });
        get(v1 + R"(/categories/(\d+)/lessons)", Access::learner, [this](R req, W res, P who) {
            json out = json::array();
            for (const auto& l : service.lessons(CategoryId{path_id(req)}, me(who))) out.push_back(lesson_json(l));
            send(res, 200, out);
        });
        get(v1 + R"(/lessons/(\d+))", Access::learner, [this](R req, W res, P who) {
            send(res, 200, lesson_json(service.lesson(LessonId{path_id(req)}, me(who))));
        });
        get(v1 + R"(/lessons/(\d+)/quiz)", Access::learner, [this](R req, W res, P) {
            json quizzes = json::array();
            for (const auto& q : service.lesson_quizzes(LessonId{path_id(req)})) quizzes.push_back(quiz_json(q, false));
            send(res, 200, {{"lesson_id", path_id(req)}, {"quizzes", std::move(quizzes)}});
        });
        get(v1 + "/stories", Access::learner, [this](R req, W res, P) {
            std::optional<CountryId> country;
            if (req.has_param("country")) country = CountryId{std::stoll(req.get_param_value("country"))};
            json out = json::array();
            for (const auto& s : service.stories(country)) out.push_back(story_json(s));
            send(res, 200, out);
        });

        // learning flow
        post(v1 + "/enrollments", Access::learner, [this](R req, W res, P who) {
            auto b = body_json(req);
            auto e = service.enroll(me(who), CountryId{int_field(b, "country_id")}, clock());
            send(res, 201,
                 {{"learner_id", e.learner_id.value},
                  {"country_id", e.country_id.value},
                  {"enrolled_at", format_rfc3339(e.enrolled_at)}});
        });
        post(v1 + R"(/units/(\d+)/watch)", Access::learner, [this](R req, W res, P who) {
            auto r = service.watch(me(who), UnitId{path_id(req)}, clock());
            send(res, 200,
                 {{"state", domain::to_string(r.state)}, {"xp_delta", r.xp_delta}, {"new_badges", badges_json(r.new_badges)}});
        });
        post(v1 + R"(/units/(\d+)/time)", Access::learner, [this](R req, W res, P who) {
            auto b = body_json(req);
            auto stats = service.record_time(me(who), UnitId{path_id(req)}, int_field(b, "seconds"), clock());
            send(res, 200, stats_json(stats));
        });
        get(v1 + R"(/units/(\d+)/summary)", Access::learner, [this](R req, W res, P who) {
            auto s = service.summary(me(who), UnitId{path_id(req)});
            send(res, 200,
                 {{"summary_id", s.summary_id.value},
                  {"unit_id", s.unit_id.value},
                  {"text", s.text},
                  {"word_count", s.word_count},
                  {"strategy", treasury::to_string(s.strategy)}});
        });
        get(v1 + R"(/units/(\d+)/quiz)", Access::learner, [this](R req, W res, P who) {
            send(res, 200, quiz_json(service.unit_quiz(me(who), UnitId{path_id(req)}), false));
        });
        post(v1 + R"(/quizzes/(\d+)/submit)", Access::learner, [this](R req, W res, P who) {
            auto b = body_json(req);
            auto r = service.submit(me(who), QuizId{path_id(req)}, parse_answers(b), clock());
            send(res, 200,
                 {{"grade", grade_json(r.grade)},
                  {"xp_delta", r.xp_delta},
                  {"coin_delta", r.coin_delta},
                  {"state", domain::to_string(r.state)},
                  {"new_badges", badges_json(r.new_badges)},
                  {"first_submission", r.first_submission},
                  {"daily_challenge_completed", r.daily_challenge_completed}});
        });
        get(v1 + R"(/units/(\d+)/practice)", Access::learner, [this](R req, W res, P who) {
            auto q = service.practice_question(me(who), UnitId{path_id(req)});
            send(res, 200,
                 {{"unit_id", q.unit_id.value},
                  {"quiz_id", q.quiz_id.value},
                  {"ordinal", q.ordinal},
                  {"question", question_json(q.question, false)},
                  {"context", q.context},
                  {"from_previous_mistake", q.from_previous_mistake}});
        });
        post(v1 + R"(/units/(\d+)/practice)", Access::learner, [this](R req, W res, P who) {
            auto b = body_json(req);
            auto ordinal = int_field(b, "ordinal");
            if (ordinal < 0) throw Error(Errc::validation, "ordinal must be non-negative");
            auto r = service.answer_practice(me(who), UnitId{path_id(req)}, static_cast<std::size_t>(ordinal),
                                             static_cast<int>(int_field(b, "option")), clock());
            send(res, 200,
                 {{"correct", r.correct},
                  {"state", domain::to_string(r.state)},
                  {"xp_delta", r.xp_delta},
                  {"new_badges", badges_json(r.new_badges)}});
        });
        post(v1 + R"(/units/(\d+)/chat)", Access::learner, [this](R req, W res, P who) {
            auto b = body_json(req);
            auto a = service.chat(me(who), UnitId{path_id(req)}, str_field(b, "question"));
            json ids = json::array();
            for (auto c : a.used_chunk_ids) ids.push_back(c.value);
            send(res, 200, {{"answer", a.answer_text}, {"question", a.question}, {"used_chunk_ids", std::move(ids)}});
        });

        // social and gamification
        get(v1 + "/leaderboard", Access::learner, [this](R req, W res, P who) {
            auto viewer = service.profile(me(who));
            auto entries = service.leaderboard(me(who), parse_scope(req, viewer), parse_limit(req));
            json out = json::array();
            for (const auto& e : entries)
                out.push_back({{"learner_id", e.learner_id.value}, {"total_xp", e.total_xp}, {"rank", e.rank}});
            send(res, 200, out);
        });
        get(v1 + "/profile", Access::learner, [this](R, W res, P who) {
            auto v = service.profile(me(who));
            json enrollments = json::array();
            for (const auto& e : v.enrollments) {
                json units = json::object();
                for (const auto& [u, st] : e.unit_progress) units[std::to_string(u.value)] = domain::to_string(st);
                enrollments.push_back({{"country_id", e.country_id.value},
                                       {"enrolled_at", format_rfc3339(e.enrolled_at)},
                                       {"unit_progress", std::move(units)}});
            }
            json prof = json::array();
            for (const auto& p : v.proficiency)
                prof.push_back({{"country_id", p.country_id.value},
                                {"proficiency", p.score.value},
                                {"time_norm", p.score.time_norm},
                                {"attempt_norm", p.score.attempt_norm},
                                {"score_term", p.score.score_term},
                                {"stats", stats_json(p.stats)}});
            json friends = json::array();
            for (auto f : v.friends) friends.push_back(f.value);
            send(res, 200,
                 {{"profile", profile_json(v.profile)},
                  {"xp", v.xp},
                  {"coins", v.coins},
                  {"streak",
                   {{"current_length", v.streak.current_length},
                    {"last_active_date", v.streak.last_active_utc_date
                                             ? json(format_date(*v.streak.last_active_utc_date))
                                             : json(nullptr)}}},
                  {"badges", badges_json(v.badges)},
                  {"enrollments", std::move(enrollments)},
                  {"proficiency", std::move(prof)},
                  {"friends", std::move(friends)}});
        });
        get(v1 + "/recommendations", Access::learner, [this](R, W res, P who) {
            json out = json::array();
            for (auto id : service.recommendations(me(who))) out.push_back(lesson_json(service.lesson(id, me(who))));
            send(res, 200, out);
        });
        post(v1 + "/friends/requests", Access::learner, [this](R req, W res, P who) {
            auto b = body_json(req);
            LearnerId to;
            if (b.contains("to_learner_id")) {
                to = LearnerId{int_field(b, "to_learner_id")};
            } else {
                auto found = service.learner_by_email(str_field(b, "email"));
                if (!found) throw Error(Errc::unknown_learner, "no learner with that email");
                to = *found;
            }
            send(res, 201, friend_request_json(service.send_friend_request(me(who), to, clock())));
        });
        get(v1 + "/friends/requests", Access::learner, [this](R, W res, P who) {
            json out = json::array();
            for (const auto& r : service.friend_requests(me(who))) out.push_back(friend_request_json(r));
            send(res, 200, out);
        });
        post(v1 + R"(/friends/requests/(\d+)/accept)", Access::learner, [this](R req, W res, P who) {
            send(res, 200,
                 friend_request_json(service.respond_friend_request(me(who), FriendRequestId{path_id(req)}, true)));
        });
        post(v1 + R"(/friends/requests/(\d+)/decline)", Access::learner, [this](R req, W res, P who) {
            send(res, 200,
                 friend_request_json(service.respond_friend_request(me(who), FriendRequestId{path_id(req)}, false)));
        });
        get(v1 + "/daily-challenge", Access::learner, [this](R, W res, P who) {
            auto d = service.daily_challenge(me(who), clock());
            send(res, 200,
                 {{"date", format_date(d.date)},
                  {"quiz_id", d.quiz_id.value},
                  {"unit_id", d.unit_id.value},
                  {"quiz", quiz_json(d.quiz, false)},
                  {"completed", d.completed},
                  {"claimed", d.claimed}});
        });
        post(v1 + "/daily-challenge/claim", Access::learner, [this](R, W res, P who) {
            auto a = service.claim_daily_challenge(me(who), clock());
            send(res, 200, {{"coin_delta", a.delta}, {"coins", service.profile(me(who)).coins}});
        });

        // admin
        post(v1 + "/admin/countries", Access::admin, [this](R req, W res, P) {
            send(res, 201, country_json(service.create_country(str_field(body_json(req), "name"))));
        });
        del(v1 + R"(/admin/countries/(\d+))", Access::admin, [this](R req, W res, P) {
            service.delete_country(CountryId{path_id(req)});
            send(res, 200, {{"deleted", true}});
        });
        post(v1 + "/admin/stories", Access::admin, [this](R req, W res, P) {
            auto b = body_json(req);
            auto s = service.add_story(CountryId{int_field(b, "country_id")}, str_field(b, "title"), str_field(b, "url"));
            send(res, 201, story_json(s));
        });
        post(v1 + "/admin/units", Access::admin, [this](R req, W res, P) {
            send(res, 201, report_json(service.admin_upload(upload_from_request(req), clock())));
        });
        get(v1 + R"(/admin/units/(\d+))", Access::admin, [this](R req, W res, P) {
            send(res, 200, report_json(service.admin_unit(UnitId{path_id(req)})));
        });
    }
};

HttpApi::HttpApi(Service& service, Clock clock) : impl_(std::make_unique<Impl>(service, std::move(clock))) {}
HttpApi::~HttpApi() = default;

bool HttpApi::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpApi::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpApi::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }
void HttpApi::stop() { impl_->server.stop(); }

} // namespace icls::service
