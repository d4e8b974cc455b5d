#include "icls/http_api.hpp"
#include "support/service_fixture.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace icls;
using namespace icls::service;
using nlohmann::json;

namespace {

class HttpApiTest : public ::testing::Test {
protected:
    void SetUp() override {
        svc = std::make_unique<Service>(support::test_config(dir.file("icls.db")),
                                        std::make_shared<llm::MockProvider>());
        api = std::make_unique<HttpApi>(*svc, [this] { return clock(); });
        port = api->bind_to_any_port("127.0.0.1");
        ASSERT_GT(port, 0);
        server = std::thread([this] { api->listen_after_bind(); });
        api->wait_until_ready();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
    }
    void TearDown() override {
        api->stop();
        server.join();
    }

    struct Reply {
        int status;
        json body;
    };

    /// Every learner-role body passes through here so secrecy can be checked
    /// across the whole session.
    Reply learner_call(const std::string& method, const std::string& path, const json& body = nullptr) {
        auto r = call(method, path, token, body);
        learner_bodies.push_back(r.raw);
        return {r.status, r.body};
    }

    Reply admin_call(const std::string& method, const std::string& path, const json& body = nullptr) {
        auto r = call(method, path, support::kAdminToken, body);
        return {r.status, r.body};
    }

    struct Raw {
        int status;
        json body;
        std::string raw;
    };

    Raw call(const std::string& method, const std::string& path, const std::string& bearer, const json& body) {
        httplib::Headers h;
        if (!bearer.empty()) h.emplace("Authorization", "Bearer " + bearer);
        httplib::Result res;
        const std::string full = "/api/v1" + path;
        auto payload = body.is_null() ? std::string() : body.dump();
        if (method == "GET") res = client->Get(full, h);
        else if (method == "POST") res = client->Post(full, h, payload, "application/json");
        else if (method == "DELETE") res = client->Delete(full, h);
        EXPECT_TRUE(res) << method << " " << path;
        if (!res) return {0, nullptr, ""};
        auto parsed = json::parse(res->body, nullptr, false);
        EXPECT_FALSE(parsed.is_discarded()) << res->body;
        EXPECT_EQ(res->get_header_value("Content-Type").rfind("application/json", 0), 0u);
        return {res->status, parsed, res->body};
    }

    json upload_unit(const std::string& lesson) {
        json meta{{"country", "Japan"},
                  {"category", "Customs"},
                  {"lesson_title", lesson},
                  {"kind", "document"},
                  {"instruction", "Keep it practical."}};
        httplib::MultipartFormDataItems items{
            {"metadata", meta.dump(), "", "application/json"},
            {"file", support::culture_document(), "japan.txt", "text/plain"},
        };
        httplib::Headers h{{"Authorization", std::string("Bearer ") + support::kAdminToken}};
        auto res = client->Post("/api/v1/admin/units", h, items);
        EXPECT_TRUE(res);
        EXPECT_EQ(res->status, 201) << res->body;
        return json::parse(res->body);
    }

    void register_and_login(const std::string& email, std::int64_t country) {
        json reg{{"name", "Mia"},
                 {"email", email},
                 {"password", "sakura-2024"},
                 {"immersion_country_id", country},
                 {"learning_motivation", "work abroad"},
                 {"self_rated_knowledge", 2},
                 {"daily_goal_minutes", 20},
                 {"notifications_opt_in", true}};
        auto r = learner_call("POST", "/auth/register", reg);
        ASSERT_EQ(r.status, 201) << r.body;
        EXPECT_EQ(r.body["email"], email);
        EXPECT_FALSE(r.body.contains("password_digest"));
        auto login = learner_call("POST", "/auth/login", {{"email", email}, {"password", "sakura-2024"}});
        ASSERT_EQ(login.status, 200);
        token = login.body["token"];
    }

    support::TempDir dir;
    support::ManualClock clock{support::base_time()};
    std::unique_ptr<Service> svc;
    std::unique_ptr<HttpApi> api;
    std::unique_ptr<httplib::Client> client;
    std::thread server;
    int port{0};
    std::string token;
    std::vector<std::string> learner_bodies;
};

TEST_F(HttpApiTest, LearnerJourneyEndToEnd) {
    auto report = upload_unit("Etiquette");
    EXPECT_EQ(report["status"], "published");
    EXPECT_GE(report["summary"]["word_count"].get<int>(), 200);
    EXPECT_GE(report["quiz"]["questions"].size(), 10u);
    EXPECT_GT(report["chunk_count"].get<int>(), 1);
    const auto unit = report["unit_id"].get<std::int64_t>();
    const auto quiz_id = report["quiz"]["quiz_id"].get<std::int64_t>();
    const auto lesson = report["lesson_id"].get<std::int64_t>();
    const auto category = report["category_id"].get<std::int64_t>();
    std::vector<int> answers;
    for (const auto& q : report["quiz"]["questions"]) answers.push_back(q["answer_index"]);

    auto france = admin_call("POST", "/admin/countries", {{"name", "France"}});
    ASSERT_EQ(france.status, 201);
    register_and_login("mia@example.com", france.body["country_id"]);

    auto countries = learner_call("GET", "/countries");
    ASSERT_EQ(countries.status, 200);
    ASSERT_EQ(countries.body.size(), 2u);
    const auto japan = report["country_id"].get<std::int64_t>();

    auto cats = learner_call("GET", "/countries/" + std::to_string(japan) + "/categories");
    ASSERT_EQ(cats.status, 200);
    EXPECT_EQ(cats.body.size(), 11u);

    // not yet enrolled in the unit's country
    EXPECT_EQ(learner_call("POST", "/units/" + std::to_string(unit) + "/watch").status, 403);
    auto enroll = learner_call("POST", "/enrollments", {{"country_id", japan}});
    EXPECT_EQ(enroll.status, 201);

    auto lessons = learner_call("GET", "/categories/" + std::to_string(category) + "/lessons");
    ASSERT_EQ(lessons.body.size(), 1u);
    EXPECT_EQ(lessons.body[0]["units"][0]["state"], "not_started");

    auto watch = learner_call("POST", "/units/" + std::to_string(unit) + "/watch");
    ASSERT_EQ(watch.status, 200);
    EXPECT_EQ(watch.body["xp_delta"], 5);
    EXPECT_EQ(learner_call("POST", "/units/" + std::to_string(unit) + "/watch").status, 409);

    auto time = learner_call("POST", "/units/" + std::to_string(unit) + "/time", {{"seconds", 900}});
    EXPECT_EQ(time.body["total_seconds"], 900);

    auto summary = learner_call("GET", "/units/" + std::to_string(unit) + "/summary");
    EXPECT_GE(summary.body["word_count"].get<int>(), 200);

    auto unit_quiz = learner_call("GET", "/units/" + std::to_string(unit) + "/quiz");
    ASSERT_EQ(unit_quiz.status, 200);
    EXPECT_EQ(unit_quiz.body["questions"].size(), answers.size());
    auto lesson_quiz = learner_call("GET", "/lessons/" + std::to_string(lesson) + "/quiz");
    ASSERT_EQ(lesson_quiz.status, 200);

    json submitted = answers;
    submitted[0] = answers[0] % 4 + 1;
    auto submit = learner_call("POST", "/quizzes/" + std::to_string(quiz_id) + "/submit", {{"answers", submitted}});
    ASSERT_EQ(submit.status, 200) << submit.body;
    EXPECT_EQ(submit.body["grade"]["correct_count"], answers.size() - 1);
    EXPECT_EQ(submit.body["xp_delta"], 2);
    EXPECT_EQ(submit.body["coin_delta"], answers.size() - 1);
    EXPECT_EQ(submit.body["state"], "summary_tested");
    EXPECT_FALSE(submit.body["grade"]["per_question"][0]["correct"]);

    auto practice = learner_call("GET", "/units/" + std::to_string(unit) + "/practice");
    ASSERT_EQ(practice.status, 200);
    EXPECT_EQ(practice.body["ordinal"], 0);
    EXPECT_TRUE(practice.body["from_previous_mistake"]);
    auto answer = learner_call("POST", "/units/" + std::to_string(unit) + "/practice",
                               {{"ordinal", 0}, {"option", answers[0]}});
    EXPECT_TRUE(answer.body["correct"]);
    EXPECT_EQ(answer.body["xp_delta"], 5);

    auto chat = learner_call("POST", "/units/" + std::to_string(unit) + "/chat",
                             {{"question", "How should I bow to say thanks?"}});
    ASSERT_EQ(chat.status, 200);
    EXPECT_FALSE(chat.body["answer"].get<std::string>().empty());
    EXPECT_FALSE(chat.body["used_chunk_ids"].empty());

    auto board = learner_call("GET", "/leaderboard?scope=global&limit=10");
    ASSERT_EQ(board.status, 200);
    ASSERT_EQ(board.body.size(), 1u);
    EXPECT_EQ(board.body[0]["total_xp"], 12);
    EXPECT_EQ(board.body[0]["rank"], 1);
    EXPECT_EQ(learner_call("GET", "/leaderboard?scope=country&subject=" + std::to_string(japan)).body.size(), 1u);
    EXPECT_EQ(learner_call("GET", "/leaderboard?scope=planet").status, 422);

    auto profile = learner_call("GET", "/profile");
    EXPECT_EQ(profile.body["xp"], 12);
    EXPECT_EQ(profile.body["coins"], answers.size() - 1);
    EXPECT_EQ(profile.body["streak"]["current_length"], 1);
    EXPECT_EQ(profile.body["enrollments"].size(), 2u);

    auto challenge = learner_call("GET", "/daily-challenge");
    ASSERT_EQ(challenge.status, 200);
    EXPECT_TRUE(challenge.body["completed"]);
    auto claim = learner_call("POST", "/daily-challenge/claim");
    EXPECT_EQ(claim.body["coin_delta"], 10);
    EXPECT_EQ(learner_call("POST", "/daily-challenge/claim").status, 409);

    EXPECT_EQ(learner_call("GET", "/recommendations").status, 200);
    EXPECT_TRUE(learner_call("GET", "/lessons/" + std::to_string(lesson)).body["finished"]);

    EXPECT_TRUE(svc->verify_ledgers().empty());
    ASSERT_GT(learner_bodies.size(), 25u);
    for (const auto& body : learner_bodies) EXPECT_EQ(body.find("answer_index"), std::string::npos) << body;
}

TEST_F(HttpApiTest, AuthenticationAndRoles) {
    auto country = admin_call("POST", "/admin/countries", {{"name", "Japan"}});
    ASSERT_EQ(country.status, 201);

    EXPECT_EQ(call("GET", "/countries", "", nullptr).status, 401);
    EXPECT_EQ(call("GET", "/countries", "bogus", nullptr).status, 401);
    EXPECT_EQ(call("GET", "/profile", support::kAdminToken, nullptr).status, 403);

    register_and_login("ken@example.com", country.body["country_id"]);
    EXPECT_EQ(learner_call("POST", "/admin/countries", {{"name", "Chile"}}).status, 403);
    EXPECT_EQ(learner_call("GET", "/admin/units/1").status, 403);

    auto dup = call("POST", "/auth/register", "",
                    {{"name", "Ken"},
                     {"email", "KEN@example.com"},
                     {"password", "another-pass"},
                     {"immersion_country_id", country.body["country_id"]},
                     {"self_rated_knowledge", 1},
                     {"daily_goal_minutes", 5}});
    EXPECT_EQ(dup.status, 409);
    EXPECT_EQ(dup.body["error"]["code"], "duplicate-email");

    auto bad = call("POST", "/auth/register", "",
                    {{"name", "Out"},
                     {"email", "out@example.com"},
                     {"password", "another-pass"},
                     {"immersion_country_id", country.body["country_id"]},
                     {"self_rated_knowledge", 9},
                     {"daily_goal_minutes", 5}});
    EXPECT_EQ(bad.status, 422);
    EXPECT_EQ(call("POST", "/auth/login", "", {{"email", "ken@example.com"}, {"password", "nope-nope"}}).status, 401);

    httplib::Headers h{{"Authorization", "Bearer " + token}};
    auto malformed = client->Post("/api/v1/enrollments", h, "{not json", "application/json");
    EXPECT_EQ(malformed->status, 422);
    EXPECT_EQ(learner_call("GET", "/no/such/route").status, 404);
    EXPECT_EQ(learner_call("GET", "/lessons/999").status, 404);

    EXPECT_EQ(learner_call("POST", "/auth/logout").status, 200);
    EXPECT_EQ(learner_call("GET", "/profile").status, 401);

    clock.advance(std::chrono::hours(25));
    auto relog = learner_call("POST", "/auth/login", {{"email", "ken@example.com"}, {"password", "sakura-2024"}});
    token = relog.body["token"];
    EXPECT_EQ(learner_call("GET", "/profile").body["streak"]["current_length"], 2);
    clock.advance(std::chrono::hours(24));
    EXPECT_EQ(learner_call("GET", "/profile").status, 401);
}

TEST_F(HttpApiTest, AdminUploadErrorsAndDrafts) {
    auto empty = admin_call("POST", "/admin/units",
                            {{"country", "Japan"}, {"category", "Customs"}, {"lesson_title", "Nothing"}, {"content", ""}});
    EXPECT_EQ(empty.status, 422);
    EXPECT_EQ(empty.body["error"]["stage"], "ingestion");
    EXPECT_EQ(admin_call("POST", "/admin/units",
                         {{"country", "Japan"}, {"category", "Gardening"}, {"lesson_title", "x"}, {"content", "text"}})
                  .status,
              422);
    EXPECT_EQ(admin_call("GET", "/admin/units/1").status, 404);

    auto json_upload = admin_call("POST", "/admin/units",
                                  {{"country", "Japan"},
                                   {"category", "Cuisine"},
                                   {"lesson_title", "Sushi"},
                                   {"source_name", "sushi.txt"},
                                   {"content", support::culture_document()}});
    ASSERT_EQ(json_upload.status, 201);
    auto id = json_upload.body["unit_id"].get<std::int64_t>();
    auto fetched = admin_call("GET", "/admin/units/" + std::to_string(id));
    EXPECT_EQ(fetched.body, json_upload.body);
    EXPECT_EQ(fetched.body["quiz"]["questions"][0].count("answer_index"), 1u);
}

TEST_F(HttpApiTest, FriendsStoriesAndCountryDeletion) {
    auto japan = admin_call("POST", "/admin/countries", {{"name", "Japan"}}).body["country_id"].get<std::int64_t>();
    register_and_login("one@example.com", japan);
    auto first = token;
    register_and_login("two@example.com", japan);
    auto second = token;

    token = first;
    auto req = learner_call("POST", "/friends/requests", {{"email", "two@example.com"}});
    ASSERT_EQ(req.status, 201);
    EXPECT_EQ(learner_call("POST", "/friends/requests", {{"email", "two@example.com"}}).status, 409);
    EXPECT_EQ(learner_call("POST", "/friends/requests", {{"email", "ghost@example.com"}}).status, 404);

    token = second;
    auto listed = learner_call("GET", "/friends/requests");
    ASSERT_EQ(listed.body.size(), 1u);
    auto accept = learner_call("POST", "/friends/requests/" + std::to_string(req.body["request_id"].get<int>()) + "/accept");
    EXPECT_EQ(accept.body["state"], "accepted");
    EXPECT_EQ(learner_call("GET", "/leaderboard?scope=friends").body.size(), 2u);

    auto story = admin_call("POST", "/admin/stories",
                            {{"country_id", japan}, {"title", "Tea talk"}, {"url", "https://example.com/tea.mp3"}});
    EXPECT_EQ(story.status, 201);
    EXPECT_EQ(admin_call("POST", "/admin/stories", {{"country_id", japan}, {"title", "x"}, {"url", "ftp://x"}}).status,
              422);
    auto stories = learner_call("GET", "/stories?country=" + std::to_string(japan));
    ASSERT_EQ(stories.body.size(), 1u);
    EXPECT_EQ(stories.body[0]["url"], "https://example.com/tea.mp3");

    auto del = admin_call("DELETE", "/admin/countries/" + std::to_string(japan));
    EXPECT_EQ(del.status, 409);
    EXPECT_EQ(del.body["error"]["code"], "integrity-violation");
}

} // namespace
