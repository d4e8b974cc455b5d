// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Thresholds and tolerances are fixed below.

#include "icls/error.hpp"
#include "icls/http_api.hpp"
#include "icls/llm.hpp"
#include "icls/proficiency.hpp"
#include "icls/scribe.hpp"
#include "icls/service.hpp"
#include "icls/sqlite.hpp"
#include "icls/treasury.hpp"
#include "icls/worldwise.hpp"
#include "support/gamification_props.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/quiz_fuzz.hpp"
#include "support/service_fixture.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

using namespace icls;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kScoreTolerance = 1e-9;
constexpr double kProficiencyTolerance = 1e-12;
constexpr auto kRoundTripBudget = std::chrono::seconds(5);
constexpr auto kPipelineBudget = std::chrono::seconds(10);
constexpr int kRoundTripQuizzes = 1000;
constexpr int kFuzzRandomInputs = 10000;
constexpr int kFuzzMutations = 200;
constexpr int kRetrievalTrials = 100;
constexpr std::size_t kMaxCorpus = 200;
constexpr int kGamificationSequences = 10000;
constexpr int kConservationRuns = 5;
constexpr int kMonotonicityCases = 1000;

/// Collects the first few failure messages of one criterion.
struct Verdict {
    std::vector<std::string> failures;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
    }
};

const std::string kData = ICLS_TEST_DATA;

Verdict prompt_fidelity() {
    Verdict v;
    auto golden = [](const char* name) { return support::read_file(kData + "/golden/" + name); };
    v.require(llm::render_summary_prompt("<<COMBINED_TEXT>>", "<<USER_PROMPT>>") == golden("summary_prompt.txt"),
              "summary prompt differs from golden");
    v.require(llm::render_quiz_prompt("<<COMBINED_TEXT>>") == golden("quiz_prompt.txt"), "quiz prompt differs from golden");
    v.require(llm::render_chat_prompt({"<<TEXT>>"}, "<<USER_PROMPT>>") == golden("chat_prompt.txt"),
              "chat prompt differs from golden");
    v.detail = "3 golden templates byte-identical";
    return v;
}

Verdict quiz_round_trip() {
    Verdict v;
    std::mt19937_64 rng(1001);
    auto start = Clock::now();
    for (int i = 0; i < kRoundTripQuizzes; ++i) {
        auto quiz = support::random_quiz(rng);
        auto parsed = worldwise::parse_quiz(worldwise::render_quiz_text(quiz));
        v.require(parsed.questions == quiz && parsed.rejects.empty(), "round trip mismatch at quiz " + std::to_string(i));
    }
    auto elapsed = Clock::now() - start;
    v.require(elapsed < kRoundTripBudget, "round trip exceeded time budget");
    v.detail = std::to_string(kRoundTripQuizzes) + " quizzes in " +
               std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()) + " ms";
    return v;
}

Verdict parser_totality() {
    Verdict v;
    std::mt19937_64 rng(1002);
    auto check = [&](const std::string& text, const std::string& label) {
        try {
            auto r = worldwise::parse_quiz(text);
            v.require(r.questions.size() + r.rejects.size() == support::count_question_markers(text),
                      label + ": blocks not partitioned");
            for (const auto& q : r.questions) {
                try {
                    worldwise::validate_question(q);
                } catch (const std::exception&) {
                    v.require(false, label + ": invalid question accepted");
                }
            }
        } catch (const std::exception& e) {
            v.require(false, label + ": threw " + e.what());
        }
    };
    for (int i = 0; i < kFuzzRandomInputs; ++i) check(support::random_bytes(rng, 400), "random " + std::to_string(i));
    const auto fixture = support::read_file(kData + "/fixtures/quiz_12_blocks_2_malformed.txt");
    for (int i = 0; i < kFuzzMutations; ++i) check(support::mutate(fixture, rng), "mutation " + std::to_string(i));
    auto base = worldwise::parse_quiz(fixture);
    v.require(support::count_question_markers(fixture) == 12, "fixture does not have 12 blocks");
    v.require(base.questions.size() == 10 && base.rejects.size() == 2, "fixture did not yield 10 questions / 2 rejects");
    v.detail = std::to_string(kFuzzRandomInputs) + " random + " + std::to_string(kFuzzMutations) +
               " mutated inputs; fixture -> " + std::to_string(base.questions.size()) + " questions, " +
               std::to_string(base.rejects.size()) + " rejects";
    return v;
}

std::vector<ingestion::Chunk> chunks_of(const std::vector<std::string>& texts) {
    std::vector<ingestion::Chunk> out;
    for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({ChunkId{}, UnitId{1}, i, texts[i], 0, 0});
    return out;
}

Verdict retrieval_oracle() {
    Verdict v;
    std::mt19937_64 rng(1003);
    std::size_t compared = 0;
    for (int trial = 0; trial < kRetrievalTrials; ++trial) {
        scribe::VectorStore store;
        std::vector<std::string> texts(1 + support::pick(rng, kMaxCorpus));
        for (auto& t : texts) t = support::vocabulary_text(rng, 5 + support::pick(rng, 40));
        store.index_unit(UnitId{1}, chunks_of(texts));
        auto query = support::vocabulary_text(rng, 1 + support::pick(rng, 6));
        const double alpha = static_cast<double>(support::pick(rng, 11)) / 10.0;
        auto got = store.retrieve(UnitId{1}, query, texts.size(), alpha);
        auto want = support::brute_force_rank(store.embedder(), *store.records(UnitId{1}), query, alpha);
        v.require(got.size() == want.size(), "ranking length differs");
        for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
            v.require(got[i].ordinal == want[i].ordinal, "ranking order differs in trial " + std::to_string(trial));
            v.require(std::abs(got[i].hybrid_score - want[i].hybrid) <= kScoreTolerance, "score disagreement");
            ++compared;
        }
        for (double extreme : {1.0, 0.0}) {
            auto ranked = store.retrieve(UnitId{1}, query, texts.size(), extreme);
            for (std::size_t i = 1; i < ranked.size(); ++i) {
                auto key = [&](const scribe::ScoredChunk& s) {
                    return extreme == 1.0 ? s.cosine_component : s.keyword_component;
                };
                bool ordered = key(ranked[i - 1]) > key(ranked[i]) ||
                               (key(ranked[i - 1]) == key(ranked[i]) && ranked[i - 1].ordinal < ranked[i].ordinal);
                v.require(ordered, "degenerate alpha ordering broken");
                v.require(ranked[i].hybrid_score == key(ranked[i]), "degenerate alpha score is not the component");
            }
        }
    }
    v.detail = std::to_string(kRetrievalTrials) + " corpora, " + std::to_string(compared) + " ranked chunks within 1e-9";
    return v;
}

std::string ascii_doc(std::size_t tokens) {
    std::string s;
    while (s.size() < tokens * 4) s += "culture ";
    s.resize(tokens * 4);
    if (s.back() == ' ') s.back() = 'x';
    return s;
}

Verdict summary_contract() {
    Verdict v;
    const auto golden = support::read_file(kData + "/golden/summary_prompt.txt");
    const auto fixed_chars = golden.size() - std::string("<<COMBINED_TEXT>>").size() - std::string("<<USER_PROMPT>>").size();
    std::mt19937_64 rng(1004);
    int summaries = 0;
    std::vector<std::size_t> sizes{20000};
    for (int i = 0; i < 20; ++i) sizes.push_back(50 + support::pick(rng, 15000));
    for (auto tokens : sizes) {
        llm::Gateway g(std::make_shared<llm::MockProvider>());
        auto doc = ascii_doc(tokens);
        const auto prompt_tokens = static_cast<std::int64_t>(std::ceil(static_cast<double>(fixed_chars + doc.size()) / 4.0));
        const bool predicted_map_reduce = prompt_tokens + 1024 > 8192;
        auto s = treasury::generate_summary(g, UnitId{1}, doc, "");
        ++summaries;
        v.require(s.word_count >= 200, "accepted summary under 200 words");
        v.require(s.word_count == treasury::word_count(s.text), "word_count field disagrees with text");
        v.require((s.strategy == treasury::Strategy::map_reduce) == predicted_map_reduce,
                  "strategy disagrees with token arithmetic at " + std::to_string(tokens) + " tokens");
        if (tokens == 20000) v.require(s.strategy == treasury::Strategy::map_reduce, "20k-token document not map_reduce");
    }
    v.detail = std::to_string(summaries) + " mock summaries >= 200 words; 20k tokens -> map_reduce";
    return v;
}

Verdict gamification_invariants() {
    Verdict v;
    for (int seed = 0; seed < kGamificationSequences; ++seed) {
        auto err = support::check_random_sequence(static_cast<std::uint64_t>(seed));
        v.require(err.empty(), "sequence " + std::to_string(seed) + ": " + err);
    }
    for (int run = 0; run < kConservationRuns; ++run) {
        auto err = support::check_concurrent_conservation(static_cast<std::uint64_t>(5000 + run), 8);
        v.require(err.empty(), "8-way conservation: " + err);
    }
    v.detail = std::to_string(kGamificationSequences) + " sequences, " + std::to_string(kConservationRuns) +
               " x 8-thread conservation runs";
    return v;
}

Verdict proficiency_formula() {
    Verdict v;
    auto stats = [](std::int64_t seconds, std::int64_t attempts, double mean) {
        proficiency::EngagementStats s;
        s.total_seconds = seconds;
        s.attempt_count = attempts;
        s.result_count = 1;
        s.score_sum = mean;
        return s;
    };
    auto oracle = [](double seconds, double attempts, double mean) {
        return 0.2 * std::min(seconds / 36000.0, 1.0) + 0.2 * std::min(attempts / 50.0, 1.0) + 0.6 * mean;
    };
    v.require(std::abs(proficiency::compute_proficiency({}).value - 0.0) <= kProficiencyTolerance, "empty stats != 0");
    v.require(std::abs(proficiency::compute_proficiency(stats(36000, 50, 1.0)).value - 1.0) <= kProficiencyTolerance,
              "saturated stats != 1");
    v.require(std::abs(proficiency::compute_proficiency(stats(18000, 25, 0.8)).value - 0.68) <= kProficiencyTolerance,
              "half stats != 0.68");
    std::mt19937_64 rng(1007);
    for (int i = 0; i < kMonotonicityCases; ++i) {
        auto sec = static_cast<std::int64_t>(rng() % 50000);
        auto att = static_cast<std::int64_t>(rng() % 80);
        auto mean = static_cast<double>(rng() % 1001) / 1000.0;
        auto base = proficiency::compute_proficiency(stats(sec, att, mean)).value;
        v.require(std::abs(base - oracle(static_cast<double>(sec), static_cast<double>(att), mean)) <= kProficiencyTolerance,
                  "value disagrees with hand oracle");
        auto more_time = sec + 1 + static_cast<std::int64_t>(rng() % 5000);
        auto more_att = att + 1 + static_cast<std::int64_t>(rng() % 10);
        auto higher = std::min(1.0, mean + static_cast<double>(rng() % 100) / 1000.0);
        v.require(proficiency::compute_proficiency(stats(more_time, att, mean)).value >= base, "not monotone in time");
        v.require(proficiency::compute_proficiency(stats(sec, more_att, mean)).value >= base, "not monotone in attempts");
        v.require(proficiency::compute_proficiency(stats(sec, att, higher)).value >= base, "not monotone in score");
    }
    v.detail = "3 tabulated cases within 1e-12; " + std::to_string(kMonotonicityCases) + " perturbations monotone";
    return v;
}

struct ApiSession {
    httplib::Client& client;
    std::string token;
    std::vector<std::string> learner_bodies;

    std::pair<int, json> call(const std::string& method, const std::string& path, const json& body = nullptr,
                              bool learner = true, const std::string& bearer_override = "") {
        httplib::Headers h;
        auto bearer = bearer_override.empty() ? token : bearer_override;
        if (!bearer.empty()) h.emplace("Authorization", "Bearer " + bearer);
        auto full = "/api/v1" + path;
        auto res = method == "GET" ? client.Get(full, h)
                                   : client.Post(full, h, body.is_null() ? "" : body.dump(), "application/json");
        if (!res) return {0, nullptr};
        if (learner) learner_bodies.push_back(res->body);
        return {res->status, json::parse(res->body, nullptr, false)};
    }
};

Verdict end_to_end() {
    Verdict v;
    support::TempDir dir;
    service::Service svc(support::test_config(dir.file("e2e.db")), std::make_shared<llm::MockProvider>());
    support::ManualClock clock(support::base_time());
    service::HttpApi api(svc, [&] { return clock(); });
    int port = api.bind_to_any_port("127.0.0.1");
    std::thread server([&] { api.listen_after_bind(); });
    api.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    ApiSession s{client, "", {}};

    auto start = Clock::now();
    auto [up_status, report] = s.call("POST", "/admin/units",
                                      {{"country", "Japan"},
                                       {"category", "Customs"},
                                       {"lesson_title", "Etiquette"},
                                       {"source_name", "japan.txt"},
                                       {"content", support::culture_document()}},
                                      false, support::kAdminToken);
    auto pipeline = Clock::now() - start;
    v.require(up_status == 201, "admin upload status " + std::to_string(up_status));
    v.require(pipeline < kPipelineBudget, "pipeline exceeded 10 s");
    v.require(report.value("status", "") == "published", "unit not published");
    v.require(report["summary"].is_object() && report["summary"]["word_count"].get<int>() >= 200, "summary < 200 words");
    v.require(report["quiz"].is_object() && report["quiz"]["questions"].size() >= 10, "quiz < 10 questions");
    v.require(report.value("indexed", false) && report["chunk_count"].get<int>() > 0, "unit not indexed");
    if (!v.failures.empty()) {
        api.stop();
        server.join();
        return v;
    }
    const auto unit = std::to_string(report["unit_id"].get<std::int64_t>());
    const auto quiz_id = std::to_string(report["quiz"]["quiz_id"].get<std::int64_t>());
    const auto japan = report["country_id"].get<std::int64_t>();
    json answers = json::array();
    for (const auto& q : report["quiz"]["questions"]) answers.push_back(q["answer_index"]);

    auto [c_status, peru] = s.call("POST", "/admin/countries", {{"name", "Peru"}}, false, support::kAdminToken);
    v.require(c_status == 201, "create country failed");
    auto [reg, profile] = s.call("POST", "/auth/register",
                                 {{"name", "Ria"},
                                  {"email", "ria@example.com"},
                                  {"password", "machu-picchu"},
                                  {"immersion_country_id", peru["country_id"]},
                                  {"self_rated_knowledge", 1},
                                  {"daily_goal_minutes", 10}});
    v.require(reg == 201, "register status " + std::to_string(reg));
    auto [login, session] = s.call("POST", "/auth/login", {{"email", "ria@example.com"}, {"password", "machu-picchu"}});
    v.require(login == 200, "login failed");
    s.token = session.value("token", "");

    v.require(s.call("POST", "/units/" + unit + "/watch").first == 403, "watch allowed before enrollment");
    v.require(s.call("POST", "/enrollments", {{"country_id", japan}}).first == 201, "enroll failed");
    auto [w, watch] = s.call("POST", "/units/" + unit + "/watch");
    v.require(w == 200 && watch["xp_delta"] == 5, "watch did not pay 5 XP");
    v.require(s.call("GET", "/units/" + unit + "/summary").first == 200, "summary unavailable");
    auto [q, quiz] = s.call("GET", "/units/" + unit + "/quiz");
    v.require(q == 200 && quiz["questions"].size() == answers.size(), "quiz unavailable");
    auto [sub, result] = s.call("POST", "/quizzes/" + quiz_id + "/submit", {{"answers", answers}});
    v.require(sub == 200, "submit failed");
    v.require(result["grade"]["score"] == 1.0 && result["xp_delta"] == 2 &&
                  result["coin_delta"] == static_cast<int>(answers.size()),
              "submit envelope wrong");
    auto [ch, chat] = s.call("POST", "/units/" + unit + "/chat", {{"question", "How deep is a bow of thanks?"}});
    v.require(ch == 200 && !chat["used_chunk_ids"].empty() && !chat["answer"].get<std::string>().empty(), "chat failed");
    auto [lb, board] = s.call("GET", "/leaderboard?scope=global&limit=10");
    v.require(lb == 200 && board.size() == 1 && board[0]["total_xp"] == 7 && board[0]["rank"] == 1, "leaderboard wrong");
    auto [pr, prof] = s.call("GET", "/profile");
    v.require(pr == 200 && prof["xp"] == 7 && prof["coins"] == static_cast<int>(answers.size()), "profile totals wrong");
    v.require(svc.verify_ledgers().empty(), "ledgers out of balance");

    for (const auto& body : s.learner_bodies)
        v.require(body.find("answer_index") == std::string::npos, "answer_index leaked to a learner");

    api.stop();
    server.join();
    v.detail = "pipeline " + std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(pipeline).count()) +
               " ms; " + std::to_string(s.learner_bodies.size()) + " learner responses free of answer_index";
    return v;
}

Verdict durability() {
    Verdict v;
    support::TempDir dir;
    const auto path = dir.file("durable.db");
    auto open = [&] {
        return std::make_unique<service::Service>(support::test_config(path), std::make_shared<llm::MockProvider>());
    };
    json before;
    {
        auto s = open();
        auto t = support::base_time();
        service::UploadRequest u{"Japan", "Customs", "Manners", domain::UnitKind::document, "japan.txt",
                                 support::culture_document(), "text/plain", ""};
        auto unit = s->admin_upload(u, t).unit;
        auto japan = s->admin_unit(unit.unit_id).country_id;
        domain::ProfileFields f{"A", "a@example.com", "password-a", japan, "", 3, 10, false, {}};
        auto a = s->register_learner(f, t).learner_id;
        f.email = "b@example.com";
        auto b = s->register_learner(f, t).learner_id;
        s->login("a@example.com", "password-a", t);
        auto quiz = *s->admin_unit(unit.unit_id).quiz;
        std::map<std::size_t, int> answers;
        for (std::size_t i = 0; i < quiz.questions.size(); ++i) answers[i] = quiz.questions[i].answer_index;
        for (auto who : {a, b}) {
            s->watch(who, unit.unit_id, t);
            s->record_time(who, unit.unit_id, 120, t);
            s->submit(who, quiz.quiz_id, answers, t);
        }
        auto pq = s->practice_question(a, unit.unit_id);
        s->answer_practice(a, unit.unit_id, pq.ordinal, 1, t);
        auto r = s->send_friend_request(a, b, t);
        s->respond_friend_request(b, r.request_id, true);
        before = s->snapshot();
    }
    std::size_t vector_units = 0;
    for (const auto& country : before["catalog"])
        for (const auto& cat : country["categories"])
            for (const auto& lesson : cat["lessons"])
                for (const auto& unit : lesson["units"]) vector_units += unit.contains("vectors");
    v.require(vector_units == 1, "vector store missing from snapshot");

    auto restarted = open();
    v.require(restarted->snapshot().dump() == before.dump(), "restarted snapshot differs");
    v.require(restarted->verify_ledgers().empty(), "ledgers do not re-verify on restart");
    restarted.reset();

    {
        sql::Database db(path);
        db.exec("UPDATE learner_totals SET coin_total = coin_total + 1 WHERE learner_id = 1");
    }
    bool rejected = false;
    try {
        open();
    } catch (const Error& e) {
        rejected = e.code() == Errc::integrity_violation;
    }
    v.require(rejected, "tampered totals were not rejected at startup");
    v.detail = "snapshot of " + std::to_string(before.dump().size()) + " bytes identical after restart; tampering detected";
    return v;
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"prompt-fidelity", prompt_fidelity},
        {"quiz-round-trip", quiz_round_trip},
        {"parser-totality-recovery", parser_totality},
        {"retrieval-oracle", retrieval_oracle},
        {"summary-contract", summary_contract},
        {"gamification-invariants", gamification_invariants},
        {"proficiency-formula", proficiency_formula},
        {"end-to-end-pipeline", end_to_end},
        {"durability", durability},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v.failures.push_back(std::string("uncaught exception: ") + e.what());
        }
        if (v.failures.empty()) {
            std::cout << "PASS " << name << " - " << v.detail << std::endl;
        } else {
            ++failed;
            std::cout << "FAIL " << name << " - ";
            for (std::size_t i = 0; i < v.failures.size(); ++i) std::cout << (i ? "; " : "") << v.failures[i];
            std::cout << std::endl;
        }
    }
    return failed == 0 ? 0 : 1;
}
