#include "icls/error.hpp"
#include "icls/http_api.hpp"
#include "icls/service.hpp"
#include "icls/worldwise.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace icls;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

service::Config config(const std::string& db_override) {
    auto c = service::config_from_env();
    if (!db_override.empty()) c.database_path = service::database_path_from_url(db_override);
    return c;
}

int run_serve(const std::string& db, const std::string& host, int port) {
    auto svc = std::make_unique<service::Service>(config(db), llm::provider_from_env());
    service::HttpApi api(*svc);
    spdlog::info("listening on {}:{}", host, port);
    return api.listen(host, port) ? 0 : 1;
}

int run_upload(const std::string& db, const service::UploadRequest& req) {
    service::Service svc(config(db), llm::provider_from_env());
    auto r = svc.admin_upload(req, now_utc());
    json errors = json::array();
    for (const auto& e : r.errors) errors.push_back({{"stage", e.stage}, {"code", e.code}, {"message", e.message}});
    json out{{"unit_id", r.unit.unit_id.value},
             {"lesson_id", r.unit.lesson_id.value},
             {"status", domain::to_string(r.unit.status)},
             {"summary_words", r.summary ? json(r.summary->word_count) : json(nullptr)},
             {"questions", r.quiz ? json(r.quiz->questions.size()) : json(nullptr)},
             {"quiz_rejects", r.quiz_rejects},
             {"chunks", r.chunk_count},
             {"errors", errors}};
    std::cout << out.dump(2) << "\n";
    return r.unit.status == domain::UnitStatus::published ? 0 : 2;
}

int run_parse_quiz(const std::string& path) {
    auto parsed = worldwise::parse_quiz(slurp(path));
    json qs = json::array();
    for (const auto& q : parsed.questions)
        qs.push_back({{"stem", q.stem}, {"options", q.options}, {"answer_index", q.answer_index}});
    json rj = json::array();
    for (const auto& r : parsed.rejects) rj.push_back({{"reason", r.reason}, {"block", r.block_text}});
    std::cout << json{{"questions", qs}, {"rejects", rj}}.dump(2) << "\n";
    return 0;
}

int run_verify(const std::string& db) {
    try {
        service::Service svc(config(db), std::make_shared<llm::MockProvider>());
        std::cout << "ledgers consistent\n";
        return 0;
    } catch (const Error& e) {
        if (e.code() != Errc::integrity_violation) throw;
        std::cerr << "integrity violation: " << e.what() << "\n";
        return 3;
    }
}

int run_snapshot(const std::string& db) {
    service::Service svc(config(db), std::make_shared<llm::MockProvider>());
    std::cout << svc.snapshot().dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ICLS learning backend"};
    app.require_subcommand(1);
    std::string db;
    app.add_option("--db", db, "Database path or sqlite:// URL (overrides DATABASE_URL)");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host = "0.0.0.0";
    int port = 8080;
    if (const char* p = std::getenv("PORT")) port = std::atoi(p);
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(1, 65535));

    auto* upload = app.add_subcommand("upload", "Run the content pipeline on one file");
    service::UploadRequest req;
    std::string file, kind = "document";
    upload->add_option("--country", req.country)->required();
    upload->add_option("--category", req.category)->required();
    upload->add_option("--lesson", req.lesson_title)->required();
    upload->add_option("--file", file)->required()->check(CLI::ExistingFile);
    upload->add_option("--kind", kind)->check(CLI::IsMember({"document", "video_transcript"}));
    upload->add_option("--content-type", req.content_type);
    upload->add_option("--instruction", req.instruction);

    auto* parse = app.add_subcommand("parse-quiz", "Parse model quiz output and print questions and rejects");
    std::string quiz_file;
    parse->add_option("file", quiz_file)->required()->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "Check cached totals against the ledgers");
    auto* snapshot = app.add_subcommand("snapshot", "Print the canonical state snapshot");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_default_logger(spdlog::stderr_color_mt("icls"));

    try {
        if (*serve) return run_serve(db, host, port);
        if (*upload) {
            req.content = slurp(file);
            req.source_name = file.substr(file.find_last_of('/') + 1);
            req.kind = *domain::parse_unit_kind(kind);
            return run_upload(db, req);
        }
        if (*parse) return run_parse_quiz(quiz_file);
        if (*verify) return run_verify(db);
        if (*snapshot) return run_snapshot(db);
    } catch (const Error& e) {
        std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
