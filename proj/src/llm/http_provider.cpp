#include "icls/llm.hpp"

#include <httplib.h>
#include <json.hpp>

namespace icls::llm {

namespace {

using json = nlohmann::json;

/// Splits "https://host:port/some/path" into ("https://host:port", "/some/path").
std::pair<std::string, std::string> split_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, ""};
    auto path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

} // namespace

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    std::tie(scheme_host_port_, path_prefix_) = split_base_url(config_.base_url);
}

std::string HttpProvider::complete(const CompletionRequest& request) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    json body = {
        {"model", request.model_name},
        {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };

    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("transport failure: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
        throw TransportError("provider returned status " + std::to_string(res->status));
    if (res->status < 200 || res->status >= 300)
        throw RejectedError("provider returned status " + std::to_string(res->status) + ": " + res->body);

    auto reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw RejectedError("provider reply is not JSON");
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw RejectedError(std::string("provider reply lacks choices[0].message.content: ") + e.what());
    }
}

} // namespace icls::llm
