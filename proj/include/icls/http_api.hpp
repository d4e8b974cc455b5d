#pragma once

#include "icls/service.hpp"
#include "icls/time.hpp"

#include <functional>
#include <memory>
#include <string>

namespace icls::service {

using Clock = std::function<Timestamp()>;

/// JSON-over-HTTP front end under /api/v1. Learner responses never carry
/// answer_index; admin unit reports do.
class HttpApi {
public:
    explicit HttpApi(Service& service, Clock clock = now_utc);
    ~HttpApi();
    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it; follow with listen_after_bind.
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace icls::service
