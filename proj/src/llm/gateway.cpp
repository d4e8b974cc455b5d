#include "icls/error.hpp"
#include "icls/ingestion.hpp"
#include "icls/llm.hpp"

#include <cstdlib>
#include <thread>

namespace icls::llm {

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

struct SlotGuard {
    explicit SlotGuard(FairSemaphore& s) : sem(s) { sem.acquire(); }
    ~SlotGuard() { sem.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;
    FairSemaphore& sem;
};

} // namespace

FairSemaphore::FairSemaphore(int slots) : slots_(slots < 1 ? 1 : slots) {}

void FairSemaphore::acquire() {
    std::unique_lock lock(mutex_);
    const auto ticket = next_ticket_++;
    cv_.wait(lock, [&] { return ticket == serving_ && active_ < slots_; });
    ++serving_;
    ++active_;
    cv_.notify_all();
}

void FairSemaphore::release() {
    {
        std::lock_guard lock(mutex_);
        --active_;
    }
    cv_.notify_all();
}

int FairSemaphore::in_use() const {
    std::lock_guard lock(mutex_);
    return active_;
}

GatewayConfig gateway_config_from_env() {
    GatewayConfig cfg;
    cfg.model_name = env_or("LLM_MODEL", cfg.model_name);
    if (const char* w = std::getenv("LLM_CONTEXT_WINDOW"); w && *w) {
        auto window = std::strtoll(w, nullptr, 10);
        if (window > 0) cfg.context_window = window;
    }
    return cfg;
}

std::shared_ptr<CompletionProvider> provider_from_env() {
    if (env_or("LLM_MODE", "mock") == "live") {
        HttpProviderConfig cfg;
        cfg.base_url = env_or("LLM_BASE_URL", "https://api.groq.com/openai/v1");
        cfg.api_key = env_or("LLM_API_KEY", "");
        return std::make_shared<HttpProvider>(std::move(cfg));
    }
    return std::make_shared<MockProvider>();
}

Gateway::Gateway(std::shared_ptr<CompletionProvider> provider, GatewayConfig config)
    : provider_(std::move(provider)),
      config_(std::move(config)),
      ceiling_(config_.max_concurrent),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

bool Gateway::prompt_fits(std::string_view prompt) const {
    return ingestion::fits_context(ingestion::estimate_tokens(prompt), config_.context_window,
                                   config_.reply_reserve);
}

CompletionRequest Gateway::make_request(std::string prompt, PromptKind kind) const {
    CompletionRequest req;
    req.prompt = std::move(prompt);
    req.model_name = config_.model_name;
    req.max_tokens = static_cast<int>(config_.reply_reserve);
    req.temperature = default_temperature(kind);
    req.provenance = kind;
    return req;
}

CompletionResult Gateway::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw Error(Errc::empty_data, "completion prompt is empty");
    if (request.max_tokens <= 0 || request.temperature < 0.0 || request.temperature > 2.0)
        throw Error(Errc::invalid_params, "max_tokens must be positive and temperature in [0,2]");
    if (!prompt_fits(request.prompt))
        throw Error(Errc::context_overflow, "prompt of " + std::to_string(ingestion::estimate_tokens(request.prompt)) +
                                                " tokens does not fit a " + std::to_string(config_.context_window) +
                                                "-token window");

    const int attempts = config_.max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        try {
            SlotGuard slot(ceiling_);
            auto start = std::chrono::steady_clock::now();
            auto text = provider_->complete(request);
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
            return CompletionResult{std::move(text), elapsed.count(), attempt};
        } catch (const TransportError& e) {
            if (attempt >= attempts)
                throw Error(Errc::provider_unreachable,
                            "provider unreachable after " + std::to_string(attempt) + " attempts: " + e.what());
            sleeper_(config_.backoff_base * (1LL << (attempt - 1)));
        } catch (const RejectedError& e) {
            throw Error(Errc::provider_rejected, e.what());
        }
    }
}

} // namespace icls::llm
