#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace icls::llm {

enum class PromptKind { summary, quiz, chat };

std::string_view to_string(PromptKind kind) noexcept;

// --- prompt templates -------------------------------------------------------

/// Summary prompt with the data and the admin instruction substituted.
/// Throws empty_data when `combined_text` is empty.
std::string render_summary_prompt(std::string_view combined_text, std::string_view user_instruction);

/// Throws empty_data.
std::string render_quiz_prompt(std::string_view combined_text);

/// Chunks are joined with a blank line. Throws no_context / empty_question.
std::string render_chat_prompt(const std::vector<std::string>& context_chunks, std::string_view user_question);

/// Character count of the fixed template text, slots excluded.
std::int64_t template_overhead_tokens(PromptKind kind);

// --- completion -------------------------------------------------------------

struct CompletionRequest {
    std::string prompt;
    std::string model_name;
    int max_tokens{1024};
    double temperature{0.2};
    PromptKind provenance{PromptKind::chat};
};

/// Default sampling temperature per template: 0.7 for summaries, 0.2 otherwise.
double default_temperature(PromptKind kind) noexcept;

struct CompletionResult {
    std::string text;
    std::int64_t provider_latency_ms{0};
    int attempt{1};
};

/// Retryable failure: connection refused, timeout, 429 or 5xx.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-retryable failure: any other non-2xx status or a malformed body.
class RejectedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

/// Offline stand-in. Output is a pure function of (prompt, provenance):
/// summary provenance yields 210 words, quiz provenance yields 10 questions in
/// the canonical marker format, chat provenance yields an answer quoting the
/// data slot.
class MockProvider final : public CompletionProvider {
public:
    static constexpr int kSummaryWords = 210;
    static constexpr int kQuizQuestions = 10;

    std::string complete(const CompletionRequest& request) override;
};

struct HttpProviderConfig {
    std::string base_url;  ///< e.g. "https://api.groq.com/openai/v1"
    std::string api_key;
    std::chrono::seconds timeout{120};
};

/// Chat-completion over HTTP+JSON: POST {base}/chat/completions with model,
/// messages[{role,content}], max_tokens and temperature; the reply is read
/// from choices[0].message.content.
class HttpProvider final : public CompletionProvider {
public:
    explicit HttpProvider(HttpProviderConfig config);
    std::string complete(const CompletionRequest& request) override;

private:
    HttpProviderConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

/// FIFO-fair counting semaphore: waiters are admitted strictly in arrival
/// order once a slot frees up.
class FairSemaphore {
public:
    explicit FairSemaphore(int slots);
    void acquire();
    void release();
    int in_use() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    int slots_;
    int active_{0};
    std::uint64_t next_ticket_{0};
    std::uint64_t serving_{0};
};

struct GatewayConfig {
    std::string model_name{"llama3-8b-8192"};
    std::int64_t context_window{8192};
    std::int64_t reply_reserve{1024};
    int max_retries{3};
    std::chrono::milliseconds backoff_base{500};
    int max_concurrent{4};
};

/// Reads LLM_MODEL and LLM_CONTEXT_WINDOW over the defaults.
GatewayConfig gateway_config_from_env();

/// Builds the provider named by LLM_MODE (mock unless "live"; live reads
/// LLM_BASE_URL and LLM_API_KEY).
std::shared_ptr<CompletionProvider> provider_from_env();

/// Shared entry point for all completions: context-window check, bounded
/// retries with exponential backoff, and a per-provider concurrency ceiling.
class Gateway {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    Gateway(std::shared_ptr<CompletionProvider> provider, GatewayConfig config = {});

    /// Throws context_overflow before any provider call when the prompt does
    /// not fit, provider_unreachable once retries are exhausted and
    /// provider_rejected on a non-retryable failure.
    CompletionResult complete(const CompletionRequest& request);

    /// Request with the configured model, the given provenance and its default
    /// temperature.
    CompletionRequest make_request(std::string prompt, PromptKind kind) const;

    bool prompt_fits(std::string_view prompt) const;

    const GatewayConfig& config() const { return config_; }

    /// Replaces the backoff sleep; tests use this to avoid real waiting.
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

private:
    std::shared_ptr<CompletionProvider> provider_;
    GatewayConfig config_;
    FairSemaphore ceiling_;
    Sleeper sleeper_;
};

} // namespace icls::llm
