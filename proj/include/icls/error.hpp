#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icls {

/// Machine-readable failure kinds shared by every module. The HTTP layer maps
/// each code onto a status; see `http_status`.
enum class Errc {
    // domain-model
    duplicate_email,
    invalid_field,
    unknown_learner,
    unknown_country,
    unknown_category,
    unknown_lesson,
    unknown_unit,
    skipped_rung,
    regression_attempt,
    // ingestion
    empty_source,
    undecodable_bytes,
    invalid_params,
    // llm-gateway
    empty_data,
    no_context,
    empty_question,
    context_overflow,
    provider_unreachable,
    provider_rejected,
    // treasury / worldwise
    generation_too_short,
    quiz_underfull,
    quiz_mismatch,
    invalid_quiz,
    // scribe
    unit_not_chunked,
    unit_not_indexed,
    empty_query,
    // proficiency / gamification
    invalid_event,
    duplicate_award,
    already_claimed,
    challenge_not_completed,
    unknown_scope_subject,
    // api-service
    unauthenticated,
    forbidden,
    not_found,
    conflict,
    validation,
    integrity_violation,
};

std::string_view to_string(Errc code) noexcept;

/// HTTP status for an error code (401/403/404/409/422, 502 for provider
/// failures, 500 otherwise).
int http_status(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    explicit Error(Errc code) : Error(code, std::string(to_string(code))) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace icls
