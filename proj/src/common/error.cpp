#include "icls/error.hpp"

namespace icls {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::duplicate_email: return "duplicate-email";
    case Errc::invalid_field: return "invalid-field";
    case Errc::unknown_learner: return "unknown-learner";
    case Errc::unknown_country: return "unknown-country";
    case Errc::unknown_category: return "unknown-category";
    case Errc::unknown_lesson: return "unknown-lesson";
    case Errc::unknown_unit: return "unknown-unit";
    case Errc::skipped_rung: return "skipped-rung";
    case Errc::regression_attempt: return "regression-attempt";
    case Errc::empty_source: return "empty-source";
    case Errc::undecodable_bytes: return "undecodable-bytes";
    case Errc::invalid_params: return "invalid-params";
    case Errc::empty_data: return "empty-data";
    case Errc::no_context: return "no-context";
    case Errc::empty_question: return "empty-question";
    case Errc::context_overflow: return "context-overflow";
    case Errc::provider_unreachable: return "provider-unreachable";
    case Errc::provider_rejected: return "provider-rejected";
    case Errc::generation_too_short: return "generation-too-short";
    case Errc::quiz_underfull: return "quiz-underfull";
    case Errc::quiz_mismatch: return "quiz-mismatch";
    case Errc::invalid_quiz: return "invalid-quiz";
    case Errc::unit_not_chunked: return "unit-not-chunked";
    case Errc::unit_not_indexed: return "unit-not-indexed";
    case Errc::empty_query: return "empty-query";
    case Errc::invalid_event: return "invalid-event";
    case Errc::duplicate_award: return "duplicate-award";
    case Errc::already_claimed: return "already-claimed";
    case Errc::challenge_not_completed: return "challenge-not-completed";
    case Errc::unknown_scope_subject: return "unknown-scope-subject";
    case Errc::unauthenticated: return "unauthenticated";
    case Errc::forbidden: return "forbidden";
    case Errc::not_found: return "not-found";
    case Errc::conflict: return "conflict";
    case Errc::validation: return "validation";
    case Errc::integrity_violation: return "integrity-violation";
    }
    return "unknown";
}

int http_status(Errc code) noexcept {
    switch (code) {
    case Errc::unauthenticated:
        return 401;
    case Errc::forbidden:
        return 403;
    case Errc::unknown_learner:
    case Errc::unknown_country:
    case Errc::unknown_category:
    case Errc::unknown_lesson:
    case Errc::unknown_unit:
    case Errc::unknown_scope_subject:
    case Errc::unit_not_indexed:
    case Errc::not_found:
        return 404;
    case Errc::duplicate_email:
    case Errc::duplicate_award:
    case Errc::already_claimed:
    case Errc::regression_attempt:
    case Errc::integrity_violation:
    case Errc::conflict:
        return 409;
    case Errc::provider_unreachable:
    case Errc::provider_rejected:
        return 502;
    case Errc::generation_too_short:
    case Errc::quiz_underfull:
        return 500;
    default:
        return 422;
    }
}

} // namespace icls
