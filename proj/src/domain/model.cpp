#include "icls/domain.hpp"

#include "icls/error.hpp"

#include <algorithm>
#include <cctype>

namespace icls::domain {

bool is_catalog_category(std::string_view name) noexcept {
    return std::find(kCategoryCatalog.begin(), kCategoryCatalog.end(), name) != kCategoryCatalog.end();
}

std::string normalize_email(std::string_view email) {
    auto first = email.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    auto last = email.find_last_not_of(" \t\r\n");
    std::string out{email.substr(first, last - first + 1)};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void validate_profile_fields(const ProfileFields& f) {
    auto blank = [](const std::string& s) {
        return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    };
    if (blank(f.name)) throw Error(Errc::invalid_field, "name must not be empty");
    auto email = normalize_email(f.email);
    auto at = email.find('@');
    if (at == std::string::npos || at == 0 || at + 1 == email.size() ||
        email.find_first_of(" \t") != std::string::npos)
        throw Error(Errc::invalid_field, "email is malformed");
    if (f.password.size() < 8) throw Error(Errc::invalid_field, "password must have at least 8 characters");
    if (f.self_rated_knowledge < 1 || f.self_rated_knowledge > 5)
        throw Error(Errc::invalid_field, "self_rated_knowledge must be in [1,5]");
    if (f.daily_goal_minutes <= 0) throw Error(Errc::invalid_field, "daily_goal_minutes must be positive");
    if (f.org_id && blank(*f.org_id)) throw Error(Errc::invalid_field, "org_id must not be blank");
}

std::string_view to_string(UnitKind kind) noexcept {
    return kind == UnitKind::document ? "document" : "video_transcript";
}

std::optional<UnitKind> parse_unit_kind(std::string_view text) noexcept {
    if (text == "document") return UnitKind::document;
    if (text == "video_transcript") return UnitKind::video_transcript;
    return std::nullopt;
}

std::string_view to_string(UnitStatus status) noexcept {
    return status == UnitStatus::draft ? "draft" : "published";
}

std::optional<UnitStatus> parse_unit_status(std::string_view text) noexcept {
    if (text == "draft") return UnitStatus::draft;
    if (text == "published") return UnitStatus::published;
    return std::nullopt;
}

std::string_view to_string(ProgressState state) noexcept {
    switch (state) {
    case ProgressState::not_started: return "not_started";
    case ProgressState::watched: return "watched";
    case ProgressState::summary_tested: return "summary_tested";
    case ProgressState::practice_tested: return "practice_tested";
    }
    return "not_started";
}

std::optional<ProgressState> parse_progress_state(std::string_view text) noexcept {
    for (auto s : {ProgressState::not_started, ProgressState::watched, ProgressState::summary_tested,
                   ProgressState::practice_tested})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

void check_advance(ProgressState current, ProgressState next) {
    auto cur = static_cast<int>(current);
    auto nxt = static_cast<int>(next);
    if (nxt <= cur)
        throw Error(Errc::regression_attempt, std::string("cannot move from ") + std::string(to_string(current)) +
                                                  " to " + std::string(to_string(next)));
    if (nxt > cur + 1)
        throw Error(Errc::skipped_rung, std::string("cannot skip from ") + std::string(to_string(current)) +
                                            " to " + std::string(to_string(next)));
}

ProgressState Enrollment::state_of(UnitId unit) const {
    auto it = unit_progress.find(unit);
    return it == unit_progress.end() ? ProgressState::not_started : it->second;
}

} // namespace icls::domain
