#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace icls {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::sys_days;

Timestamp now_utc();

inline Date utc_date(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

inline std::int64_t to_millis(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_millis(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }

/// RFC 3339 UTC, e.g. "2024-07-01T12:30:00.250Z". Milliseconds are omitted
/// when zero.
std::string format_rfc3339(Timestamp t);
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// "YYYY-MM-DD"
std::string format_date(Date d);
std::optional<Date> parse_date(std::string_view text);

} // namespace icls
